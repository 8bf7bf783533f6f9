"""Success and improvement probabilities on LeadingOnes, and the rates solving them.

Closed forms for the plain (1+1) EA, stable evaluation plus root finding for
the resampling variant (which conditions standard bit mutation on flipping at
least one bit), and the k-flip improvement probabilities of the unary
unbiased baseline.

All powers (1-rho)^m go through exp(m*log1p(-rho)) and all 1-(1-rho)^m
through -expm1(m*log1p(-rho)): rho can be as small as 1e-9 with m up to 1e5
without losing precision.
"""

from __future__ import annotations

import math

import numpy as np

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def p_suc(rho: float, ell: int) -> float:
    """Probability the offspring is at least as good as a level-ell parent:
    (1-rho)^ell."""
    if ell == 0:
        return 1.0
    if rho >= 1.0:
        return 0.0
    return math.exp(ell * math.log1p(-rho))


def p_imp(rho: float, ell: int) -> float:
    """Probability of leaving level ell: (1-rho)^ell * rho."""
    return p_suc(rho, ell) * rho


def rho_star(ell: int, s: float) -> float:
    """The unique rate with success probability exactly 1/(s+1) on level ell.

    Equals 1 - (s+1)^(-1/ell); defined as 1 for ell = 0.
    """
    if ell == 0:
        return 1.0
    return -math.expm1(-math.log(s + 1.0) / ell)


def rho_star_all(n: int, s: float) -> np.ndarray:
    """rho_star(ell, s) for ell = 0..n-1."""
    ells = np.arange(n, dtype=np.float64)
    with np.errstate(divide="ignore"):
        r = -np.expm1(-np.log(s + 1.0) / ells)
    r[0] = 1.0
    return r


def hat_p_suc(rho: float, ell: int, n: int) -> float:
    """Success probability of the resampling variant:
    (1-rho)^ell * (1-(1-rho)^(n-ell)) / (1-(1-rho)^n).

    The product form (rather than 1 minus a ratio) stays strictly positive
    for rho < 1 instead of saturating to 0 once (1-rho)^ell underflows the
    difference.
    """
    if rho <= 0.0:
        raise ValueError("hat_p_suc undefined at rho=0; use hat_p_suc_limit0")
    if ell == 0:
        return 1.0
    if rho >= 1.0:
        return 0.0
    lq = math.log1p(-rho)
    return (math.exp(ell * lq) * (-math.expm1((n - ell) * lq))
            / (-math.expm1(n * lq)))


def hat_p_suc_limit0(ell: int, n: int) -> float:
    """Limit of hat_p_suc as rho -> 0, which is 1 - ell/n."""
    return 1.0 - ell / n


def hat_p_imp(rho: float, ell: int, n: int) -> float:
    """Improvement probability of the resampling variant:
    (1-rho)^ell * rho / (1-(1-rho)^n); continuous limit 1/n at rho = 0."""
    if rho <= 0.0:
        return 1.0 / n
    if rho >= 1.0:
        return 1.0 if ell == 0 else 0.0
    lq = math.log1p(-rho)
    return math.exp(ell * lq) * rho / (-math.expm1(n * lq))


def _hat_p_imp_arr(rho: np.ndarray, ell, n: int) -> np.ndarray:
    """Vectorized hat_p_imp for strictly positive rho."""
    lq = np.log1p(-rho)
    return np.exp(ell * lq) * rho / (-np.expm1(n * lq))


def hat_rho_star(ell: int, s: float, n: int) -> float | None:
    """Rate with resampling success probability exactly 1/(s+1) on level ell.

    Returns None when no such rate exists, which happens iff
    ell >= s*n/(s+1): even rho -> 0 only reaches success probability
    1 - ell/n <= 1/(s+1) there.  Otherwise bisects the strictly decreasing
    hat_p_suc to relative tolerance 1e-13.
    """
    if not 1 <= ell < n:
        raise ValueError("hat_rho_star requires 1 <= ell < n")
    if ell >= s * n / (s + 1.0):
        return None
    target = 1.0 / (s + 1.0)
    lo, hi = _hat_bracket(ell, s, n)
    if not (hat_p_suc(lo, ell, n) > target > hat_p_suc(hi, ell, n)):
        lo, hi = 1e-18, 1.0 - 1e-15
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hat_p_suc(mid, ell, n) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * lo:
            break
    return 0.5 * (lo + hi)


def _hat_bracket(ell: int, s: float, n: int) -> tuple[float, float]:
    """Initial bisection bracket from the proven envelope of the target rate,
    widened by a factor 4; the envelope itself only holds for large n, so the
    caller sign-checks and falls back to the full interval."""
    edge = s * n / (s + 1.0)
    if ell >= (1.0 - 1.0 / (8.0 * (s + 1.0) ** 2)) * edge:
        eta = 1.0 - ell * (s + 1.0) / (s * n)
        lo, hi = eta / n, 4.0 * eta * (s + 1.0) / n
    else:
        lo, hi = math.log(s + 1.0) / (4.0 * ell), math.log(s + 1.0) / ell
    lo = max(lo / 4.0, 1e-18)
    hi = min(hi * 4.0, 1.0 - 1e-15)
    return lo, hi


def hat_rho_star_all(n: int, s: float) -> np.ndarray:
    """hat_rho_star for every ell in [0..n-1], vectorized.

    Entries are NaN where the rate does not exist (ell >= s*n/(s+1)) and at
    ell = 0, where the defining equation has no solution either.
    """
    ells = np.arange(n, dtype=np.float64)
    exists = (ells >= 1) & (ells < s * n / (s + 1.0))
    target = 1.0 / (s + 1.0)
    lo = np.full(n, 1e-18)
    hi = np.full(n, 1.0 - 1e-15)
    ell_safe = np.where(exists, ells, 1.0)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        lq = np.log1p(-mid)
        f = (np.exp(ell_safe * lq) * (-np.expm1((n - ell_safe) * lq))
             / (-np.expm1(n * lq)))
        gt = f > target
        lo = np.where(gt, mid, lo)
        hi = np.where(gt, hi, mid)
    out = 0.5 * (lo + hi)
    out[~exists] = np.nan
    return out


def p_gt0_opt(ell: int, n: int) -> float:
    """Rate maximizing the resampling improvement probability on level ell.

    Returns 0 when the supremum is attained in the limit rho -> 0 (value
    1/n), which happens for all ell >= n/2.  Unimodality of hat_p_imp in rho
    is not assumed: a 2048-point logarithmic grid over [1e-9, 1) locates the
    best cell and golden-section search refines it.
    """
    if not 0 <= ell < n:
        raise ValueError("p_gt0_opt requires 0 <= ell < n")
    if ell == 0:
        # rho/(1-(1-rho)^n) is increasing; flipping everything is optimal
        return 1.0
    grid = np.exp(np.linspace(math.log(1e-9), math.log(1.0 - 1e-9), 2048))
    vals = _hat_p_imp_arr(grid, float(ell), n)
    i = int(np.argmax(vals))
    a = grid[max(0, i - 1)]
    b = grid[min(len(grid) - 1, i + 1)]
    best = _golden_max(lambda r: hat_p_imp(r, ell, n), a, b)
    if hat_p_imp(best, ell, n) <= 1.0 / n:
        return 0.0
    return best


def _golden_max(f, a: float, b: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a <= 1e-18 + 1e-15 * a:
            break
    return 0.5 * (a + b)


def p_gt0_opt_all(n: int) -> np.ndarray:
    """p_gt0_opt for every ell in [0..n-1], same search fully vectorized."""
    grid = np.exp(np.linspace(math.log(1e-9), math.log(1.0 - 1e-9), 2048))
    ells = np.arange(n, dtype=np.float64)
    best_val = np.full(n, -1.0)
    best_idx = np.zeros(n, dtype=np.int64)
    lq_grid = np.log1p(-grid)
    denom = -np.expm1(n * lq_grid)
    for i in range(len(grid)):
        v = np.exp(ells * lq_grid[i]) * (grid[i] / denom[i])
        better = v > best_val
        best_val = np.where(better, v, best_val)
        best_idx[better] = i
    a = grid[np.maximum(best_idx - 1, 0)]
    b = grid[np.minimum(best_idx + 1, len(grid) - 1)]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _hat_p_imp_arr(c, ells, n)
    fd = _hat_p_imp_arr(d, ells, n)
    for _ in range(110):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - _GOLDEN * (b - a)
        d_new = a + _GOLDEN * (b - a)
        fc_new = np.where(left, _hat_p_imp_arr(c_new, ells, n), fd)
        fd_new = np.where(left, fc, _hat_p_imp_arr(d_new, ells, n))
        # recompute the side that moved; the kept side keeps its value
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
    out = 0.5 * (a + b)
    interior = _hat_p_imp_arr(out, ells, n)
    out[interior <= 1.0 / n] = 0.0
    out[0] = 1.0
    return out


def rls_k_imp(k: int, ell: int, n: int) -> float:
    """Probability that flipping a uniform k-subset improves a level-ell point.

    Counting subsets that avoid the ell prefix ones and hit the first zero:
    C(n-ell-1, k-1) / C(n, k), via log-gamma so n up to 1e5 is safe.
    """
    if not 1 <= k <= n:
        raise ValueError("k must be in [1..n]")
    if k - 1 > n - ell - 1:
        return 0.0
    num = math.lgamma(n - ell) - math.lgamma(k) - math.lgamma(n - ell - k + 1)
    den = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(num - den)


def rls_k_opt(ell: int, n: int) -> int:
    """Flip count maximizing rls_k_imp on level ell, ties toward smaller k.

    rls_k_imp(k+1)/rls_k_imp(k) >= 1 iff k <= (n-ell)/(ell+1), so the argmax
    is ceil((n-ell)/(ell+1)); at an exact tie that expression is the integer
    ratio itself, the smaller of the two tied values.
    """
    if not 0 <= ell < n:
        raise ValueError("rls_k_opt requires 0 <= ell < n")
    return max(1, math.ceil((n - ell) / (ell + 1)))


def rls_k_opt_all(n: int) -> np.ndarray:
    """rls_k_opt for every ell in [0..n-1]."""
    ells = np.arange(n, dtype=np.int64)
    return np.maximum(1, -((ells - n) // (ells + 1)))
