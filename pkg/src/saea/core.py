"""Bit strings, LeadingOnes evaluation, and the randomized mutation primitives.

A search point is a numpy array of 0/1 values (dtype uint8).  Positions are
0-based in code; the classic definition indexes bits from 1, so position j
here corresponds to bit j+1 there.
"""

from __future__ import annotations

import math

import numpy as np

# Deterministic generator type used throughout; identical seed gives an
# identical draw stream.
Rng = np.random.Generator


def make_rng(seed: int) -> Rng:
    """Create a deterministic generator from a 64-bit seed."""
    return np.random.default_rng(seed)


def random_bitvector(n: int, rng: Rng) -> np.ndarray:
    """Uniformly random point of {0,1}^n."""
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def leading_ones(x: np.ndarray) -> int:
    """Length of the maximal all-ones prefix of x.

    Scans at most result+1 positions.
    """
    n = len(x)
    i = 0
    while i < n and x[i]:
        i += 1
    return i


def incremental_leading_ones(x: np.ndarray, parent_fitness: int, flipped) -> int:
    """Fitness of x after toggling the given positions, without copying x.

    `parent_fitness` must equal leading_ones(x) before the flips.  Cost is
    O(|flipped| + |fitness change|); x itself is not modified.
    """
    n = len(x)
    jmin = n
    for j in flipped:
        if j < jmin:
            jmin = j
    if jmin < parent_fitness:
        # a prefix one was destroyed; everything before jmin is untouched
        return int(jmin)
    if jmin > parent_fitness or parent_fitness >= n:
        return parent_fitness
    # the first zero was flipped to one: scan forward through the tail,
    # honoring toggles at flipped positions
    fl = set(int(j) for j in flipped)
    i = parent_fitness
    while i < n:
        bit = int(x[i]) ^ (1 if i in fl else 0)
        if not bit:
            break
        i += 1
    return i


def sample_binomial(n: int, rho: float, rng: Rng) -> int:
    """Number of bits to flip under standard bit mutation: k ~ Bin(n, rho)."""
    if rho <= 0.0:
        return 0
    if rho >= 1.0:
        return n
    return int(rng.binomial(n, rho))


def sample_binomial_positive(n: int, rho: float, rng: Rng) -> int:
    """Zero-truncated binomial draw: k ~ Bin(n, rho) conditioned on k >= 1.

    For n*rho <= 10 uses inverse-CDF on the conditional distribution with
    log-space terms; otherwise rejection sampling (expected retries
    1/(1-(1-rho)^n), close to 1 in that regime).  Rejection alone would
    degenerate for rho = o(1/n), which is exactly the regime the
    self-adjusting resampling EA enters on high fitness levels.
    """
    if rho <= 0.0:
        raise ValueError("zero-truncated binomial requires rho > 0")
    if rho >= 1.0:
        return n
    if n * rho > 10.0:
        while True:
            k = int(rng.binomial(n, rho))
            if k >= 1:
                return k
    lq = math.log1p(-rho)
    z = -math.expm1(n * lq)  # 1-(1-rho)^n
    u = rng.random() * z
    pm = n * rho * math.exp((n - 1) * lq)  # Pr[k=1], unnormalized walk start
    k = 1
    acc = pm
    while acc < u and k < n:
        pm *= (n - k) / (k + 1.0) * (rho / (1.0 - rho))
        k += 1
        acc += pm
    return k


def mutate_k(x: np.ndarray, k: int, rng: Rng) -> tuple[np.ndarray, np.ndarray]:
    """Flip exactly k uniformly chosen distinct positions of x.

    Returns (offspring, sorted flipped positions); x is left unchanged.
    Uses Floyd's algorithm, O(k) expected draws.
    """
    n = len(x)
    chosen = set()
    for j in range(n - k, n):
        t = int(rng.integers(0, j + 1))
        if t in chosen:
            t = j
        chosen.add(t)
    flips = np.array(sorted(chosen), dtype=np.int64)
    y = x.copy()
    if k:
        y[flips] ^= 1
    return y, flips
