"""Compiled inner loop for whole runs.

One njit kernel drives every algorithm variant; the variant is encoded by two
small integer tags (mutation model, rate controller) plus per-level tables.
The kernel owns its own seeded random stream, so a (seed, spec) pair fully
determines the run regardless of thread scheduling.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# mutation models
BINOMIAL = 0
TRUNCATED = 1
FIXED_K = 2

# controllers
SELF_ADJUSTING = 0
STATIC = 1
SCHEDULE_RHO = 2
SCHEDULE_K = 3


@njit(cache=True, nogil=True)
def _sample_truncated(n, rho):
    """Zero-truncated binomial; rho <= 0 means the rho->0 limit, one bit."""
    if rho <= 0.0:
        return 1
    if rho >= 1.0:
        return n
    if n * rho > 10.0:
        while True:
            k = np.random.binomial(n, rho)
            if k >= 1:
                return k
    lq = math.log1p(-rho)
    z = -math.expm1(n * lq)
    u = np.random.random() * z
    pm = n * rho * math.exp((n - 1) * lq)
    k = 1
    acc = pm
    while acc < u and k < n:
        pm *= (n - k) / (k + 1.0) * (rho / (1.0 - rho))
        k += 1
        acc += pm
    return k


@njit(cache=True, nogil=True)
def run_kernel(n, model, ctrl, F, s, rho0, rho_min, rho_max,
               rho_table, k_table, seed, cap, stride,
               fixed_target, trace_it, trace_lvl, trace_rho):
    """Run one (1+1) optimization to the all-ones optimum.

    Fills fixed_target[v] with the iteration of the first evaluation of a
    point of fitness >= v (0 for targets met by the initial point, -1 where
    never reached).  Every `stride`-th iteration appends (t, level, rho) to
    the trace buffers when stride > 0.  Returns (T, n_trace); T is -1 when
    the iteration cap was hit first.
    """
    np.random.seed(seed)
    x = np.empty(n, np.uint8)
    for i in range(n):
        x[i] = np.random.randint(0, 2)
    fit = 0
    while fit < n and x[fit] == 1:
        fit += 1
    for v in range(fit + 1):
        fixed_target[v] = 0

    rho = rho0
    flips = np.empty(n, np.int64)
    mark = np.zeros(n, np.uint8)
    t = 0
    ntr = 0
    while fit < n and t < cap:
        t += 1
        if ctrl == STATIC:
            rho = rho0
        elif ctrl == SCHEDULE_RHO:
            rho = rho_table[fit]

        if model == FIXED_K:
            k = k_table[fit]
        elif model == BINOMIAL:
            if rho <= 0.0:
                k = 0
            elif rho >= 1.0:
                k = n
            else:
                k = np.random.binomial(n, rho)
        else:
            k = _sample_truncated(n, rho)

        # Floyd's uniform k-subset
        for j in range(n - k, n):
            p = np.random.randint(0, j + 1)
            if mark[p]:
                p = j
            mark[p] = 1
            flips[j - (n - k)] = p

        jmin = n
        for i in range(k):
            x[flips[i]] ^= 1
            if flips[i] < jmin:
                jmin = flips[i]
        if jmin < fit:
            newfit = jmin
        else:
            newfit = fit
            while newfit < n and x[newfit] == 1:
                newfit += 1

        if newfit >= fit:
            for i in range(k):
                mark[flips[i]] = 0
            if newfit > fit:
                for v in range(fit + 1, newfit + 1):
                    fixed_target[v] = t
                fit = newfit
            if ctrl == SELF_ADJUSTING:
                rho = min(rho * F ** s, rho_max)
        else:
            for i in range(k):
                x[flips[i]] ^= 1
                mark[flips[i]] = 0
            if ctrl == SELF_ADJUSTING:
                rho = max(rho / F, rho_min)

        if stride > 0 and t % stride == 0 and ntr < trace_it.shape[0]:
            trace_it[ntr] = t
            trace_lvl[ntr] = fit
            trace_rho[ntr] = rho
            ntr += 1

    T = t if fit >= n else -1
    return T, ntr
