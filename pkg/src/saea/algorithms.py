"""The elitist (1+1) loop with pluggable mutation model and rate controller.

`step` advances one iteration in pure Python and is the reference semantics;
`run_to_optimum` executes whole runs through the compiled kernel with
identical update rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import _kernel, probability
from .core import (Rng, incremental_leading_ones, leading_ones, mutate_k,
                   random_bitvector, sample_binomial,
                   sample_binomial_positive)


class MutationModel(Enum):
    BINOMIAL = "binomial"      # k ~ Bin(n, rho)
    TRUNCATED = "truncated"    # k ~ Bin(n, rho) conditioned on k >= 1
    FIXED_K = "fixed_k"        # deterministic k from the controller


@dataclass(frozen=True)
class ControlConfig:
    """Hyper-parameters of the multiplicative success-based rate rule.

    A success multiplies the rate by F**s (clamped at rho_max), a failure
    divides it by F (clamped at rho_min); rate constant at success frequency
    1/(s+1).
    """

    F: float
    s: float
    rho0: float
    rho_min: float
    rho_max: float

    def __post_init__(self):
        if not self.F > 1.0:
            raise ValueError("update strength F must exceed 1")
        if not self.s > 0.0:
            raise ValueError("success ratio s must be positive")
        if not 0.0 < self.rho_min <= self.rho0 <= self.rho_max <= 1.0:
            raise ValueError("need 0 < rho_min <= rho0 <= rho_max <= 1")


def default_control(n: int, s: float) -> ControlConfig:
    """Practical defaults for dimension n: F = 1 + n^(-1/3) (small update
    strength), rho0 = 1/n, rho_min = 1/n^2, rho_max = 1/2."""
    return ControlConfig(F=1.0 + n ** (-1.0 / 3.0), s=s, rho0=1.0 / n,
                         rho_min=1.0 / n ** 2, rho_max=0.5)


@dataclass(frozen=True)
class SelfAdjusting:
    config: ControlConfig


@dataclass(frozen=True)
class StaticRate:
    rho: float


@dataclass(frozen=True)
class RateSchedule:
    """Fitness-dependent rate, one of the precomputed per-level targets."""

    kind: str  # 'rho_star' | 'hat_rho_star' | 'p_gt0_opt'
    s: Optional[float] = None

    def rates(self, n: int) -> np.ndarray:
        if self.kind == "rho_star":
            return probability.rho_star_all(n, self.s)
        if self.kind == "hat_rho_star":
            r = probability.hat_rho_star_all(n, self.s)
            return np.nan_to_num(r, nan=0.0)
        if self.kind == "p_gt0_opt":
            return probability.p_gt0_opt_all(n)
        raise ValueError(f"unknown schedule kind {self.kind!r}")


@dataclass(frozen=True)
class OneBit:
    """Randomized local search: always flip exactly one bit."""


@dataclass(frozen=True)
class KOpt:
    """Flip the fitness-dependent optimal number of bits."""


Controller = Union[SelfAdjusting, StaticRate, RateSchedule, OneBit, KOpt]


@dataclass(frozen=True)
class AlgorithmSpec:
    n: int
    model: MutationModel
    controller: Controller

    def __post_init__(self):
        fixed = isinstance(self.controller, (OneBit, KOpt))
        if fixed != (self.model is MutationModel.FIXED_K):
            raise ValueError("FIXED_K model pairs exactly with OneBit/KOpt")
        if self.model is MutationModel.TRUNCATED:
            if isinstance(self.controller, StaticRate) and self.controller.rho <= 0.0:
                raise ValueError("truncated model needs a positive rate")
            if (isinstance(self.controller, SelfAdjusting)
                    and self.controller.config.rho_min <= 0.0):
                raise ValueError("truncated model needs rho_min > 0")


@dataclass
class AlgoState:
    x: np.ndarray
    fitness: int
    rho: float
    iteration: int = 0


@dataclass(frozen=True)
class StepRecord:
    success: bool
    new_fitness: int
    k: int


@dataclass
class RunResult:
    """Outcome of one run: iteration count (initial evaluation not counted),
    first-hitting iteration per target v in [0..n] (-1 where unreached, which
    only happens on timeout), and an optional subsampled rate trajectory."""

    T: int
    timeout: bool
    fixed_target: np.ndarray
    rate_trace: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None


def schedule_tables(spec: AlgorithmSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-level (rho, k) lookup tables; trivial for non-schedule controllers."""
    n = spec.n
    ctrl = spec.controller
    rho_table = np.zeros(1)
    k_table = np.zeros(1, dtype=np.int64)
    if isinstance(ctrl, RateSchedule):
        rho_table = ctrl.rates(n)
    elif isinstance(ctrl, OneBit):
        k_table = np.ones(n, dtype=np.int64)
    elif isinstance(ctrl, KOpt):
        k_table = probability.rls_k_opt_all(n)
    return rho_table, k_table


def initial_state(spec: AlgorithmSpec, rng: Rng) -> AlgoState:
    x = random_bitvector(spec.n, rng)
    ctrl = spec.controller
    if isinstance(ctrl, SelfAdjusting):
        rho = ctrl.config.rho0
    elif isinstance(ctrl, StaticRate):
        rho = ctrl.rho
    else:
        rho = 0.0
    return AlgoState(x=x, fitness=leading_ones(x), rho=rho)


def _sample_k(spec: AlgorithmSpec, state: AlgoState, tables, rng: Rng
              ) -> tuple[int, float]:
    """Draw the mutation strength; returns (k, rate actually used)."""
    rho_table, k_table = tables
    ctrl = spec.controller
    if spec.model is MutationModel.FIXED_K:
        return int(k_table[state.fitness]), 0.0
    if isinstance(ctrl, RateSchedule):
        rho = float(rho_table[state.fitness])
    elif isinstance(ctrl, StaticRate):
        rho = ctrl.rho
    else:
        rho = state.rho
    if spec.model is MutationModel.BINOMIAL:
        return sample_binomial(spec.n, rho, rng), rho
    if rho <= 0.0:
        return 1, rho  # rho -> 0 limit of the truncated law: one bit
    return sample_binomial_positive(spec.n, rho, rng), rho


def step(state: AlgoState, spec: AlgorithmSpec, rng: Rng,
         tables=None) -> tuple[AlgoState, StepRecord]:
    """One offspring: sample k, flip a uniform k-subset, accept iff not worse,
    then let the controller update the rate."""
    if state.fitness >= spec.n:
        raise ValueError("already at the optimum")
    if tables is None:
        tables = schedule_tables(spec)
    k, rho = _sample_k(spec, state, tables, rng)
    y, flips = mutate_k(state.x, k, rng)
    newfit = incremental_leading_ones(state.x, state.fitness, flips)
    success = newfit >= state.fitness
    ctrl = spec.controller
    if isinstance(ctrl, SelfAdjusting):
        cfg = ctrl.config
        if success:
            rho = min(state.rho * cfg.F ** cfg.s, cfg.rho_max)
        else:
            rho = max(state.rho / cfg.F, cfg.rho_min)
    if success:
        state = AlgoState(x=y, fitness=newfit, rho=rho,
                          iteration=state.iteration + 1)
    else:
        state = AlgoState(x=state.x, fitness=state.fitness, rho=rho,
                          iteration=state.iteration + 1)
    return state, StepRecord(success=success, new_fitness=newfit, k=k)


def _kernel_tags(spec: AlgorithmSpec) -> tuple[int, int, float, float, float, float, float]:
    ctrl = spec.controller
    F = s = 1.0
    rho0 = rho_min = rho_max = 0.0
    if isinstance(ctrl, SelfAdjusting):
        tag = _kernel.SELF_ADJUSTING
        cfg = ctrl.config
        F, s = cfg.F, cfg.s
        rho0, rho_min, rho_max = cfg.rho0, cfg.rho_min, cfg.rho_max
    elif isinstance(ctrl, StaticRate):
        tag = _kernel.STATIC
        rho0 = ctrl.rho
    elif isinstance(ctrl, RateSchedule):
        tag = _kernel.SCHEDULE_RHO
    else:
        tag = _kernel.SCHEDULE_K
    model = {MutationModel.BINOMIAL: _kernel.BINOMIAL,
             MutationModel.TRUNCATED: _kernel.TRUNCATED,
             MutationModel.FIXED_K: _kernel.FIXED_K}[spec.model]
    return model, tag, F, s, rho0, rho_min, rho_max


def run_to_optimum(spec: AlgorithmSpec, seed: int, trace_stride: int = 0,
                   cap: Optional[int] = None,
                   tables: Optional[tuple] = None) -> RunResult:
    """Full run from a seeded uniform start until fitness n.

    A cap of 100*n^2 iterations (override via `cap`) turns a runaway
    configuration into a Timeout result instead of a hang; hitting it
    indicates a configuration bug, not bad luck.
    """
    n = spec.n
    if cap is None:
        cap = 100 * n * n
    if tables is None:
        tables = schedule_tables(spec)
    rho_table, k_table = tables
    model, tag, F, s, rho0, rho_min, rho_max = _kernel_tags(spec)
    fixed_target = np.full(n + 1, -1, dtype=np.int64)
    m = cap // trace_stride + 2 if trace_stride > 0 else 1
    trace_it = np.zeros(m, dtype=np.int64)
    trace_lvl = np.zeros(m, dtype=np.int64)
    trace_rho = np.zeros(m, dtype=np.float64)
    T, ntr = _kernel.run_kernel(
        n, model, tag, F, s, rho0, rho_min, rho_max,
        rho_table, k_table, seed, cap, trace_stride,
        fixed_target, trace_it, trace_lvl, trace_rho)
    trace = None
    if trace_stride > 0:
        trace = (trace_it[:ntr].copy(), trace_lvl[:ntr].copy(),
                 trace_rho[:ntr].copy())
    timeout = T < 0
    return RunResult(T=int(T) if not timeout else cap, timeout=timeout,
                     fixed_target=fixed_target, rate_trace=trace)
