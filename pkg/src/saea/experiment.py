"""Monte Carlo campaigns: seeded repetitions, aggregation, tracking diagnostics, persistence."""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import probability
from .algorithms import (AlgorithmSpec, KOpt, MutationModel, OneBit,
                         RateSchedule, RunResult, SelfAdjusting, StaticRate,
                         run_to_optimum, schedule_tables)


@dataclass(frozen=True)
class Campaign:
    """A batch of independent runs of one configuration.

    Run i uses seed base_seed + i, so (base_seed, spec) fully determines
    every output regardless of execution order or worker count.
    """

    spec: AlgorithmSpec
    repetitions: int
    base_seed: int
    trace_stride: int = 0
    cap: Optional[int] = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")


@dataclass
class AggregateStats:
    """Per-target statistics across the non-timeout runs of a campaign."""

    target_mean: np.ndarray
    target_std: np.ndarray
    target_q05: np.ndarray
    target_q50: np.ndarray
    target_q95: np.ndarray
    mean_T: float
    std_T: float
    run_count: int
    timeout_count: int


@dataclass
class CampaignResult:
    campaign: Campaign
    runs: list
    stats: AggregateStats


def run_campaign(campaign: Campaign, workers: int = 1) -> CampaignResult:
    """Execute the campaign; parallelism fans out across runs only and the
    merge is by run index, so results are identical for any worker count."""
    spec = campaign.spec
    tables = schedule_tables(spec)

    def one(i: int) -> RunResult:
        return run_to_optimum(spec, campaign.base_seed + i,
                              trace_stride=campaign.trace_stride,
                              cap=campaign.cap, tables=tables)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(one, range(campaign.repetitions)))
    else:
        runs = [one(i) for i in range(campaign.repetitions)]
    return CampaignResult(campaign=campaign, runs=runs,
                          stats=aggregate(runs, spec.n))


def aggregate(runs: list, n: int) -> AggregateStats:
    ok = [r for r in runs if not r.timeout]
    timeouts = len(runs) - len(ok)
    if timeouts:
        warnings.warn(f"{timeouts} run(s) hit the iteration cap; "
                      "they are counted but excluded from the means")
    if not ok:
        z = np.full(n + 1, np.nan)
        return AggregateStats(z, z, z, z, z, math.nan, math.nan,
                              len(runs), timeouts)
    ft = np.stack([r.fixed_target for r in ok]).astype(np.float64)
    ts = np.array([r.T for r in ok], dtype=np.float64)
    return AggregateStats(
        target_mean=ft.mean(axis=0),
        target_std=ft.std(axis=0, ddof=1) if len(ok) > 1 else np.zeros(n + 1),
        target_q05=np.quantile(ft, 0.05, axis=0),
        target_q50=np.quantile(ft, 0.50, axis=0),
        target_q95=np.quantile(ft, 0.95, axis=0),
        mean_T=float(ts.mean()),
        std_T=float(ts.std(ddof=1)) if len(ok) > 1 else 0.0,
        run_count=len(runs),
        timeout_count=timeouts,
    )


# ---------------------------------------------------------------------------
# rate-tracking diagnostics

@dataclass
class OccupancyReport:
    """Fraction of traced iterations whose rate sits inside the band
    [(1-gamma)*rho_star(level), (1+gamma)*rho_star(level)], pooled and per
    level, restricted to levels >= sqrt(n)."""

    gammas: tuple
    overall: dict
    levels: np.ndarray
    per_level: dict
    n_points: int
    insufficient: bool = False


def rate_tracking_report(runs: list, spec: AlgorithmSpec, s: float,
                         gammas=(0.1, 0.2, 0.5)) -> OccupancyReport:
    """Empirical check that the adjusted rate concentrates near its target.

    Only meaningful for the unconditional model, whose target is rho_star.
    """
    if spec.model is not MutationModel.BINOMIAL:
        raise ValueError("rate tracking is defined for the unconditional "
                         "(binomial) mutation model")
    traces = [r.rate_trace for r in runs if r.rate_trace is not None]
    if not traces:
        raise ValueError("no traces recorded; rerun with a trace stride")
    lvl = np.concatenate([t[1] for t in traces])
    rho = np.concatenate([t[2] for t in traces])
    min_level = math.isqrt(spec.n - 1) + 1  # smallest integer >= sqrt(n)
    eligible = (lvl >= min_level) & (lvl < spec.n)
    lvl, rho = lvl[eligible], rho[eligible]
    if len(lvl) == 0:
        return OccupancyReport(tuple(gammas), {g: math.nan for g in gammas},
                               np.array([], dtype=np.int64), {}, 0,
                               insufficient=True)
    targets = probability.rho_star_all(spec.n, s)[lvl]
    levels = np.unique(lvl)
    overall = {}
    per_level = {}
    for g in gammas:
        inside = (rho >= (1.0 - g) * targets) & (rho <= (1.0 + g) * targets)
        overall[g] = float(inside.mean())
        fr = np.array([inside[lvl == L].mean() for L in levels])
        per_level[g] = fr
    return OccupancyReport(tuple(gammas), overall, levels, per_level,
                           int(len(lvl)))


# ---------------------------------------------------------------------------
# persistence

CSV_COLUMNS = ["variant", "n", "s", "F", "rho0", "rho_min", "rho_max",
               "seed", "run_index", "target", "hit_iteration"]


def variant_fields(spec: AlgorithmSpec, label: str = "") -> dict:
    """The configuration echo carried by every exported row."""
    c = spec.controller
    out = {"variant": label, "n": spec.n, "s": "", "F": "",
           "rho0": "", "rho_min": "", "rho_max": ""}
    if isinstance(c, SelfAdjusting):
        out.update(s=c.config.s, F=c.config.F, rho0=c.config.rho0,
                   rho_min=c.config.rho_min, rho_max=c.config.rho_max)
        out["variant"] = label or ("ea0" if spec.model is MutationModel.TRUNCATED else "ea")
    elif isinstance(c, StaticRate):
        out.update(rho0=c.rho)
        out["variant"] = label or "static"
    elif isinstance(c, RateSchedule):
        if c.s is not None:
            out["s"] = c.s
        out["variant"] = label or f"schedule-{c.kind}"
    elif isinstance(c, OneBit):
        out["variant"] = label or "rls"
    elif isinstance(c, KOpt):
        out["variant"] = label or "rls-opt"
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def export_csv(result: CampaignResult, path, label: str = "") -> None:
    """One row per (run, target): long format, 17 significant digits."""
    if not result.runs:
        raise ValueError("nothing to export")
    base = variant_fields(result.campaign.spec, label)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for i, run in enumerate(result.runs):
            seed = result.campaign.base_seed + i
            for v, hit in enumerate(run.fixed_target):
                w.writerow([_fmt(base[c]) for c in CSV_COLUMNS[:7]]
                           + [seed, i, v, "" if hit < 0 else int(hit)])


def export_json(result: CampaignResult, path, label: str = "") -> None:
    """Same schema as the CSV plus a top-level config echo."""
    if not result.runs:
        raise ValueError("nothing to export")
    doc = {
        "config": {**variant_fields(result.campaign.spec, label),
                   "base_seed": result.campaign.base_seed,
                   "repetitions": result.campaign.repetitions,
                   "trace_stride": result.campaign.trace_stride},
        "runs": [
            {"run_index": i,
             "seed": result.campaign.base_seed + i,
             "T": int(r.T),
             "timeout": bool(r.timeout),
             "fixed_target": [int(h) for h in r.fixed_target]}
            for i, r in enumerate(result.runs)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_json_runs(path) -> list:
    """Rebuild the in-memory run results from an exported JSON file."""
    with open(path) as fh:
        doc = json.load(fh)
    return [RunResult(T=r["T"], timeout=r["timeout"],
                      fixed_target=np.asarray(r["fixed_target"], dtype=np.int64))
            for r in doc["runs"]]
