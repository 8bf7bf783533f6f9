"""Command-line front end: theory tables, success-ratio sweeps, Monte Carlo
campaigns, fixed-target curves and crossings, rate-tracking diagnostics.

Exit status: 0 on success, 2 on usage errors, 1 on runtime failures.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re

import click
import numpy as np

from . import experiment, theory
from .algorithms import (AlgorithmSpec, ControlConfig, KOpt, MutationModel,
                         OneBit, RateSchedule, SelfAdjusting, StaticRate)

THEORY_VARIANTS = ("ea", "ea0", "ea0-opt", "ea-opt", "static", "rls", "rls-opt")


def parse_s(value: str) -> float:
    """Success ratio; accepts the literal token e-1 to avoid precision drift."""
    if value is None:
        return None
    text = str(value).strip().lower()
    if text in ("e-1", "e−1"):
        return math.e - 1.0
    try:
        return float(text)
    except ValueError:
        raise click.BadParameter(f"not a success ratio: {value!r}")


class SuccessRatio(click.ParamType):
    name = "ratio"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        return parse_s(value)


DEFAULTS = {"n": 1000, "s": math.e - 1.0, "F": None, "rho0": None,
            "rho_min": None, "rho_max": 0.5, "seed": 1, "reps": 100,
            "eta0": 0.0}


def common_options(fn):
    opts = [
        click.option("--n", type=int, default=None, help="problem dimension"),
        click.option("--s", type=SuccessRatio(), default=None,
                     help="success ratio (accepts e-1)"),
        click.option("--F", "F", type=float, default=None,
                     help="update strength, default 1+n^(-1/3)"),
        click.option("--rho0", type=float, default=None,
                     help="initial (or static) rate, default 1/n"),
        click.option("--rho-min", type=float, default=None,
                     help="rate floor, default 1/n^2"),
        click.option("--rho-max", type=float, default=None,
                     help="rate ceiling, default 1/2"),
        click.option("--seed", type=int, default=None, help="base seed"),
        click.option("--reps", type=int, default=None, help="repetitions"),
        click.option("--out", type=click.Path(), default=None,
                     help="write delimited output here instead of stdout"),
        click.option("--plot", type=click.Path(), default=None,
                     help="also render a figure to this file"),
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="JSON file with default overrides"),
        click.option("--show-config", is_flag=True,
                     help="print the effective config as JSON and exit"),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def resolve_config(kwargs) -> dict:
    """defaults <- config file <- explicit flags."""
    cfg = dict(DEFAULTS)
    path = kwargs.pop("config_path", None)
    if path:
        with open(path) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
        if "s" in loaded:
            loaded["s"] = parse_s(loaded["s"])
        cfg.update(loaded)
    for key in list(cfg):
        flag = kwargs.pop(key, None) if key != "F" else kwargs.pop("F", None)
        if flag is not None:
            cfg[key] = flag
    n = cfg["n"]
    if cfg["F"] is None:
        cfg["F"] = 1.0 + n ** (-1.0 / 3.0)
    if cfg["rho0"] is None:
        cfg["rho0"] = 1.0 / n
    if cfg["rho_min"] is None:
        cfg["rho_min"] = 1.0 / n ** 2
    return cfg


def maybe_show_config(cfg, show):
    if show:
        click.echo(json.dumps({k: cfg[k] for k in DEFAULTS}, indent=2))
        return True
    return False


def write_rows(header, rows, out):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def build_schedule(variant: str, n: int, cfg) -> theory.LevelSchedule:
    if variant == "ea":
        return theory.selfadj_ea_schedule(n, cfg["s"])
    if variant == "ea0":
        return theory.selfadj_ea_gt0_schedule(n, cfg["s"], cfg["eta0"])
    if variant == "ea0-opt":
        return theory.gt0opt_schedule(n)
    if variant == "ea-opt":
        return theory.eaopt_schedule(n)
    if variant == "static":
        return theory.static_schedule(n, cfg["rho0"])
    if variant == "rls":
        return theory.rls_schedule(n)
    if variant == "rls-opt":
        return theory.kopt_schedule(n)
    raise click.UsageError(f"unknown variant {variant!r}; "
                           f"choose from {', '.join(THEORY_VARIANTS)}")


_VARIANT_RE = re.compile(r"^([a-z0-9-]+)(?:\(([^)]*)\))?$")


def parse_variant_token(token: str, n: int, cfg) -> tuple[str, theory.LevelSchedule]:
    """Tokens like ea(s=4), static(1.5936), rls; static takes the rate
    coefficient c with rho = c/n."""
    m = _VARIANT_RE.match(token.strip())
    if not m:
        raise click.UsageError(f"cannot parse variant token {token!r}")
    name, arg = m.group(1), m.group(2)
    local = dict(cfg)
    if arg:
        for piece in arg.split(","):
            if "=" in piece:
                key, val = piece.split("=", 1)
                key = key.strip()
                if key == "s":
                    local["s"] = parse_s(val)
                elif key in ("rho0", "eta0", "F"):
                    local[key] = float(val)
                else:
                    raise click.UsageError(f"unknown parameter {key!r} in {token!r}")
            else:
                if name != "static":
                    raise click.UsageError(
                        f"bare value only allowed for static(c): {token!r}")
                local["rho0"] = float(piece) / n
    return token.strip(), build_schedule(name, n, local)


def build_algorithm(variant: str, n: int, cfg) -> AlgorithmSpec:
    control = ControlConfig(F=cfg["F"], s=cfg["s"], rho0=cfg["rho0"],
                            rho_min=cfg["rho_min"], rho_max=cfg["rho_max"])
    if variant == "ea":
        return AlgorithmSpec(n, MutationModel.BINOMIAL, SelfAdjusting(control))
    if variant == "ea0":
        return AlgorithmSpec(n, MutationModel.TRUNCATED, SelfAdjusting(control))
    if variant == "static":
        return AlgorithmSpec(n, MutationModel.BINOMIAL, StaticRate(cfg["rho0"]))
    if variant == "rls":
        return AlgorithmSpec(n, MutationModel.FIXED_K, OneBit())
    if variant == "rls-opt":
        return AlgorithmSpec(n, MutationModel.FIXED_K, KOpt())
    if variant == "ea-opt":
        return AlgorithmSpec(n, MutationModel.BINOMIAL,
                             RateSchedule("rho_star", cfg["s"]))
    if variant == "ea0-opt":
        return AlgorithmSpec(n, MutationModel.TRUNCATED,
                             RateSchedule("p_gt0_opt"))
    raise click.UsageError(f"unknown run variant {variant!r}")


@click.group()
def main():
    """Self-adjusting (1+1) evolutionary algorithms on LeadingOnes:
    numerical runtime theory and Monte Carlo experiments."""


@main.command("theory")
@click.option("--variant", default="ea", help="|".join(THEORY_VARIANTS))
@click.option("--eta0", type=float, default=None,
              help="threshold slack for the ea0 level split (default 0)")
@common_options
def cmd_theory(variant, eta0, out, plot, show_config, **kwargs):
    """Per-level rates and expected level times, plus the total runtime."""
    if eta0 is not None:
        kwargs["eta0"] = eta0
    cfg = resolve_config(kwargs)
    if maybe_show_config(cfg, show_config):
        return
    n = cfg["n"]
    sched = build_schedule(variant, n, cfg)
    times = theory.level_times(sched)
    total = theory.expected_runtime(sched)
    per_level = sched.k if sched.model is MutationModel.FIXED_K else sched.rate
    rows = [(ell, f"{per_level[ell]:.17g}", f"{times[ell]:.17g}")
            for ell in range(n)]
    rows.append(("total", "", f"{total:.17g}"))
    write_rows(("level", "rate_or_k", "level_time"), rows, out)
    click.echo(f"total {total:.17g} normalized {total / n**2:.17g}")
    if plot:
        from . import plotting
        plotting.save_level_plot(np.arange(n), times, plot,
                                 title=f"{variant}, n = {n}")


@main.command("sweep")
@click.option("--variant", default="ea", help="ea or ea0")
@click.option("--s-min", type=SuccessRatio(), required=True)
@click.option("--s-max", type=SuccessRatio(), required=True)
@click.option("--step", type=float, required=True)
@click.option("--eta0", type=float, default=None)
@common_options
def cmd_sweep(variant, s_min, s_max, step, eta0, out, plot, show_config,
              **kwargs):
    """Expected runtime against the success ratio; reports the grid argmin."""
    if eta0 is not None:
        kwargs["eta0"] = eta0
    cfg = resolve_config(kwargs)
    if maybe_show_config(cfg, show_config):
        return
    if step <= 0:
        raise click.UsageError("step must be positive")
    if s_min > s_max:
        raise click.UsageError("need s_min <= s_max")
    n = cfg["n"]
    grid = np.arange(s_min, s_max + step * 0.5, step)
    curve, argmin_s = theory.sweep_success_ratio(n, grid, variant,
                                                 cfg["eta0"])
    rows = [(f"{s:.17g}", f"{t:.17g}", f"{t / n**2:.17g}")
            for s, t in zip(curve.abscissa, curve.values)]
    i = int(np.argmin(curve.values))
    rows.append(("argmin", f"{argmin_s:.17g}",
                 f"{curve.values[i] / n**2:.17g}"))
    write_rows(("s", "expected_T", "normalized"), rows, out)
    click.echo(f"argmin {argmin_s:.17g} normalized "
               f"{curve.values[i] / n**2:.17g}")
    if plot:
        from . import plotting
        plotting.save_sweep_plot(curve, argmin_s, plot)


@main.command("run")
@click.option("--variant", default="ea",
              help="ea|ea0|static|rls|rls-opt|ea-opt|ea0-opt")
@click.option("--workers", type=int, default=1)
@click.option("--trace-stride", type=int, default=0)
@common_options
def cmd_run(variant, workers, trace_stride, out, plot, show_config, **kwargs):
    """Monte Carlo campaign; writes raw and aggregate outputs."""
    cfg = resolve_config(kwargs)
    if maybe_show_config(cfg, show_config):
        return
    n = cfg["n"]
    spec = build_algorithm(variant, n, cfg)
    campaign = experiment.Campaign(spec=spec, repetitions=cfg["reps"],
                                   base_seed=cfg["seed"],
                                   trace_stride=trace_stride)
    try:
        result = experiment.run_campaign(campaign, workers=workers)
        stats = result.stats
        if out:
            experiment.export_csv(result, f"{out}.csv", label=variant)
            experiment.export_json(result, f"{out}.json", label=variant)
            agg_rows = [(v, f"{stats.target_mean[v]:.17g}",
                         f"{stats.target_std[v]:.17g}",
                         f"{stats.target_q05[v]:.17g}",
                         f"{stats.target_q50[v]:.17g}",
                         f"{stats.target_q95[v]:.17g}")
                        for v in range(n + 1)]
            write_rows(("target", "mean", "std", "q05", "q50", "q95"),
                       agg_rows, f"{out}.agg.csv")
    except OSError as exc:
        raise click.ClickException(f"I/O failure: {exc}")
    click.echo(f"runs {stats.run_count} timeouts {stats.timeout_count}")
    click.echo(f"mean_T {stats.mean_T:.17g}")
    click.echo(f"mean_T_per_n2 {stats.mean_T / n**2:.17g}")
    if plot:
        from . import plotting
        plotting.save_run_plot(stats, plot, n, label=variant)


@main.command("fixed-target")
@click.option("--variant", "variants", multiple=True,
              help="repeatable; tokens like ea(s=4), static(1.5936), rls")
@click.option("--source", type=click.Choice(["theory", "simulation"]),
              default="theory")
@click.option("--cross", nargs=2, type=str, default=None,
              help="two variant tokens; prints their crossing target")
@common_options
def cmd_fixed_target(variants, source, cross, out, plot, show_config,
                     **kwargs):
    """Long-format expected fixed-target times (variant, v, expected_T)."""
    cfg = resolve_config(kwargs)
    if maybe_show_config(cfg, show_config):
        return
    n = cfg["n"]
    tokens = list(variants)
    if cross:
        tokens += [t for t in cross if t not in tokens]
    if not tokens:
        raise click.UsageError("give at least one --variant or a --cross pair")
    curves = {}
    for token in tokens:
        label, sched = parse_variant_token(token, n, cfg)
        if source == "theory":
            curves[label] = theory.fixed_target_curve(sched, label)
        else:
            spec = _simulation_spec_for(token, n, cfg)
            campaign = experiment.Campaign(spec=spec, repetitions=cfg["reps"],
                                           base_seed=cfg["seed"])
            stats = experiment.run_campaign(campaign).stats
            curves[label] = theory.TheoryCurve(
                label=label, abscissa=np.arange(n + 1),
                values=stats.target_mean, n=n)
    rows = [(label, v, f"{val:.17g}")
            for label, curve in curves.items()
            for v, val in zip(curve.abscissa, curve.values)]
    write_rows(("variant", "v", "expected_T"), rows, out)
    if cross:
        a, b = cross
        v = theory.crossing_point(curves[a.strip()], curves[b.strip()])
        click.echo(f"crossing {a} {b} {'none' if v is None else v}")
    if plot:
        from . import plotting
        plotting.save_fixed_target_plot(
            [(label, c.abscissa, c.values) for label, c in curves.items()],
            plot, n)


def _simulation_spec_for(token: str, n: int, cfg) -> AlgorithmSpec:
    m = _VARIANT_RE.match(token.strip())
    name, arg = m.group(1), m.group(2)
    local = dict(cfg)
    if arg:
        for piece in arg.split(","):
            if "=" in piece:
                key, val = piece.split("=", 1)
                local[key.strip()] = parse_s(val) if key.strip() == "s" else float(val)
            else:
                local["rho0"] = float(piece) / n
    return build_algorithm(name, n, local)


@main.command("diagnose")
@click.option("--variant", default="ea", help="unconditional self-adjusting EA only")
@click.option("--gamma", "gamma_list", default="0.1,0.2,0.5",
              help="comma-separated band widths")
@common_options
def cmd_diagnose(variant, gamma_list, out, plot, show_config, **kwargs):
    """Occupancy of the traced rate around its per-level target."""
    cfg = resolve_config(kwargs)
    if maybe_show_config(cfg, show_config):
        return
    if variant != "ea":
        raise click.UsageError(
            "rate tracking is defined for the unconditional self-adjusting "
            "EA; other variants have no rho_star target to track")
    n = cfg["n"]
    gammas = tuple(float(g) for g in gamma_list.split(","))
    spec = build_algorithm("ea", n, cfg)
    campaign = experiment.Campaign(spec=spec, repetitions=cfg["reps"],
                                   base_seed=cfg["seed"],
                                   trace_stride=max(1, n // 10))
    result = experiment.run_campaign(campaign)
    report = experiment.rate_tracking_report(result.runs, spec, cfg["s"],
                                             gammas)
    if report.insufficient:
        click.echo("insufficient trace samples at eligible levels")
    rows = [(f"{g:g}", f"{report.overall[g]:.6f}") for g in gammas]
    write_rows(("gamma", "occupancy"), rows, out)
    for g in gammas:
        click.echo(f"occupancy gamma={g:g} {report.overall[g]:.6f}")
    if plot and not report.insufficient:
        from . import plotting
        plotting.save_occupancy_plot(report, plot)


if __name__ == "__main__":
    main()
