"""Figure rendering for the CLI report paths; every function writes a file."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_level_plot(levels, values, path, ylabel="expected level time",
                    title=""):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(levels, values, lw=1.0)
    ax.set_xlabel("fitness level")
    ax.set_ylabel(ylabel)
    ax.set_yscale("log")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_plot(curve, argmin_s, path):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    norm = curve.values / curve.n ** 2
    ax.plot(curve.abscissa, norm, lw=1.2)
    ax.axvline(argmin_s, color="crimson", ls="--", lw=0.8,
               label=f"argmin s = {argmin_s:g}")
    ax.set_xlabel("success ratio s")
    ax.set_ylabel("expected time / n^2")
    ax.set_title(f"{curve.label} sweep, n = {curve.n}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_fixed_target_plot(curves, path, n):
    """curves: list of (label, v array, values array)."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, v, vals in curves:
        ax.plot(v, vals, lw=1.0, label=label)
    ax.set_xlabel("target v")
    ax.set_ylabel("expected evaluations")
    ax.set_title(f"fixed-target expected times, n = {n}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_occupancy_plot(report, path):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for g in report.gammas:
        ax.plot(report.levels, report.per_level[g], lw=0.9,
                label=f"gamma = {g:g} (overall {report.overall[g]:.3f})")
    ax.set_xlabel("fitness level")
    ax.set_ylabel("fraction of traced iterations in band")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("rate occupancy around the target rate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_run_plot(stats, path, n, label=""):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    v = np.arange(n + 1)
    ax.plot(v, stats.target_mean, lw=1.1, label="mean first-hitting time")
    ax.fill_between(v, stats.target_q05, stats.target_q95, alpha=0.25,
                    label="5% .. 95%")
    ax.set_xlabel("target v")
    ax.set_ylabel("iterations")
    ax.set_title(f"{label} simulated fixed-target times, n = {n}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
