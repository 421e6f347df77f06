"""Figure rendering for the command-line report path.

Each writer mirrors one of the delimited outputs: a snapshot CSV gets a
surface-over-bottom picture, a gauge CSV a time trace, and so on.  The
Agg backend is selected at import so reports render identically with or
without a display; import this module only from code that writes files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "snapshot_figure",
    "gauge_figure",
    "profile_figure",
    "convergence_figure",
    "sweep_figure",
]

_DPI = 150


def _sample(space, coeffs, points=2001):
    part = space.partition
    xs = np.linspace(part.a, part.b, points)
    return xs, space.eval(coeffs, xs)


def snapshot_figure(path, space, bathy, zc, uc, t=None, title=None):
    """Surface elevation over the bottom profile, velocity below."""
    xs, zeta = _sample(space, zc)
    _, u = _sample(space, uc)
    bed = -bathy.depth(xs)

    fig, (ax0, ax1) = plt.subplots(
        2, 1, sharex=True, figsize=(8.0, 5.0),
        gridspec_kw={"height_ratios": [2, 1]},
    )
    ax0.plot(xs, zeta, lw=1.2, label="zeta")
    ax0.fill_between(xs, bed, bed.min() - 0.05 * abs(bed.min()),
                     color="0.8", zorder=0)
    ax0.plot(xs, bed, color="0.4", lw=0.8)
    ax0.set_ylabel("elevation")
    if title:
        ax0.set_title(title)
    elif t is not None:
        ax0.set_title(f"t = {t:g}")
    ax1.plot(xs, u, lw=1.0, color="tab:orange")
    ax1.set_ylabel("u")
    ax1.set_xlabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def gauge_figure(path, series, scaling=None):
    """Elevation trace at one station; dimensional axes when scaled."""
    t, z, x = series.t, series.zeta, series.x
    xlabel, ylabel = "t", "zeta"
    if scaling is not None and scaling.dimensional:
        t = scaling.time_out(t)
        z = scaling.length_out(z)
        x = float(scaling.length_out(x))
        xlabel, ylabel = "t [s]", "elevation [m]"
    fig, ax = plt.subplots(figsize=(8.0, 3.2))
    ax.plot(t, z, lw=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"gauge at x = {x:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def profile_figure(path, xs, zeta, u, title=None):
    """Travelling-wave profile: elevation and velocity on shared axes."""
    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    ax.plot(xs, zeta, lw=1.2, label="zeta")
    ax.plot(xs, u, lw=1.2, ls="--", label="u")
    ax.set_xlabel("x")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def convergence_figure(path, study):
    """Log-log error curves for both fields with the fitted slopes."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.8), sharex=True)
    for ax, rows, label in (
        (axes[0], study.zeta_rows, "zeta"),
        (axes[1], study.u_rows, "u"),
    ):
        Ns = [r["N"] for r in rows]
        for key, marker in (("L2", "o"), ("Linf", "s"), ("H1", "^")):
            errs = [r[key] for r in rows]
            fit = np.polyfit(np.log(Ns), np.log(errs), 1)[0]
            ax.loglog(Ns, errs, marker=marker, ms=4, lw=1.0,
                      label=f"{key} (slope {-fit:.2f})")
        ax.set_title(label)
        ax.set_xlabel("N")
        ax.legend(frameon=False, fontsize=8)
    axes[0].set_ylabel("error")
    fig.suptitle(study.model)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def sweep_figure(path, result):
    """Final elevations of both models, one panel per shelf height."""
    betas = sorted({beta for beta, _ in result.cases})
    fig, axes = plt.subplots(len(betas), 1, figsize=(8.0, 2.6 * len(betas)),
                             sharex=True, squeeze=False)
    part = result.space.partition
    xs = np.linspace(part.a, part.b, 4001)
    for ax, beta in zip(axes[:, 0], betas):
        for kind, style in (("CBw", "-"), ("CBs", "--")):
            case = result.case(beta, kind)
            ax.plot(xs, result.space.eval(case.zc, xs), style, lw=1.0,
                    label=kind)
        ax.set_ylabel(f"beta = {beta:g}")
        ax.legend(frameon=False, fontsize=8)
    axes[-1, 0].set_xlabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
