"""Figure rendering for the report-producing CLI paths.

Every report command writes its figure next to the delimited output; all
rendering goes through the Agg backend so runs are headless-safe.
"""

from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analysis import DecayScanResult, PerturbationReport
from .graph import GraphFunction

_FIGSIZE = (7.0, 4.5)
_DPI = 150


def _finish(fig, path: str):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def decay_figure(result: DecayScanResult, path: str):
    t = np.array([r[0] for r in result.rows])
    sup = np.array([r[1] for r in result.rows])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=_FIGSIZE)
    ax1.loglog(t, sup, "o", label="sup norm")
    guide = sup[0] * np.sqrt(t[0] / t)
    ax1.loglog(t, guide, "k--", lw=1, label=r"$t^{-1/2}$ guide")
    fit = np.exp(result.fitted_exponent * np.log(t)
                 + (np.log(sup[0]) - result.fitted_exponent * np.log(t[0])))
    ax1.loglog(t, fit, "r-", lw=1,
               label=f"fit, slope {result.fitted_exponent:.3f}")
    ax1.set_xlabel("t")
    ax1.set_ylabel("sup norm")
    ax1.legend(fontsize=8)
    ax2.semilogx(t, [r[2] for r in result.rows], "o-")
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"$\sqrt{t}\,\cdot$ sup norm")
    ax2.set_title(f"empirical constant {result.fitted_constant:.3f}", fontsize=9)
    _finish(fig, path)


def perturbation_figure(report: PerturbationReport, path: str):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=_FIGSIZE)
    times = sorted({r.t for r in report.rows})
    for t in times:
        rows = sorted((r for r in report.rows if r.t == t), key=lambda r: r.length)
        lengths = [r.length for r in rows]
        ax1.loglog(lengths, [r.measured_sup for r in rows], "o-", label=f"measured, t={t:g}")
        ax1.loglog(lengths, [r.bound for r in rows], "--", label=f"bound, t={t:g}")
        ax2.semilogx(lengths, [r.ratio for r in rows], "o-", label=f"t={t:g}")
    ax1.set_xlabel("head length L")
    ax1.set_ylabel("queue sup of the difference")
    ax1.legend(fontsize=8)
    ax2.set_xlabel("head length L")
    ax2.set_ylabel("measured / bound")
    ax2.legend(fontsize=8)
    _finish(fig, path)


def cycles_figure(errors: np.ndarray, bounds: np.ndarray, path: str):
    k = np.arange(len(bounds))
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    positive = errors > 0
    ax.semilogy(k[positive], errors[positive], "o", label="partial-sum error")
    ax.semilogy(k, bounds, "k--", label="remainder bound")
    ax.set_xlabel("terms (head windings)")
    ax.set_ylabel("absolute error")
    ax.legend(fontsize=8)
    _finish(fig, path)


def profile_figure(f: GraphFunction, path: str, title: str = ""):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=_FIGSIZE,
                                   gridspec_kw={"width_ratios": [3, 1]})
    xq = f.grid.queue_points()
    xh = f.grid.head_points(f.geometry)
    ax1.plot(xq, np.abs(f.queue_values), lw=0.8)
    ax1.set_xlabel("queue coordinate x")
    ax1.set_ylabel("|u|")
    if title:
        ax1.set_title(title, fontsize=9)
    ax2.plot(xh, np.abs(f.head_values), lw=0.8)
    ax2.set_xlabel("head coordinate s")
    _finish(fig, path)


def halfline_figure(x: np.ndarray, u: np.ndarray, path: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x, np.abs(u), lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("|u|")
    if title:
        ax.set_title(title, fontsize=9)
    _finish(fig, path)


def compare_figure(f_spectral: GraphFunction, f_reference: GraphFunction,
                   rel_l2: float, path: str):
    xq = f_spectral.grid.queue_points()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 5.5), sharex=True)
    ax1.plot(xq, np.abs(f_spectral.queue_values), lw=0.8, label="spectral")
    ax1.plot(xq, np.abs(f_reference.queue_values), lw=0.8, ls="--", label="Crank-Nicolson")
    ax1.set_ylabel("|u| on queue")
    ax1.legend(fontsize=8)
    ax1.set_title(f"relative L2 difference {rel_l2:.2e}", fontsize=9)
    diff = np.abs(f_spectral.queue_values - f_reference.queue_values)
    ax2.semilogy(xq, np.maximum(diff, 1e-18), lw=0.8)
    ax2.set_xlabel("queue coordinate x")
    ax2.set_ylabel("|difference|")
    _finish(fig, path)
