"""Figure-and-table report generation.

Renders the standard diagnostic plots (associator residual decay, the
regularized ODE limit, Hodge norm growth, graded dimension counts) as PNG
files next to CSV tables with the same numbers.
"""

from __future__ import annotations

import csv
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import mpmath  # noqa: E402
import numpy as np  # noqa: E402

from . import chen, delext, hodge, relations  # noqa: E402
from .delext import MatrixSeries  # noqa: E402


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def associator_report(outdir, cutoff=3, digits=15):
    result = chen.associator(cutoff, digits=digits, j_max=16)
    ts = [2.0 ** -j for j in result.js]
    rows = [
        (j, t, float(res), float(ratio))
        for j, t, res, ratio in zip(result.js, ts, result.residuals, result.shape_ratios)
    ]
    csv_path = _write_csv(
        os.path.join(outdir, "associator_residuals.csv"),
        ["j", "t", "residual", "residual_over_t_logk"],
        rows,
    )
    fig, ax = plt.subplots()
    ax.loglog(ts, [r[2] for r in rows], "o-", label="max coefficient residual")
    ref = [t * math.log(1 / t) ** cutoff * rows[-1][2] / (ts[-1] * math.log(1 / ts[-1]) ** cutoff)
           for t in ts]
    ax.loglog(ts, ref, "--", label=r"$t\,\log^k(1/t)$ shape")
    ax.set_xlabel("t")
    ax.set_ylabel("residual")
    ax.legend()
    ax.set_title("Associator regularized-limit residuals")
    fig_path = os.path.join(outdir, "associator_residuals.png")
    fig.savefig(fig_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, fig_path]


def regularize_report(outdir):
    A = MatrixSeries([[[0, 0], [1, 0]], [[1, 0], [0, -1]]])
    P = delext.regularize(A, order=12)
    samples = [2.0 ** -j for j in range(3, 14)]
    rep = delext.regularized_limit([1.0, 1.0], A, samples=samples, P=P)
    rows = [
        (abs(t), res, ratio)
        for t, res, ratio in zip(rep.samples, rep.residuals, rep.bound_ratios)
    ]
    csv_path = _write_csv(
        os.path.join(outdir, "regularized_limit.csv"),
        ["abs_t", "residual", "residual_over_bound"],
        rows,
    )
    fig, ax = plt.subplots()
    ax.loglog([r[0] for r in rows], [max(r[1], 1e-18) for r in rows], "o-",
              label="|v(t) t^{-A0} - v0|")
    ax.set_xlabel("|t|")
    ax.set_ylabel("residual")
    ax.legend()
    ax.set_title("Regularized limit along the positive ray")
    fig_path = os.path.join(outdir, "regularized_limit.png")
    fig.savefig(fig_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, fig_path]


def hodge_norm_report(outdir):
    orbit = hodge.elliptic_orbit()
    ys = [2.0 ** k for k in range(2, 9)]
    rows = []
    fits = {}
    for label, v in (("im_N", [1, 0]), ("generic", [0, 1])):
        fit = hodge.hodge_norm_growth(orbit, v, ys)
        fits[label] = fit
        for ls, ln in zip(fit.log_scales, fit.log_norms):
            rows.append((label, ls, ln, fit.slope, fit.expected))
    csv_path = _write_csv(
        os.path.join(outdir, "hodge_norm_growth.csv"),
        ["direction", "log_log_inv_t", "log_norm_sq", "fitted_slope", "expected"],
        rows,
    )
    fig, ax = plt.subplots()
    for label, fit in fits.items():
        ax.plot(fit.log_scales, fit.log_norms, "o-",
                label=f"{label}: slope {fit.slope:.3f} (expected {fit.expected})")
    ax.set_xlabel(r"$\log\log(1/|t|)$")
    ax.set_ylabel(r"$\log \|v\|^2$")
    ax.legend()
    ax.set_title("Hodge norm growth in the degenerating elliptic orbit")
    fig_path = os.path.join(outdir, "hodge_norm_growth.png")
    fig.savefig(fig_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, fig_path]


def dims_report(outdir, m_max=12):
    dims = relations.zagier_dimensions(m_max)
    rows = [(m, d, relations.zagier_monomial_count(m)) for m, d in enumerate(dims)]
    csv_path = _write_csv(
        os.path.join(outdir, "zagier_dimensions.csv"),
        ["weight", "dimension", "monomial_count"],
        rows,
    )
    fig, ax = plt.subplots()
    ax.bar(range(len(dims)), dims)
    ax.set_xlabel("weight m")
    ax.set_ylabel("d_m")
    ax.set_title("Graded dimensions of Q[Z2] ⊗ Q⟨Z3, Z5, …⟩")
    fig_path = os.path.join(outdir, "zagier_dimensions.png")
    fig.savefig(fig_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, fig_path]


def write_report(outdir, cutoff=3, digits=15, m_max=12):
    """All figures and tables; returns the list of paths written."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    paths += associator_report(outdir, cutoff=cutoff, digits=digits)
    paths += regularize_report(outdir)
    paths += hodge_norm_report(outdir)
    paths += dims_report(outdir, m_max=m_max)
    return paths
