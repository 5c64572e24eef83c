"""Figure rendering for convergence reports.

Renders the convergence table to a log-log PNG next to the CSV: measured
mean relative error with run-to-run spread, a 1/sqrt(n_s) guide anchored at
the first point, and the accuracy floor line when noise is involved.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")  # file output only; must be set before pyplot loads

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ConvergenceResult


def render_convergence(
    result: ConvergenceResult,
    path: str,
    *,
    title: str | None = None,
    floor: float | None = None,
) -> None:
    ns = result.schedule().astype(float)
    mean = result.mean_errors()
    spread = np.array([p.std_rel_error for p in result.points])

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.errorbar(
        ns,
        mean,
        yerr=spread,
        marker="o",
        linestyle="--",
        capsize=3,
        label=f"measured ({result.sampler})",
    )
    guide = mean[0] * np.sqrt(ns[0] / ns)
    ax.plot(ns, guide, color="black", linewidth=1.0, label=r"$1/\sqrt{n_s}$ guide")
    if floor is not None:
        ax.axhline(floor, color="magenta", linestyle=":", label="accuracy floor")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"sampling count $n_s$")
    ax.set_ylabel("relative error")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
