"""Figure rendering for experiment outputs.

Kept separate from the numeric modules so the core stays free of plotting
dependencies; the CLI imports this lazily when asked for figures.  Figures
are written to files next to the delimited output, never shown.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import ConvergenceResult, SweepPoint
from .model import LN2

__all__ = ["sweep_figure", "convergence_figure"]


def sweep_figure(rows: list[SweepPoint], path) -> None:
    """Certificate pass probability versus proximity, one curve pair per
    rate target.  The x axis is 1 - proximity (log scale), matching the
    default grid's spacing."""
    targets = sorted({r.rate_bits for r in rows})
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    markers = ["s", "x", "o", "^"]
    for i, bits in enumerate(targets):
        pts = sorted((r for r in rows if r.rate_bits == bits),
                     key=lambda r: r.one_minus_proximity)
        x = [r.one_minus_proximity for r in pts]
        marker = markers[i % len(markers)]
        ax.plot(x, [r.p_existence for r in pts], color="tab:red",
                marker=marker, label=f"existence, {bits:g} bit/subch")
        ax.plot(x, [r.p_uniqueness for r in pts], color="tab:blue",
                marker=marker, label=f"uniqueness, {bits:g} bit/subch")
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_xlabel("1 - proximity (terminal-to-base-station standoff)")
    ax.set_ylabel("certificate pass probability")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def convergence_figure(result: ConvergenceResult, rate_targets_bits, path) -> None:
    """Per-user rate trajectories of both algorithms on one axis."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for trace, style, name in (
        (result.trace_sequential, "-", "sequential"),
        (result.trace_simultaneous, "--", "simultaneous"),
    ):
        iterations = trace.iterations
        num_users = len(trace.rates[0]) if trace.rates else 0
        for q in range(num_users):
            series = [r[q] / LN2 for r in trace.rates]
            ax.plot(iterations, series, style,
                    label=f"{name} user {q}" if q < 3 else None, alpha=0.8)
    for t in rate_targets_bits:
        ax.axhline(t / 1.0, color="gray", lw=0.6, alpha=0.5)
    ax.set_xlabel("sweep")
    ax.set_ylabel("rate [bits]")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
