"""Iterative waterfilling solvers and equilibrium verification.

Both solvers repeat full sweeps (every user best-responds once per sweep)
until consecutive iterates agree in sup norm: the sequential variant updates
users one at a time against the freshest powers (Gauss-Seidel), the
simultaneous variant updates everyone against the previous sweep (Jacobi).
Verification is independent of the solve path: a profile is an equilibrium
iff it is a fixed point of the best-response map, and the complementarity
residuals of the underlying constrained problems give a second check.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .model import LN2, Scenario, rate, total_power, validate_powers
from .conditions import existence_matrix, is_p_matrix_z
from .waterfill import waterfill_op
from . import model

__all__ = [
    "SolverOptions",
    "IterationTrace",
    "KktReport",
    "NotPMatrixError",
    "sequential_iwfa",
    "simultaneous_iwfa",
    "solve_single_subchannel",
    "verify_gne",
    "verify_kkt",
    "trace_to_csv",
]


class NotPMatrixError(Exception):
    """The single-subchannel certificate failed: no equilibrium exists."""


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 10000
    residual_tol: float = 1e-10      # sup norm between consecutive sweeps
    record_trace: bool = False       # keep full power snapshots per sweep

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")


@dataclass
class IterationTrace:
    """Per-sweep history of one solver run."""

    iterations: list[int] = field(default_factory=list)
    rates: list[np.ndarray] = field(default_factory=list)        # nats, (Q,)
    total_powers: list[np.ndarray] = field(default_factory=list)  # (Q,)
    residuals: list[float] = field(default_factory=list)
    powers: list[np.ndarray] | None = None                       # (Q, N) snapshots

    def append(self, iteration: int, p: np.ndarray, rates: np.ndarray,
               residual: float) -> None:
        self.iterations.append(iteration)
        self.rates.append(rates)
        self.total_powers.append(p.sum(axis=1))
        self.residuals.append(residual)
        if self.powers is not None:
            self.powers.append(p.copy())

    @property
    def num_sweeps(self) -> int:
        return len(self.iterations)


def _run_iwfa(scn: Scenario, p0, opts: SolverOptions,
              sequential: bool) -> tuple[np.ndarray, IterationTrace, bool]:
    if p0 is None:
        p = np.zeros((scn.num_users, scn.num_subchannels))
    else:
        p = validate_powers(scn, p0).copy()

    trace = IterationTrace(powers=[] if opts.record_trace else None)
    converged = False
    for it in range(1, opts.max_iterations + 1):
        previous = p.copy()
        if sequential:
            for q in range(scn.num_users):
                p[q] = waterfill_op(scn, p, q)
        else:
            updated = np.empty_like(p)
            for q in range(scn.num_users):
                updated[q] = waterfill_op(scn, previous, q)
            p = updated
        residual = float(np.abs(p - previous).max())
        rates = np.array([rate(scn, p, q) for q in range(scn.num_users)])
        trace.append(it, p, rates, residual)
        if residual <= opts.residual_tol:
            converged = True
            break
    return p, trace, converged


def sequential_iwfa(scn: Scenario, p0=None,
                    opts: SolverOptions = SolverOptions()) -> tuple[np.ndarray, IterationTrace, bool]:
    """Gauss-Seidel sweeps: users best-respond in index order, each against
    the freshest powers of the others.  Non-convergence within the iteration
    budget is reported through the flag, not raised."""
    return _run_iwfa(scn, p0, opts, sequential=True)


def simultaneous_iwfa(scn: Scenario, p0=None,
                      opts: SolverOptions = SolverOptions()) -> tuple[np.ndarray, IterationTrace, bool]:
    """Jacobi sweeps: all users best-respond against the previous sweep's
    powers and commit together."""
    return _run_iwfa(scn, p0, opts, sequential=False)


def solve_single_subchannel(scn: Scenario) -> np.ndarray:
    """Closed-form equilibrium for single-subchannel scenarios.

    The equilibrium solves a linear system in the per-user powers; it exists
    (and is unique) exactly when the subchannel's existence matrix is a
    P-matrix, so a failed certificate raises NotPMatrixError.
    """
    if scn.num_subchannels != 1:
        raise ValueError("closed form requires exactly one subchannel")
    z = existence_matrix(scn, 0)
    if not is_p_matrix_z(z):
        raise NotPMatrixError(
            "single-subchannel certificate failed: no equilibrium exists")
    rhs = scn.noise[:, 0] * np.expm1(scn.rate_target)
    return np.linalg.solve(z, rhs).reshape(scn.num_users, 1)


def verify_gne(scn: Scenario, powers, tol: float) -> tuple[bool, float]:
    """Fixed-point check: how far each user's row is from its best response.

    Returns (is_equilibrium, max deviation over users in sup norm).
    """
    p = validate_powers(scn, powers)
    deviation = 0.0
    for q in range(scn.num_users):
        br = waterfill_op(scn, p, q)
        deviation = max(deviation, float(np.abs(p[q] - br).max()))
    return deviation <= tol, deviation


@dataclass
class KktReport:
    """Stationarity residuals of a candidate equilibrium.

    multipliers: per-user water levels recovered from the active
    subchannels (power units; 0 when a user transmits nothing).
    complementarity_violation: largest residual of
    min(power, noise-normalized dual slack) over all users/subchannels.
    rate_violation: largest |achieved - target| in nats.
    """

    multipliers: np.ndarray
    complementarity_violation: float
    rate_violation: float


def verify_kkt(scn: Scenario, powers, tol: float) -> KktReport:
    """Check the stationarity system of the per-user power minimizations.

    For each user, the water level is recovered by averaging
    power + normalized interference over subchannels carrying power above
    tol; the dual slack (normalized interference + power - level) must then
    be nonnegative and complementary to the power.
    """
    p = validate_powers(scn, powers)
    multipliers = np.zeros(scn.num_users)
    comp = 0.0
    rate_gap = 0.0
    for q in range(scn.num_users):
        noise_level = model.normalized_noise(scn, p, q)
        active = p[q] > tol
        if active.any():
            multipliers[q] = float((p[q][active] + noise_level[active]).mean())
        slack = noise_level + p[q] - multipliers[q]
        comp = max(comp, float(np.abs(np.minimum(p[q], slack)).max()))
        rate_gap = max(rate_gap, abs(rate(scn, p, q) - float(scn.rate_target[q])))
    return KktReport(multipliers=multipliers,
                     complementarity_violation=comp,
                     rate_violation=rate_gap)


def trace_to_csv(trace: IterationTrace, path) -> None:
    """Write a long-format sweep history.

    One row per (iteration, user): iteration, user, rate_nats, rate_bits,
    total_power, residual.  Numeric fields carry 12 significant digits.
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["iteration", "user", "rate_nats", "rate_bits",
                    "total_power", "residual"])
        for i, it in enumerate(trace.iterations):
            rates = trace.rates[i]
            totals = trace.total_powers[i]
            for q in range(len(rates)):
                w.writerow([
                    it, q,
                    f"{rates[q]:.12g}",
                    f"{rates[q] / LN2:.12g}",
                    f"{totals[q]:.12g}",
                    f"{trace.residuals[i]:.12g}",
                ])
