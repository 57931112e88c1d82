"""Seeded batch experiments: certificate-probability sweeps and
convergence comparisons.

The probability sweep generates one multicell channel draw per
(grid point, trial) and evaluates every certificate on it for each rate
target, sharing the draw across targets so monotonicity in the target is
observable trial by trial.  Aggregation is pure counting, so results are
identical no matter how trials are distributed over workers.

Because the certificates scale with e^(total rate), their pass
probabilities at the default 32-subchannel targets only lift off in a thin
band of proximities very close to 1; the default grid is therefore spaced
logarithmically in (1 - proximity).
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .model import LN2, Scenario
from .conditions import (
    CertificateError,
    check_existence,
    check_existence_diagonal_dominance,
    check_existence_worst_case,
    check_uniqueness_strict,
    contraction_factors,
    crosstalk_amplification,
    is_p_matrix_z,
    uniqueness_matrix,
)
from .netgen import hex_network, rayleigh_gains
from .solvers import IterationTrace, SolverOptions, sequential_iwfa, simultaneous_iwfa

__all__ = [
    "SweepConfig",
    "SweepPoint",
    "ConvergenceResult",
    "default_proximity_grid",
    "condition_probability_sweep",
    "sweep_to_csv",
    "convergence_experiment",
    "convergence_to_csv",
    "sweeps_to_error",
]

_CERT_KEYS = ("existence", "uniqueness", "existence_zmax", "existence_dd",
              "uniqueness_cor3")


def default_proximity_grid(points: int = 10) -> tuple[float, ...]:
    """Grid of proximities approaching 1, log-spaced in (1 - proximity)."""
    standoff = np.logspace(-3.0, -12.0, points)
    return tuple(1.0 - standoff)


@dataclass(frozen=True)
class SweepConfig:
    proximity_grid: tuple[float, ...] = default_proximity_grid()
    trials: int = 200
    rate_targets_bits: tuple[float, ...] = (1.0, 2.0)   # per subchannel
    num_taps: int = 6
    num_subchannels: int = 32
    gamma: float = 2.5
    master_seed: int = 0
    noise_power: float = 1.0
    cell_radius: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.proximity_grid:
            raise ValueError("proximity grid must be nonempty")
        for p in self.proximity_grid:
            if not 0.0 <= p < 1.0:
                raise ValueError("proximity grid values must lie in [0, 1)")
        if not self.rate_targets_bits:
            raise ValueError("at least one rate target is required")

    def to_json_dict(self) -> dict:
        return {
            "proximity_grid": list(self.proximity_grid),
            "trials": self.trials,
            "rate_targets_bits": list(self.rate_targets_bits),
            "num_taps": self.num_taps,
            "num_subchannels": self.num_subchannels,
            "gamma": self.gamma,
            "master_seed": self.master_seed,
            "noise_power": self.noise_power,
            "cell_radius": self.cell_radius,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SweepConfig":
        kwargs = {}
        listy = {"proximity_grid", "rate_targets_bits"}
        for key in obj:
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"unknown sweep config field '{key}'")
            kwargs[key] = tuple(obj[key]) if key in listy else obj[key]
        return cls(**kwargs)


@dataclass(frozen=True)
class SweepPoint:
    """Certificate pass fractions at one (proximity, rate target) cell."""

    proximity: float
    one_minus_proximity: float
    rate_bits: float
    p_existence: float
    p_uniqueness: float
    p_existence_zmax: float
    p_existence_dd: float
    p_uniqueness_cor3: float
    trials: int
    seed: int


def _trial_seed(master_seed: int, point_index: int, trial: int) -> int:
    ss = np.random.SeedSequence([int(master_seed), int(point_index), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _certificates(scn: Scenario) -> dict[str, bool]:
    ok, pbar = check_existence(scn)
    if ok:
        amp = crosstalk_amplification(scn, pbar)
        unique = is_p_matrix_z(uniqueness_matrix(scn, amp))
    else:
        unique = False
    return {
        "existence": ok,
        "uniqueness": unique,
        "existence_zmax": check_existence_worst_case(scn)[0],
        "existence_dd": check_existence_diagonal_dominance(scn),
        "uniqueness_cor3": check_uniqueness_strict(scn),
    }


def _run_sweep_point(args: tuple[SweepConfig, int]) -> np.ndarray:
    """Counts array of shape (num targets, num certificates) for one grid point."""
    cfg, point_index = args
    proximity = cfg.proximity_grid[point_index]
    counts = np.zeros((len(cfg.rate_targets_bits), len(_CERT_KEYS)), dtype=np.int64)
    for trial in range(cfg.trials):
        seed = _trial_seed(cfg.master_seed, point_index, trial)
        geom = hex_network(proximity, seed, cfg.cell_radius, cfg.gamma)
        gains = rayleigh_gains(geom, cfg.num_taps, cfg.num_subchannels, seed)
        noise = np.full((geom.num_links, cfg.num_subchannels), cfg.noise_power)
        for t, bits in enumerate(cfg.rate_targets_bits):
            target = np.full(geom.num_links, bits * cfg.num_subchannels * LN2)
            scn = Scenario(gain=gains, noise=noise, rate_target=target)
            outcome = _certificates(scn)
            counts[t] += [outcome[key] for key in _CERT_KEYS]
    return counts


def condition_probability_sweep(cfg: SweepConfig,
                                threads: int = 1) -> list[SweepPoint]:
    """Certificate pass probabilities over the proximity grid.

    Deterministic given the master seed; trials may be spread over a
    process pool (threads > 1) without changing any output.
    """
    tasks = [(cfg, i) for i in range(len(cfg.proximity_grid))]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            all_counts = list(pool.map(_run_sweep_point, tasks))
    else:
        all_counts = [_run_sweep_point(t) for t in tasks]

    rows = []
    for i, proximity in enumerate(cfg.proximity_grid):
        fractions = all_counts[i] / cfg.trials
        for t, bits in enumerate(cfg.rate_targets_bits):
            f = dict(zip(_CERT_KEYS, fractions[t]))
            rows.append(SweepPoint(
                proximity=proximity,
                one_minus_proximity=1.0 - proximity,
                rate_bits=bits,
                p_existence=f["existence"],
                p_uniqueness=f["uniqueness"],
                p_existence_zmax=f["existence_zmax"],
                p_existence_dd=f["existence_dd"],
                p_uniqueness_cor3=f["uniqueness_cor3"],
                trials=cfg.trials,
                seed=cfg.master_seed,
            ))
    return rows


def sweep_to_csv(rows: list[SweepPoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["proximity", "one_minus_proximity", "rate_bits",
                    "p_existence", "p_uniqueness", "p_existence_zmax",
                    "p_existence_dd", "p_uniqueness_cor3", "trials", "seed"])
        for r in rows:
            w.writerow([
                f"{r.proximity:.12g}", f"{r.one_minus_proximity:.12g}",
                f"{r.rate_bits:.12g}", f"{r.p_existence:.12g}",
                f"{r.p_uniqueness:.12g}", f"{r.p_existence_zmax:.12g}",
                f"{r.p_existence_dd:.12g}", f"{r.p_uniqueness_cor3:.12g}",
                r.trials, r.seed,
            ])


# ---------------------------------------------------------------------------
# convergence comparison
# ---------------------------------------------------------------------------

def sweeps_to_error(trace: IterationTrace, limit: np.ndarray,
                    target: float) -> int | None:
    """First recorded sweep whose iterate is within target (sup norm) of the
    limit; None when the trace never gets there (requires power snapshots)."""
    if trace.powers is None:
        raise ValueError("trace was recorded without power snapshots")
    for i, p in enumerate(trace.powers):
        if np.abs(p - limit).max() <= target:
            return trace.iterations[i]
    return None


@dataclass
class ConvergenceResult:
    """Paired traces of both algorithms started from the same point."""

    powers_sequential: np.ndarray
    powers_simultaneous: np.ndarray
    trace_sequential: IterationTrace
    trace_simultaneous: IterationTrace
    converged_sequential: bool
    converged_simultaneous: bool
    sweeps_sequential: int | None        # sweeps to reach the limit at residual_tol
    sweeps_simultaneous: int | None
    predicted_sequential: float | None   # certificate contraction factors
    predicted_simultaneous: float | None


def convergence_experiment(scn: Scenario, opts: SolverOptions = SolverOptions(),
                           p0=None) -> ConvergenceResult:
    """Run both algorithms from one start and compare their sweep counts.

    Sweep counts measure when the iterate first lands within residual_tol
    of the run's own limit; a converged solver spends one extra confirming
    sweep that is not counted.  The certificate contraction factors are
    attached when the existence certificate passes.
    """
    run_opts = replace(opts, record_trace=True)
    p_seq, tr_seq, ok_seq = sequential_iwfa(scn, p0, run_opts)
    p_sim, tr_sim, ok_sim = simultaneous_iwfa(scn, p0, run_opts)

    try:
        rho_sim, rho_seq = contraction_factors(scn)
    except CertificateError:
        rho_sim = rho_seq = None

    return ConvergenceResult(
        powers_sequential=p_seq,
        powers_simultaneous=p_sim,
        trace_sequential=tr_seq,
        trace_simultaneous=tr_sim,
        converged_sequential=ok_seq,
        converged_simultaneous=ok_sim,
        sweeps_sequential=(sweeps_to_error(tr_seq, p_seq, opts.residual_tol)
                           if ok_seq else None),
        sweeps_simultaneous=(sweeps_to_error(tr_sim, p_sim, opts.residual_tol)
                             if ok_sim else None),
        predicted_sequential=rho_seq,
        predicted_simultaneous=rho_sim,
    )


def convergence_to_csv(result: ConvergenceResult, path) -> None:
    """Long-format rate evolution: iteration, algorithm, user, rate_bits,
    residual.  Converged runs are truncated at their sweeps-to-limit count;
    non-converged runs keep every sweep."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["iteration", "algorithm", "user", "rate_bits", "residual"])
        for name, trace, cutoff in (
            ("sequential", result.trace_sequential, result.sweeps_sequential),
            ("simultaneous", result.trace_simultaneous, result.sweeps_simultaneous),
        ):
            for i, it in enumerate(trace.iterations):
                if cutoff is not None and it > cutoff:
                    break
                for q in range(len(trace.rates[i])):
                    w.writerow([
                        it, name, q,
                        f"{trace.rates[i][q] / LN2:.12g}",
                        f"{trace.residuals[i]:.12g}",
                    ])
