"""Single-user waterfilling under a rate-equality constraint.

Given normalized noise levels n_k and a rate demand R (nats), the minimum
total power achieving that rate is (level - n_k)+ per subchannel, where the
water level satisfies  sum_{k: n_k < level} log(level / n_k) = R.  The level
is found exactly from sorted cumulative log sums; a bisection solver is kept
alongside as an independent cross-check.
"""

from __future__ import annotations

import numpy as np

from .model import Scenario, normalized_noise

__all__ = [
    "water_level_exact",
    "water_level_bisection",
    "waterfill_op",
]


def _check_inputs(n: np.ndarray, demand: float) -> None:
    if n.ndim != 1 or n.size == 0:
        raise ValueError("noise levels must form a nonempty 1-D vector")
    if not np.all(np.isfinite(n)) or np.any(n <= 0):
        raise ValueError("noise levels must be finite and positive")
    if not np.isfinite(demand) or demand <= 0:
        raise ValueError("rate demand must be finite and positive")


def water_level_exact(levels, demand: float) -> tuple[float, set[int]]:
    """Exact water level and active subchannel set.

    With the noise levels sorted ascending, the candidate level using the m
    cheapest subchannels is exp((R + sum of their logs) / m); the unique
    admissible m is the first whose candidate does not exceed the (m+1)-th
    noise level.  Products stay in the log domain so large R or N cannot
    overflow.

    Returns (level, active) where active = {k : n_k < level}; subchannels
    whose noise ties the level exactly carry zero power and are left out.
    """
    n = np.asarray(levels, dtype=float)
    _check_inputs(n, demand)

    order = np.argsort(n, kind="stable")
    logs = np.log(n[order])
    counts = np.arange(1, n.size + 1, dtype=float)
    log_candidates = (demand + np.cumsum(logs)) / counts

    admissible = np.nonzero(log_candidates[:-1] <= logs[1:])[0]
    m = int(admissible[0]) + 1 if admissible.size else n.size
    level = float(np.exp(log_candidates[m - 1]))

    active = set(np.nonzero(n < level)[0].tolist())
    return level, active


def water_level_bisection(levels, demand: float, tol: float = 1e-12,
                          max_iter: int = 500) -> float:
    """Bisection oracle for the water level.

    Brackets the level between min(n) (zero rate) and a doubling upper
    bound, then bisects until the achieved rate is within tol of the
    demand.
    """
    n = np.asarray(levels, dtype=float)
    _check_inputs(n, demand)
    if tol <= 0:
        raise ValueError("tol must be positive")

    def achieved(level: float) -> float:
        ratio = level / n
        return float(np.sum(np.log(ratio[ratio > 1.0])))

    lo = float(n.min())
    hi = 2.0 * lo
    while achieved(hi) < demand:
        hi *= 2.0

    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        r = achieved(mid)
        if abs(r - demand) <= tol:
            break
        if r < demand:
            lo = mid
        else:
            hi = mid
    return mid


def waterfill_op(scn: Scenario, powers, q: int) -> np.ndarray:
    """Best response of user q: cheapest allocation meeting its rate target.

    Waterfills over the normalized noise-plus-interference produced by the
    rival rows of ``powers``; the returned vector achieves the target rate
    exactly against those rivals.
    """
    n = normalized_noise(scn, powers, q)
    level, _ = water_level_exact(n, float(scn.rate_target[q]))
    return np.clip(level - n, 0.0, None)
