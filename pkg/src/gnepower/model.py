"""Problem instances and the elementary channel/rate formulas.

A :class:`Scenario` bundles everything that defines one instance of the
rate-constrained power minimization game: per-subchannel power gains for
every transmitter/receiver pair, receiver noise variances, and per-user
rate targets.  Power allocations are plain ``(Q, N)`` float arrays.

Rates are handled in nats internally; the ``*_bits`` helpers and the JSON
schema convert at the boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

LN2 = math.log(2.0)

__all__ = [
    "LN2",
    "Scenario",
    "sinr",
    "rate",
    "rate_bits",
    "total_power",
    "interference_profile",
    "normalized_noise",
    "validate_powers",
]


@dataclass(frozen=True)
class Scenario:
    """Immutable problem instance.

    gain[q, r, k] is the power gain from transmitter r to receiver q on
    subchannel k; noise[q, k] the noise variance at receiver q; rate_target
    the per-user minimum total rate in nats.
    """

    gain: np.ndarray          # (Q, Q, N), nonnegative, positive diagonal
    noise: np.ndarray         # (Q, N), positive
    rate_target: np.ndarray   # (Q,), positive, nats

    num_users: int = field(init=False)
    num_subchannels: int = field(init=False)

    def __post_init__(self):
        gain = np.array(self.gain, dtype=float)
        noise = np.array(self.noise, dtype=float)
        target = np.array(self.rate_target, dtype=float)

        if gain.ndim != 3 or gain.shape[0] != gain.shape[1]:
            raise ValueError("gain must have shape (Q, Q, N)")
        q, _, n = gain.shape
        if noise.shape != (q, n):
            raise ValueError(f"noise must have shape ({q}, {n}), got {noise.shape}")
        if target.shape != (q,):
            raise ValueError(f"rate_target must have shape ({q},), got {target.shape}")
        if not np.all(np.isfinite(gain)) or np.any(gain < 0):
            raise ValueError("gain entries must be finite and nonnegative")
        diag = gain[np.arange(q), np.arange(q), :]
        if np.any(diag <= 0):
            raise ValueError("direct gains gain[q, q, k] must be positive")
        if not np.all(np.isfinite(noise)) or np.any(noise <= 0):
            raise ValueError("noise entries must be finite and positive")
        if not np.all(np.isfinite(target)) or np.any(target <= 0):
            raise ValueError("rate_target entries must be finite and positive")

        for arr in (gain, noise, target):
            arr.setflags(write=False)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "rate_target", target)
        object.__setattr__(self, "num_users", q)
        object.__setattr__(self, "num_subchannels", n)

    # -- convenience accessors -------------------------------------------

    def direct_gain(self, q: int) -> np.ndarray:
        """Length-N vector gain[q, q, :]."""
        self._check_user(q)
        return self.gain[q, q, :]

    def rate_target_bits(self) -> np.ndarray:
        return self.rate_target / LN2

    def _check_user(self, q: int) -> None:
        if not 0 <= q < self.num_users:
            raise IndexError(f"user index {q} out of range [0, {self.num_users})")

    def _check_subchannel(self, k: int) -> None:
        if not 0 <= k < self.num_subchannels:
            raise IndexError(
                f"subchannel index {k} out of range [0, {self.num_subchannels})"
            )

    # -- JSON round trip ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "num_users": self.num_users,
            "num_subchannels": self.num_subchannels,
            "gain": self.gain.tolist(),
            "noise": self.noise.tolist(),
            "rate_target_bits": (self.rate_target / LN2).tolist(),
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=1)
            f.write("\n")

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Scenario":
        for key in ("num_users", "num_subchannels", "gain", "noise", "rate_target_bits"):
            if key not in obj:
                raise ValueError(f"scenario is missing field '{key}'")
        q = int(obj["num_users"])
        n = int(obj["num_subchannels"])
        if q <= 0:
            raise ValueError("field 'num_users' must be positive")
        if n <= 0:
            raise ValueError("field 'num_subchannels' must be positive")
        try:
            gain = np.array(obj["gain"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"field 'gain' is not a numeric array: {exc}") from None
        if gain.shape != (q, q, n):
            raise ValueError(f"field 'gain' must have shape ({q}, {q}, {n}), got {gain.shape}")
        try:
            noise = np.array(obj["noise"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"field 'noise' is not a numeric array: {exc}") from None
        if noise.shape != (q, n):
            raise ValueError(f"field 'noise' must have shape ({q}, {n}), got {noise.shape}")
        try:
            bits = np.array(obj["rate_target_bits"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"field 'rate_target_bits' is not a numeric array: {exc}") from None
        if bits.shape != (q,):
            raise ValueError(f"field 'rate_target_bits' must have shape ({q},), got {bits.shape}")
        try:
            return cls(gain=gain, noise=noise, rate_target=bits * LN2)
        except ValueError as exc:
            raise ValueError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed scenario JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise ValueError("scenario JSON must be an object")
        return cls.from_json_dict(obj)


def validate_powers(scn: Scenario, powers) -> np.ndarray:
    """Coerce a power allocation into a (Q, N) float array and check it."""
    p = np.asarray(powers, dtype=float)
    shape = (scn.num_users, scn.num_subchannels)
    if p.shape != shape:
        raise ValueError(f"power allocation must have shape {shape}, got {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("power allocation entries must be finite and nonnegative")
    return p


def interference_profile(scn: Scenario, powers, q: int) -> np.ndarray:
    """Noise-plus-interference seen by receiver q on every subchannel.

    Entry k is noise[q, k] plus the received power from all rival
    transmitters; user q's own power does not enter.
    """
    scn._check_user(q)
    p = np.asarray(powers, dtype=float)
    cross = scn.gain[q] * p            # (Q, N), row r: gain[q, r, :] * p[r, :]
    # Zero the own row before summing: subtracting it afterwards would cancel
    # away the interference whenever the direct term dominates.
    cross[q] = 0.0
    return scn.noise[q] + cross.sum(axis=0)


def normalized_noise(scn: Scenario, powers, q: int) -> np.ndarray:
    """Interference profile of user q divided by its direct gains.

    This is the quantity the waterfilling level is measured against;
    strictly positive because noise is.
    """
    return interference_profile(scn, powers, q) / scn.gain[q, q, :]


def sinr(scn: Scenario, powers, q: int, k: int) -> float:
    """Signal-to-interference-plus-noise ratio of user q on subchannel k."""
    scn._check_user(q)
    scn._check_subchannel(k)
    p = np.asarray(powers, dtype=float)
    received = scn.gain[q, :, k] * p[:, k]
    own = received[q]
    received[q] = 0.0
    return float(own / (scn.noise[q, k] + received.sum()))


def rate(scn: Scenario, powers, q: int) -> float:
    """Achievable rate of user q in nats, treating rivals as noise."""
    scn._check_user(q)
    p = np.asarray(powers, dtype=float)
    tau = interference_profile(scn, p, q)
    s = scn.gain[q, q, :] * p[q] / tau
    return float(np.log1p(s).sum())


def rate_bits(scn: Scenario, powers, q: int) -> float:
    return rate(scn, powers, q) / LN2


def total_power(powers, q: int) -> tuple[float, float]:
    """Sum and per-subchannel average of user q's transmit power."""
    p = np.asarray(powers, dtype=float)
    if not 0 <= q < p.shape[0]:
        raise IndexError(f"user index {q} out of range [0, {p.shape[0]})")
    row = p[q]
    s = float(row.sum())
    return s, s / row.size
