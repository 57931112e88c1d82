"""Existence/uniqueness certificates, power bounds, and contraction factors.

All certificates reduce to P-matrix tests on small Z-matrices built from the
channel gains and the rate targets.  The Z structure makes the P-property
cheap to decide (positive leading principal minors, one elimination pass);
an exhaustive principal-minor test is kept as an oracle for small
dimensions.  Certificates that cannot be evaluated to full confidence
(near-singular minors) report failure, never success.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import Scenario

__all__ = [
    "CertificateError",
    "DiagnosticsReport",
    "existence_matrix",
    "max_crosstalk_ratio",
    "worst_case_existence_matrix",
    "is_z_matrix",
    "is_p_matrix_z",
    "is_p_matrix_exhaustive",
    "check_existence",
    "check_existence_worst_case",
    "check_existence_diagonal_dominance",
    "crosstalk_amplification",
    "uniqueness_matrix",
    "interference_slack",
    "check_uniqueness",
    "check_uniqueness_strict",
    "spectral_radius",
    "contraction_factors",
    "diagnose",
]

MINOR_REL_TOL = 1e-12


class CertificateError(Exception):
    """A certificate prerequisite is missing or failed."""


# ---------------------------------------------------------------------------
# certificate matrices
# ---------------------------------------------------------------------------

def _rate_factor(scn: Scenario) -> np.ndarray:
    """Per-user e^target - 1 (targets in nats)."""
    return np.expm1(scn.rate_target)


def _direct_gains(scn: Scenario) -> np.ndarray:
    q = np.arange(scn.num_users)
    return scn.gain[q, q, :]


def existence_matrix(scn: Scenario, k: int) -> np.ndarray:
    """Q x Q Z-matrix for subchannel k whose P-property certifies existence.

    Diagonal: direct gains on k.  Off-diagonal (q, r): the cross gain scaled
    by -(e^target_q - 1).
    """
    scn._check_subchannel(k)
    g = scn.gain[:, :, k]
    z = -_rate_factor(scn)[:, None] * g
    np.fill_diagonal(z, np.diagonal(g))
    return z


def max_crosstalk_ratio(scn: Scenario) -> np.ndarray:
    """Worst-case cross-to-direct gain ratios, max over subchannels.

    Entry (q, r), r != q: max_k gain[q, r, k] / gain[r, r, k]; zero diagonal.
    """
    direct = _direct_gains(scn)                       # (Q, N)
    ratio = scn.gain / direct[None, :, :]             # [q, r, k]
    beta = ratio.max(axis=2)
    np.fill_diagonal(beta, 0.0)
    return beta


def worst_case_existence_matrix(scn: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Single Z-matrix dominating every per-subchannel existence matrix.

    Returns (matrix, ratios) where ratios is :func:`max_crosstalk_ratio`;
    the matrix has unit diagonal and off-diagonal -(e^target_q - 1) * ratio.
    """
    beta = max_crosstalk_ratio(scn)
    z = -_rate_factor(scn)[:, None] * beta
    np.fill_diagonal(z, 1.0)
    return z, beta


# ---------------------------------------------------------------------------
# P-matrix tests
# ---------------------------------------------------------------------------

def _as_square(m) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_z_matrix(m) -> bool:
    """True iff every off-diagonal entry is <= 0."""
    a = _as_square(m)
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return bool(np.all(off <= 0.0))


def is_p_matrix_z(m) -> bool:
    """P-matrix test specialized to Z-matrices.

    A Z-matrix is a P-matrix iff it is a nonsingular M-matrix, equivalently
    iff all leading principal minors are positive.  One elimination pass
    (no pivoting; the Schur complements stay Z) decides this in O(n^3).
    Pivots that are nonpositive, or positive but within MINOR_REL_TOL of the
    original diagonal scale, count as failure.
    """
    a = _as_square(m)
    if not is_z_matrix(a):
        raise ValueError("input is not a Z-matrix (positive off-diagonal entry)")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")

    n = a.shape[0]
    original_diag = np.abs(np.diagonal(a))
    work = a.copy()
    for i in range(n):
        pivot = work[i, i]
        if not pivot > MINOR_REL_TOL * original_diag[i] or not pivot > 0.0:
            return False
        if i + 1 < n:
            factors = work[i + 1:, i] / pivot
            work[i + 1:, i + 1:] -= np.outer(factors, work[i, i + 1:])
    return True


def is_p_matrix_exhaustive(m, max_dim: int = 8) -> bool:
    """Oracle P-matrix test: every nonempty principal minor is positive.

    Enumerates all 2^n - 1 principal submatrices; refuses dimensions above
    max_dim.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n > max_dim:
        raise ValueError(f"dimension {n} exceeds max_dim={max_dim}")
    idx = np.arange(n)
    for mask in range(1, 1 << n):
        sel = idx[[(mask >> i) & 1 == 1 for i in range(n)]]
        sub = a[np.ix_(sel, sel)]
        if not np.linalg.det(sub) > 0.0:
            return False
    return True


# ---------------------------------------------------------------------------
# existence certificates
# ---------------------------------------------------------------------------

def check_existence(scn: Scenario) -> tuple[bool, np.ndarray | None]:
    """Per-subchannel certificate plus the equilibrium power bound.

    Passes iff the existence matrix of every subchannel is a P-matrix; the
    bound column for subchannel k then solves that matrix against
    noise * (e^target - 1).  Any linear-solve failure is reported as a
    certificate failure rather than raised.
    """
    q, n = scn.num_users, scn.num_subchannels
    factor = _rate_factor(scn)
    pbar = np.empty((q, n))
    for k in range(n):
        z = existence_matrix(scn, k)
        if not is_p_matrix_z(z):
            return False, None
        try:
            pbar[:, k] = np.linalg.solve(z, scn.noise[:, k] * factor)
        except np.linalg.LinAlgError:
            return False, None
    return True, pbar


def check_existence_worst_case(scn: Scenario) -> tuple[bool, np.ndarray | None]:
    """Coarser single-matrix certificate and its (weaker) power bound."""
    z, _ = worst_case_existence_matrix(scn)
    if not is_p_matrix_z(z):
        return False, None
    try:
        y = np.linalg.solve(z, _rate_factor(scn))
    except np.linalg.LinAlgError:
        return False, None
    max_noise = scn.noise.max(axis=0)                 # (N,)
    bound = y[:, None] * max_noise[None, :] / _direct_gains(scn)
    return True, bound


def check_existence_diagonal_dominance(scn: Scenario) -> bool:
    """Row diagonal-dominance shortcut implying the per-subchannel certificate.

    For every user and subchannel, the summed cross-to-direct gain ratio
    must stay below 1 / (e^target - 1).
    """
    direct = _direct_gains(scn)                       # (Q, N)
    cross_gain = scn.gain.copy()
    users = np.arange(scn.num_users)
    cross_gain[users, users, :] = 0.0
    cross_sum = cross_gain.sum(axis=1)                # (Q, N)
    limit = 1.0 / _rate_factor(scn)
    return bool(np.all(cross_sum / direct < limit[:, None]))


# ---------------------------------------------------------------------------
# uniqueness certificates
# ---------------------------------------------------------------------------

def crosstalk_amplification(scn: Scenario, power_bound) -> np.ndarray:
    """Cross-gain ratios amplified by worst-case interference at the bound.

    Entry (q, r), r != q:
        max_k  gain[q,r,k]/gain[r,r,k] * tau_r(k) / noise[q,k]
    where tau_r(k) is receiver r's noise plus the interference its rivals
    produce when transmitting at the existence power bound.
    """
    if power_bound is None:
        raise CertificateError(
            "power bound unavailable (existence certificate must pass first)")
    pbar = np.asarray(power_bound, dtype=float)
    direct = _direct_gains(scn)
    cross_gain = scn.gain.copy()
    users = np.arange(scn.num_users)
    cross_gain[users, users, :] = 0.0                 # own term masked, not subtracted
    tau = scn.noise + np.einsum("qrk,rk->qk", cross_gain, pbar)
    ratio = scn.gain / direct[None, :, :]             # [q, r, k]
    weighted = ratio * (tau[None, :, :] / scn.noise[:, None, :])
    amp = weighted.max(axis=2)
    np.fill_diagonal(amp, 0.0)
    return amp


def uniqueness_matrix(scn: Scenario, amplification) -> np.ndarray:
    """Z-matrix whose P-property certifies a unique equilibrium.

    Diagonal e^-target_q; off-diagonal -e^target_q * amplification[q, r].
    """
    amp = np.asarray(amplification, dtype=float)
    b = -np.exp(scn.rate_target)[:, None] * amp
    np.fill_diagonal(b, np.exp(-scn.rate_target))
    return b


def interference_slack(scn: Scenario) -> tuple[float, float]:
    """Scalars (chi, rho) summarizing interference load and rate spread.

    chi = 1 - max_q (e^target_q - 1) * sum of user q's worst-case crosstalk
    ratios; rho = (e^max target - 1) / (e^min target - 1) >= 1.
    """
    beta = max_crosstalk_ratio(scn)
    load = _rate_factor(scn) * beta.sum(axis=1)
    chi = 1.0 - float(load.max())
    r = scn.rate_target
    rho = float(np.expm1(r.max()) / np.expm1(r.min()))
    return chi, rho


def check_uniqueness(scn: Scenario) -> bool:
    """Full uniqueness certificate (existence plus P-property of the
    amplified comparison matrix)."""
    ok, pbar = check_existence(scn)
    if not ok:
        return False
    amp = crosstalk_amplification(scn, pbar)
    return is_p_matrix_z(uniqueness_matrix(scn, amp))


def check_uniqueness_strict(scn: Scenario) -> bool:
    """Stronger-hypothesis uniqueness test using only closed-form scalars.

    Requires positive interference slack chi (fails otherwise); with no
    crosstalk at all (e.g. a single user) it passes vacuously.  For each
    user q the crosstalk ratios, noise-variance spreads, and rho/chi
    surcharge must stay below e^{-2 target_q}.
    """
    beta = max_crosstalk_ratio(scn)
    if not beta.any():
        return True                                    # no crosstalk at all
    # With crosstalk present, chi < 1 holds mathematically; rounding may
    # still return exactly 1.0 for vanishing interference loads.
    chi, rho = interference_slack(scn)
    if chi <= 0.0:
        return False

    # S[q, r] = max_k noise[r, k] / noise[q, k]
    spread = (scn.noise[None, :, :] / scn.noise[:, None, :]).max(axis=2)
    worst_spread = spread.max(axis=1)                  # over all users r'
    surcharge = rho / chi - 1.0
    lhs = (beta * (spread + worst_spread[:, None] * surcharge)).sum(axis=1)
    return bool(np.all(lhs < np.exp(-2.0 * scn.rate_target)))


# ---------------------------------------------------------------------------
# spectral radius and contraction factors
# ---------------------------------------------------------------------------

def spectral_radius(m, tol: float = 1e-12, max_iter: int = 10000) -> float:
    """Spectral radius of an elementwise-nonnegative matrix.

    Power iteration with a deterministic all-ones start on the matrix
    shifted by the identity; the shift keeps the dominant root simple for
    periodic/reducible matrices (spectral radius of A + I is rho(A) + 1 for
    nonnegative A) and is subtracted exactly at the end.
    """
    a = _as_square(m)
    if a.size == 0:
        return 0.0
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if np.any(a < 0.0):
        raise ValueError("matrix must be elementwise nonnegative")
    if not a.any():
        return 0.0

    # Zero spectral radius means nilpotent; for nonnegative matrices that is
    # exactly "the all-ones vector dies within n applications", which the
    # shifted iteration below would only resolve to ~1/max_iter.
    probe = np.ones(a.shape[0])
    for _ in range(a.shape[0]):
        probe = a @ probe
        if not probe.any():
            return 0.0

    shifted = a + np.eye(a.shape[0])
    x = np.ones(a.shape[0])
    estimate = np.inf
    for _ in range(max_iter):
        y = shifted @ x
        new_estimate = float(y.max())                 # sup norm; x is sup-normalized
        x = y / new_estimate
        if abs(new_estimate - estimate) <= tol * max(1.0, new_estimate):
            estimate = new_estimate
            break
        estimate = new_estimate
    return max(estimate - 1.0, 0.0)


def _contraction_from_amplification(scn: Scenario, amp: np.ndarray) -> tuple[float, float]:
    grow = np.exp(scn.rate_target)
    b = grow[:, None] * amp                            # nonnegative off-diagonal part
    np.fill_diagonal(b, 1.0 / grow)
    d = np.diagonal(b).copy()

    off = b.copy()
    np.fill_diagonal(off, 0.0)
    rho_sim = spectral_radius(off / d[:, None])

    # One Gauss-Seidel error sweep: invert the diagonal minus the strictly
    # lower part of b (a triangular M-matrix, so the inverse is nonnegative)
    # against the strictly upper part.
    lower = np.diag(d) - np.tril(b, -1)
    upper = np.triu(b, 1)
    sweep = np.linalg.solve(lower, upper)
    sweep[sweep < 0.0] = 0.0                           # rounding only; exact result is >= 0
    rho_seq = spectral_radius(sweep)
    return rho_sim, rho_seq


def contraction_factors(scn: Scenario) -> tuple[float, float]:
    """Spectral contraction factors of the two iterative schemes.

    The first factor governs the simultaneous (Jacobi) update, the second
    the sequential (Gauss-Seidel) update; both are < 1 exactly when the
    uniqueness comparison matrix is a P-matrix.  Requires the existence
    certificate (the amplified ratios need the power bound).
    """
    ok, pbar = check_existence(scn)
    if not ok:
        raise CertificateError(
            "existence certificate failed; contraction factors undefined")
    amp = crosstalk_amplification(scn, pbar)
    return _contraction_from_amplification(scn, amp)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

@dataclass
class DiagnosticsReport:
    """Outcome of every certificate on one scenario.

    Array fields are populated only when the certificate providing them
    passed; contraction factors require the existence certificate.
    """

    zk_all_p: bool
    zmax_p: bool
    dd_existence: bool
    pbar: np.ndarray | None
    pbar_zmax: np.ndarray | None
    bbar_p: bool
    chi: float
    rho: float
    gamma: float
    cor3_uniqueness: bool
    contraction_simultaneous: float | None
    contraction_sequential: float | None

    def to_json_dict(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "zk_all_p": self.zk_all_p,
            "zmax_p": self.zmax_p,
            "dd_existence": self.dd_existence,
            "pbar": arr(self.pbar),
            "pbar_zmax": arr(self.pbar_zmax),
            "bbar_p": self.bbar_p,
            "chi": self.chi,
            "rho": self.rho,
            "gamma": self.gamma,
            "cor3_uniqueness": self.cor3_uniqueness,
            "contraction_simultaneous": self.contraction_simultaneous,
            "contraction_sequential": self.contraction_sequential,
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=1)
            f.write("\n")


def diagnose(scn: Scenario) -> DiagnosticsReport:
    """Run every certificate and bound on one scenario."""
    zk_all_p, pbar = check_existence(scn)
    zmax_p, pbar_zmax = check_existence_worst_case(scn)
    dd = check_existence_diagonal_dominance(scn)
    chi, rho = interference_slack(scn)

    decay = np.exp(-scn.rate_target)
    margin = float((decay - decay ** 2).max())
    gamma = margin / (rho + margin)

    if zk_all_p:
        amp = crosstalk_amplification(scn, pbar)
        bbar_p = is_p_matrix_z(uniqueness_matrix(scn, amp))
        rho_sim, rho_seq = _contraction_from_amplification(scn, amp)
    else:
        bbar_p = False
        rho_sim = rho_seq = None

    return DiagnosticsReport(
        zk_all_p=zk_all_p,
        zmax_p=zmax_p,
        dd_existence=dd,
        pbar=pbar,
        pbar_zmax=pbar_zmax,
        bbar_p=bbar_p,
        chi=chi,
        rho=rho,
        gamma=gamma,
        cor3_uniqueness=check_uniqueness_strict(scn),
        contraction_simultaneous=rho_sim,
        contraction_sequential=rho_seq,
    )
