"""Multicell geometry and frequency-selective Rayleigh channel generation.

The reference layout is a seven-cell hexagonal downlink: one base station
per cell center, one mobile terminal per cell.  A proximity parameter in
[0, 1) moves each terminal toward its own base station; larger proximity
means a shorter direct link and therefore weaker relative intercell
interference.  Channels are multipath Rayleigh: i.i.d. complex Gaussian
taps per link whose total power follows distance^-gamma, converted to
per-subchannel power gains through a DFT.

All randomness flows through numpy SeedSequence streams keyed by
(seed, receiver, transmitter[, attempt]), so per-link draws are independent
of generation order and safe to parallelize.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .model import LN2, Scenario

__all__ = [
    "NetworkGeometry",
    "hex_network",
    "rayleigh_gains",
    "scenario_from_geometry",
    "geometry_to_csv",
]


@dataclass(frozen=True)
class NetworkGeometry:
    """Transmitter/receiver positions with the pairwise distance matrix.

    distance[q, r] is the distance from transmitter r to receiver q (not
    symmetric in general: transmitter and receiver roles differ).
    """

    tx_positions: np.ndarray   # (Q, 2)
    rx_positions: np.ndarray   # (Q, 2)
    distance: np.ndarray       # (Q, Q), positive
    gamma: float               # path-loss exponent

    def __post_init__(self):
        tx = np.array(self.tx_positions, dtype=float)
        rx = np.array(self.rx_positions, dtype=float)
        d = np.array(self.distance, dtype=float)
        q = tx.shape[0]
        if tx.shape != (q, 2) or rx.shape != (q, 2):
            raise ValueError("positions must have shape (Q, 2)")
        if d.shape != (q, q):
            raise ValueError("distance matrix must have shape (Q, Q)")
        if np.any(d <= 0):
            raise ValueError("all pairwise distances must be positive")
        for arr in (tx, rx, d):
            arr.setflags(write=False)
        object.__setattr__(self, "tx_positions", tx)
        object.__setattr__(self, "rx_positions", rx)
        object.__setattr__(self, "distance", d)

    @property
    def num_links(self) -> int:
        return self.tx_positions.shape[0]


def hex_network(proximity: float, seed: int, cell_radius: float = 1.0,
                gamma: float = 2.5) -> NetworkGeometry:
    """Seven-cell hexagonal downlink layout.

    Base stations sit at the centers of a center cell and its six
    neighbors (center spacing sqrt(3) * cell_radius).  Each mobile terminal
    is placed at distance (1 - proximity) * cell_radius from its own base
    station, at an angle drawn uniformly per cell from the seed.  The own
    link distance is computed from that rule directly, so it stays exact
    even when proximity is within rounding distance of 1.
    """
    if not 0.0 <= proximity < 1.0:
        raise ValueError("proximity must lie in [0, 1)")
    if cell_radius <= 0:
        raise ValueError("cell_radius must be positive")

    spacing = math.sqrt(3.0) * cell_radius
    centers = [(0.0, 0.0)]
    centers += [(spacing * math.cos(i * math.pi / 3.0),
                 spacing * math.sin(i * math.pi / 3.0)) for i in range(6)]
    bs = np.array(centers)

    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    angles = rng.uniform(0.0, 2.0 * math.pi, size=7)
    offset = (1.0 - proximity) * cell_radius
    mt = bs + offset * np.column_stack([np.cos(angles), np.sin(angles)])

    # distance[q, r]: transmitter r (BS of cell r) to receiver q (MT of cell q)
    diff = mt[:, None, :] - bs[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, offset)
    return NetworkGeometry(tx_positions=bs, rx_positions=mt,
                           distance=dist, gamma=gamma)


def _link_taps(rng: np.random.Generator, num_taps: int, link_power: float) -> np.ndarray:
    scale = math.sqrt(link_power / num_taps / 2.0)
    re = rng.standard_normal(num_taps)
    im = rng.standard_normal(num_taps)
    return scale * (re + 1j * im)


def rayleigh_gains(geom: NetworkGeometry, num_taps: int, num_subchannels: int,
                   seed: int) -> np.ndarray:
    """Per-subchannel power gains from multipath Rayleigh draws.

    Each link gets num_taps i.i.d. circularly-symmetric complex Gaussian
    taps with per-tap variance distance^-gamma / num_taps; the gain on
    subchannel k is the squared magnitude of the taps' DFT, so the expected
    per-subchannel gain equals distance^-gamma.  Direct links are redrawn in
    the measure-zero event of an exactly zero gain.
    """
    if num_taps < 1:
        raise ValueError("num_taps must be >= 1")
    if num_subchannels < num_taps:
        raise ValueError("num_subchannels must be >= num_taps")

    q = geom.num_links
    gains = np.empty((q, q, num_subchannels))
    for rx in range(q):
        for tx in range(q):
            link_power = geom.distance[rx, tx] ** (-geom.gamma)
            for attempt in range(16):
                key = [int(seed), rx, tx] + ([attempt] if attempt else [])
                rng = np.random.default_rng(np.random.SeedSequence(key))
                taps = _link_taps(rng, num_taps, link_power)
                freq = np.fft.fft(taps, n=num_subchannels)
                g = np.abs(freq) ** 2
                if rx != tx or np.all(g > 0.0):
                    break
            gains[rx, tx, :] = g
    return gains


def scenario_from_geometry(geom: NetworkGeometry, num_taps: int,
                           num_subchannels: int, seed: int,
                           rate_bits_per_subchannel: float = 1.0,
                           noise_power: float = 1.0) -> Scenario:
    """Generate a full problem instance from a layout.

    The per-user rate target is rate_bits_per_subchannel summed over all
    subchannels, converted to nats; noise is flat across users and
    subchannels.
    """
    if rate_bits_per_subchannel <= 0:
        raise ValueError("rate_bits_per_subchannel must be positive")
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    gains = rayleigh_gains(geom, num_taps, num_subchannels, seed)
    q = geom.num_links
    noise = np.full((q, num_subchannels), float(noise_power))
    target = np.full(q, rate_bits_per_subchannel * num_subchannels * LN2)
    return Scenario(gain=gains, noise=noise, rate_target=target)


def geometry_to_csv(geom: NetworkGeometry, path) -> None:
    """One row per link: link, tx_x, tx_y, rx_x, rx_y (12 significant digits)."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["link", "tx_x", "tx_y", "rx_x", "rx_y"])
        for q in range(geom.num_links):
            w.writerow([
                q,
                f"{geom.tx_positions[q, 0]:.12g}",
                f"{geom.tx_positions[q, 1]:.12g}",
                f"{geom.rx_positions[q, 0]:.12g}",
                f"{geom.rx_positions[q, 1]:.12g}",
            ])
