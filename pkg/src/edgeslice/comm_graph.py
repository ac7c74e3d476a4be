"""Wireless communication graphs and their analytic bandwidth statistics.

Link bandwidth follows a Shannon-capacity model with inverse-square signal
decay, ``log2(1 + a / d**2)`` Mbps, calibrated so that a device 80 m from the
router sees 5.5 Mbps. Node-pair bandwidths apply the same law to the
displacement between the two nodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ModelFormatError

COMM_FORMAT = "edgeslice-comm/1"

WIFI_RANGE_M = 150.0
SIGNAL_CONSTANT = 283230.0
# smallest squared distance reachable inside the position domain
MIN_SQUARED_DISTANCE = 2.0


def distance_bandwidth(d, a: float = SIGNAL_CONSTANT, wifi_range: float = WIFI_RANGE_M):
    """Bandwidth in Mbps of a device ``d`` metres from the router, ``d`` in (1, B)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 1) or np.any(d >= wifi_range):
        raise DomainError(f"distance must lie in (1, {wifi_range:g}) m")
    out = np.log2(1.0 + a / d**2)
    return float(out) if out.ndim == 0 else out


def bandwidth_at(x, y, a: float = SIGNAL_CONSTANT, wifi_range: float = WIFI_RANGE_M, check_domain: bool = True):
    """Bandwidth in Mbps at position ``(x, y)`` relative to the router."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if check_domain:
        for c in (x, y):
            if np.any(np.abs(c) <= 1) or np.any(np.abs(c) >= wifi_range):
                raise DomainError(f"coordinates must lie in (-{wifi_range:g}, -1) U (1, {wifi_range:g})")
    out = np.log2(1.0 + a / (x**2 + y**2))
    return float(out) if out.ndim == 0 else out


def sample_positions(rng: np.random.Generator, size, wifi_range: float = WIFI_RANGE_M) -> np.ndarray:
    """Uniform draws on (-B, -1) U (1, B)."""
    mag = rng.uniform(1.0, wifi_range, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return mag * sign


def pairwise_bandwidth(positions: np.ndarray, a: float = SIGNAL_CONSTANT) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = np.maximum((diff**2).sum(axis=-1), MIN_SQUARED_DISTANCE)
    bw = np.log2(1.0 + a / d2)
    np.fill_diagonal(bw, 0.0)
    return bw


@dataclass
class CommGraph:
    """Complete weighted graph of compute nodes; node ids are ``0 .. n-1``."""

    positions: np.ndarray
    bandwidth: np.ndarray
    wifi_range: float = WIFI_RANGE_M
    signal_constant: float = SIGNAL_CONSTANT
    shape: str = "rgg"
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_positions(cls, positions, a=SIGNAL_CONSTANT, wifi_range=WIFI_RANGE_M, shape="rgg", **meta):
        positions = np.asarray(positions, dtype=float)
        return cls(positions, pairwise_bandwidth(positions, a), wifi_range, a, shape, dict(meta))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def nodes(self) -> range:
        return range(self.n)

    def edges(self) -> list[tuple[int, int, float]]:
        iu, ju = np.triu_indices(self.n, 1)
        return [(int(i), int(j), float(self.bandwidth[i, j])) for i, j in zip(iu, ju)]

    def edge_weights(self) -> np.ndarray:
        return self.bandwidth[np.triu_indices(self.n, 1)]

    @property
    def max_bandwidth(self) -> float:
        return float(self.edge_weights().max())

    def to_dict(self) -> dict:
        return {
            "format": COMM_FORMAT,
            "shape": self.shape,
            "wifi_range_m": self.wifi_range,
            "signal_constant": self.signal_constant,
            "meta": self.meta,
            "positions": self.positions.tolist(),
            "bandwidth_mbps": self.bandwidth.tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> "CommGraph":
        if not isinstance(data, dict) or data.get("format") != COMM_FORMAT:
            raise ModelFormatError(f"not an {COMM_FORMAT} file")
        try:
            pos = np.asarray(data["positions"], dtype=float)
            bw = np.asarray(data["bandwidth_mbps"], dtype=float)
            g = cls(pos, bw, float(data["wifi_range_m"]), float(data["signal_constant"]),
                    str(data.get("shape", "rgg")), dict(data.get("meta", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"malformed comm graph: {exc!r}") from exc
        if pos.ndim != 2 or pos.shape[1] != 2 or bw.shape != (len(pos), len(pos)):
            raise ModelFormatError("positions must be n x 2 and bandwidths n x n")
        if not np.allclose(bw, bw.T) or np.any(bw[~np.eye(len(pos), dtype=bool)] <= 0):
            raise ModelFormatError("bandwidth matrix must be symmetric and positive off the diagonal")
        return g

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "CommGraph":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


def generate_rgg(n: int, seed, wifi_range: float = WIFI_RANGE_M, a: float = SIGNAL_CONSTANT) -> CommGraph:
    """Random geometric complete graph with ``n`` uniformly placed nodes."""
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = np.random.default_rng(seed)
    pos = sample_positions(rng, (n, 2), wifi_range)
    return CommGraph.from_positions(pos, a, wifi_range, shape="rgg")


def grid_dims(n: int) -> tuple[int, int]:
    rows = max(r for r in range(1, int(math.isqrt(n)) + 1) if n % r == 0)
    return rows, n // rows


def generate_shape(shape: str, n: int, spacing: float = 30.0, seed=0, rows: int | None = None) -> CommGraph:
    """Structured layouts.

    ``ring``: ``n`` points evenly spaced on a circle of radius ``spacing``.
    ``grid``: ``rows x cols`` lattice with pitch ``spacing`` (``rows`` defaults
    to the largest divisor of ``n`` not above its square root, so 5 -> 1x5).
    ``cluster``: two Gaussian blobs of ``ceil(n/2)`` and ``floor(n/2)`` nodes with
    standard deviation ``spacing`` and centres ``10 * spacing`` apart.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if shape == "ring":
        ang = 2 * np.pi * np.arange(n) / n
        pos = spacing * np.column_stack([np.cos(ang), np.sin(ang)])
        meta = {"radius": spacing}
    elif shape == "grid":
        if rows is None:
            rows, cols = grid_dims(n)
        else:
            cols = math.ceil(n / rows)
        idx = np.arange(n)
        pos = spacing * np.column_stack([idx % cols, idx // cols]).astype(float)
        pos -= pos.mean(axis=0)
        meta = {"rows": rows, "cols": cols}
    elif shape == "cluster":
        rng = np.random.default_rng(seed)
        n_a = (n + 1) // 2
        centres = np.array([[-5 * spacing, 0.0], [5 * spacing, 0.0]])
        pos = np.vstack([
            centres[0] + spacing * rng.standard_normal((n_a, 2)),
            centres[1] + spacing * rng.standard_normal((n - n_a, 2)),
        ])
        meta = {"sigma": spacing, "seed": seed}
    else:
        raise ValueError(f"unknown shape {shape!r}")
    return CommGraph.from_positions(pos, shape=shape, spacing=spacing, **meta)


# ---------------------------------------------------------------------------
# analytic statistics


@dataclass(frozen=True)
class RggStatistics:
    mean_mu: float
    stddev_sigma: float
    cv: float
    cluster_coefficient: float
    threshold_distance: float
    threshold_radius: float
    mean_degree: dict
    largest_cluster_fraction: dict


def bandwidth_moments_quadrature(resolution: int = 2000, wifi_range=WIFI_RANGE_M, a=SIGNAL_CONSTANT) -> tuple[float, float]:
    """Mean and standard deviation of r(X, Y) for uniform positions, midpoint rule.

    The integrand is even in x and y, so the four quadrants contribute equally
    and one quadrant ``(1, B)^2`` with density ``1 / (B - 1)^2`` suffices.
    """
    if resolution < 1000:
        raise ValueError("resolution must be at least 1000 cells per axis")
    h = (wifi_range - 1.0) / resolution
    mid = 1.0 + h * (np.arange(resolution) + 0.5)
    sq = mid**2
    m1 = m2 = 0.0
    # row blocks keep memory bounded
    for lo in range(0, resolution, 500):
        r = np.log2(1.0 + a / (sq[lo:lo + 500, None] + sq[None, :]))
        m1 += r.sum()
        m2 += (r * r).sum()
    w = 1.0 / resolution**2
    mu = m1 * w
    return mu, math.sqrt(m2 * w - mu * mu)


def bandwidth_moments_monte_carlo(samples: int = 10**6, seed=0, wifi_range=WIFI_RANGE_M, a=SIGNAL_CONSTANT) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    x = sample_positions(rng, samples, wifi_range)
    y = sample_positions(rng, samples, wifi_range)
    r = bandwidth_at(x, y, a, wifi_range, check_domain=False)
    return float(r.mean()), float(r.std())


def threshold_distance(mu: float, a: float = SIGNAL_CONSTANT) -> float:
    """Distance from the router at which the bandwidth equals ``mu``."""
    return math.sqrt(a / (2.0**mu - 1.0))


def mean_degree(n: int, r: float, d: int = 2) -> float:
    ball = math.pi ** (d / 2) * r**d / math.gamma((d + 2) / 2)
    return n * 2**d * ball


def largest_cluster_fraction(alpha: float, n_terms: int) -> float:
    n = np.arange(1, n_terms + 1, dtype=float)
    log_terms = (n - 1) * np.log(n) - gammaln(n + 1) + n * (math.log(alpha) - alpha)
    return float(1.0 - np.exp(log_terms).sum() / alpha)


def cluster_coefficient(d: int = 2) -> float:
    h = sum(
        math.gamma(i) / math.gamma(i + 0.5) * 0.75 ** (i + 0.5)
        for i in range(1, d // 2 + 1)
    ) / math.sqrt(math.pi)
    return 1.0 - h


def analytic_rgg_statistics(
    resolution: int = 2000,
    node_counts=(10, 50),
    method: str = "quadrature",
    samples: int = 10**6,
    seed=0,
    wifi_range=WIFI_RANGE_M,
    a=SIGNAL_CONSTANT,
) -> RggStatistics:
    if method == "quadrature":
        mu, sigma = bandwidth_moments_quadrature(resolution, wifi_range, a)
    elif method == "monte_carlo":
        if samples < 10**6:
            raise ValueError("need at least 10^6 samples")
        mu, sigma = bandwidth_moments_monte_carlo(samples, seed, wifi_range, a)
    else:
        raise ValueError(f"unknown method {method!r}")
    dist = threshold_distance(mu, a)
    r = dist / wifi_range
    degrees = {n: mean_degree(n, r) for n in node_counts}
    fractions = {n: largest_cluster_fraction(degrees[n], n) for n in node_counts}
    return RggStatistics(
        mean_mu=mu,
        stddev_sigma=sigma,
        cv=sigma / mu,
        cluster_coefficient=cluster_coefficient(2),
        threshold_distance=dist,
        threshold_radius=r,
        mean_degree=degrees,
        largest_cluster_fraction=fractions,
    )
