"""Node deployment on a square region and transmission-range geometry.

Nodes live in [0, side]^2, node 0 is the sink at a fixed position, and two
nodes are potential neighbors when their Euclidean distance is at most the
transmission range r (closed disk: distance exactly r counts).  Radius
queries run over a uniform grid index with cell size r; results are exactly
the brute-force ones because membership is decided by the same
``dx*dx + dy*dy <= r*r`` comparison.

Draw discipline of :func:`deploy` (see :mod:`wsntopo.rng`): one stream
``substream(seed, "deploy")``; positions for nodes 1..n-1 are
``gen.random((n - 1, 2)) * side`` in row-major order, then energies for
nodes 0..n-1 are ``lo + gen.random(n) * (hi - lo)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NodeLookupError
from .graph import Graph
from .rng import substream

__all__ = [
    "DeploymentConfig",
    "Deployment",
    "deploy",
    "potential_neighbors",
    "neighbor_lists",
    "udg_graph",
    "neighbor_count_pmf",
    "deployment_to_json_dict",
    "deployment_from_json_dict",
]


@dataclass(frozen=True)
class DeploymentConfig:
    """Region and radio parameters: n nodes, side x side meters, range r."""

    n: int
    side: float
    r: float
    sink_position: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"need at least 2 nodes, got {self.n}")
        if not self.side > 0:
            raise ConfigError(f"side must be positive, got {self.side}")
        if not (0 < self.r <= self.side):
            raise ConfigError(f"range must satisfy 0 < r <= side, got {self.r}")
        x, y = self.sink_position
        if not (0 <= x <= self.side and 0 <= y <= self.side):
            raise ConfigError(f"sink {self.sink_position} outside the region")

    @property
    def area(self) -> float:
        return self.side * self.side

    @property
    def coverage_fraction(self) -> float:
        """Probability that a uniform node lands inside one disk: pi r^2 / S."""
        return math.pi * self.r * self.r / self.area


@dataclass(frozen=True)
class Deployment:
    """Immutable node placement: positions, initial energies, sink id 0."""

    config: DeploymentConfig
    positions: np.ndarray  # shape (n, 2)
    energies: np.ndarray  # shape (n,), joules at construction time
    sink: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.config.n
        if self.positions.shape != (n, 2):
            raise ConfigError(f"positions shape {self.positions.shape} != ({n}, 2)")
        if self.energies.shape != (n,):
            raise ConfigError(f"energies shape {self.energies.shape} != ({n},)")
        if np.any(self.positions < 0) or np.any(self.positions > self.config.side):
            raise ConfigError("positions outside the region")
        sx, sy = self.config.sink_position
        if tuple(self.positions[self.sink]) != (sx, sy):
            raise ConfigError("sink position does not match the configuration")

    @property
    def n(self) -> int:
        return self.config.n


def deploy(
    cfg: DeploymentConfig, energy_lo: float, energy_hi: float, seed: int
) -> Deployment:
    """Scatter n nodes uniformly, sink pinned at its configured corner.

    Energies are i.i.d. uniform on [energy_lo, energy_hi]; degenerate
    bounds (lo == hi) are allowed.  Identical (cfg, seed) pairs yield
    bit-identical deployments.
    """
    if energy_lo > energy_hi:
        raise ConfigError(f"energy bounds inverted: {energy_lo} > {energy_hi}")
    if energy_lo < 0:
        raise ConfigError(f"energy must be non-negative, got {energy_lo}")
    gen = substream(seed, "deploy")
    positions = np.empty((cfg.n, 2), dtype=np.float64)
    positions[0] = cfg.sink_position
    positions[1:] = gen.random((cfg.n - 1, 2)) * cfg.side
    energies = energy_lo + gen.random(cfg.n) * (energy_hi - energy_lo)
    return Deployment(config=cfg, positions=positions, energies=energies)


def _grid_buckets(dep: Deployment) -> dict[tuple[int, int], np.ndarray]:
    cell = dep.config.r
    ix = np.floor(dep.positions[:, 0] / cell).astype(np.int64)
    iy = np.floor(dep.positions[:, 1] / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for v in range(dep.n):
        buckets.setdefault((int(ix[v]), int(iy[v])), []).append(v)
    return {k: np.array(ids, dtype=np.int64) for k, ids in buckets.items()}


def neighbor_lists(dep: Deployment) -> list[np.ndarray]:
    """Sorted in-range neighbor ids per node, cached on the deployment."""
    cached = dep._cache.get("neighbor_lists")
    if cached is not None:
        return cached
    buckets = _grid_buckets(dep)
    cell = dep.config.r
    r2 = dep.config.r * dep.config.r
    pos = dep.positions
    lists: list[np.ndarray] = []
    for v in range(dep.n):
        cx = int(pos[v, 0] // cell)
        cy = int(pos[v, 1] // cell)
        parts = [
            buckets[(bx, by)]
            for bx in (cx - 1, cx, cx + 1)
            for by in (cy - 1, cy, cy + 1)
            if (bx, by) in buckets
        ]
        cand = np.concatenate(parts)
        dx = pos[cand, 0] - pos[v, 0]
        dy = pos[cand, 1] - pos[v, 1]
        sel = cand[(dx * dx + dy * dy <= r2) & (cand != v)]
        sel.sort()
        lists.append(sel)
    dep._cache["neighbor_lists"] = lists
    return lists


def potential_neighbors(dep: Deployment, v: int) -> set[int]:
    """Ids discoverable from node v in one hop (distance <= r)."""
    if not (0 <= v < dep.n):
        raise NodeLookupError(f"node {v} outside 0..{dep.n - 1}")
    return {int(u) for u in neighbor_lists(dep)[v]}


def udg_graph(dep: Deployment) -> Graph:
    """Full in-range topology: edge (u, v) iff distance(u, v) <= r."""
    lists = neighbor_lists(dep)
    edges = [(v, int(u)) for v in range(dep.n) for u in lists[v] if v < u]
    return Graph.from_edges(dep.n, edges, directed=False)


def neighbor_count_pmf(cfg: DeploymentConfig, k: int, kind: str = "binomial") -> float:
    """Probability that one disk-sized subarea holds exactly k of n nodes.

    ``binomial`` is exact: C(n, k) phi^k (1 - phi)^(n - k) with
    phi = pi r^2 / S.  ``poisson`` is the large-n limit with mean n * phi.
    Evaluated in log space so large n stays finite.
    """
    if not (0 <= k <= cfg.n):
        raise ConfigError(f"k must lie in 0..{cfg.n}, got {k}")
    phi = cfg.coverage_fraction
    if kind == "binomial":
        if phi >= 1.0:
            return 1.0 if k == cfg.n else 0.0
        if phi == 0.0:
            return 1.0 if k == 0 else 0.0
        log_p = (
            math.lgamma(cfg.n + 1)
            - math.lgamma(k + 1)
            - math.lgamma(cfg.n - k + 1)
            + k * math.log(phi)
            + (cfg.n - k) * math.log1p(-phi)
        )
        return math.exp(log_p)
    if kind == "poisson":
        mean = cfg.n * phi
        if mean == 0.0:
            return 1.0 if k == 0 else 0.0
        return math.exp(k * math.log(mean) - mean - math.lgamma(k + 1))
    raise ConfigError(f"unknown pmf kind {kind!r}")


def deployment_to_json_dict(dep: Deployment) -> dict:
    return {
        "config": {
            "n": dep.config.n,
            "side": dep.config.side,
            "r": dep.config.r,
            "sink_position": list(dep.config.sink_position),
        },
        "positions": [[float(x), float(y)] for x, y in dep.positions],
        "energies": [float(e) for e in dep.energies],
        "sink": dep.sink,
    }


def deployment_from_json_dict(doc: dict) -> Deployment:
    try:
        cfg = DeploymentConfig(
            n=int(doc["config"]["n"]),
            side=float(doc["config"]["side"]),
            r=float(doc["config"]["r"]),
            sink_position=tuple(doc["config"]["sink_position"]),
        )
        return Deployment(
            config=cfg,
            positions=np.array(doc["positions"], dtype=np.float64),
            energies=np.array(doc["energies"], dtype=np.float64),
            sink=int(doc.get("sink", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed deployment document: {exc}") from exc
