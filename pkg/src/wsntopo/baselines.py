"""Comparison topology constructors: KNN, DTG, LEACH composites, and BA.

All spatial constructors consume a :class:`~wsntopo.geometry.Deployment`;
the preferential-attachment generator :func:`ba_graph` is non-spatial and
serves as the reference degree-distribution curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .errors import ConfigError, ElectionError
from .geometry import Deployment, neighbor_lists
from .graph import Graph
from .rng import rand_below, sample_indices, substream

__all__ = [
    "knn_topology",
    "dtg_topology",
    "ClusterAssignment",
    "leach_cluster",
    "leach_composite",
    "cluster_subtopology",
    "ba_graph",
]

ELECTION_ATTEMPTS = 100


def knn_topology(dep: Deployment, k: int) -> Graph:
    """Directed graph: each node links its k nearest in-range nodes.

    Nodes with fewer than k in-range neighbors link all of them.  Distance
    ties break toward the lower node id.  Use :meth:`Graph.undirected` for
    the symmetric union view.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    nbrs = neighbor_lists(dep)
    pos = dep.positions
    out: list[list[int]] = []
    for v in range(dep.n):
        cand = nbrs[v]
        if cand.size > k:
            d2 = np.sum((pos[cand] - pos[v]) ** 2, axis=1)
            order = np.lexsort((cand, d2))  # distance first, id breaks ties
            cand = cand[order[:k]]
        out.append(sorted(int(u) for u in cand))
    return Graph.from_out_neighbors(out)


def _knn_out_links(dep: Deployment, members: np.ndarray, k: int) -> dict[int, list[int]]:
    """Per-member out-links: k nearest in-range nodes within ``members``."""
    pos = dep.positions
    member_set = set(int(v) for v in members)
    nbrs = neighbor_lists(dep)
    out: dict[int, list[int]] = {}
    for v in members:
        v = int(v)
        cand = np.array([u for u in nbrs[v] if int(u) in member_set], dtype=np.int64)
        if cand.size > k:
            d2 = np.sum((pos[cand] - pos[v]) ** 2, axis=1)
            order = np.lexsort((cand, d2))
            cand = cand[order[:k]]
        out[v] = sorted(int(u) for u in cand)
    return out


def _delaunay_edges(points: np.ndarray, ids: np.ndarray) -> set[tuple[int, int]]:
    tri = Delaunay(points)
    edges: set[tuple[int, int]] = set()
    for simplex in tri.simplices:
        for i in range(3):
            a, b = int(ids[simplex[i]]), int(ids[simplex[(i + 1) % 3]])
            edges.add((min(a, b), max(a, b)))
    return edges


def _collinear_path(points: np.ndarray, ids: np.ndarray) -> set[tuple[int, int]]:
    # degenerate triangulation: consecutive points along the line
    order = np.lexsort((points[:, 1], points[:, 0]))
    edges = set()
    for i in range(len(order) - 1):
        a, b = int(ids[order[i]]), int(ids[order[i + 1]])
        edges.add((min(a, b), max(a, b)))
    return edges


def _dtg_edges(dep: Deployment, members: np.ndarray) -> list[tuple[int, int]]:
    pts = dep.positions[members]
    if members.size < 2:
        return []
    if members.size == 2:
        edges = {(int(min(members)), int(max(members)))}
    else:
        try:
            edges = _delaunay_edges(pts, members)
        except QhullError:
            edges = _collinear_path(pts, members)
    r2 = dep.config.r ** 2
    pos = dep.positions
    kept = [
        (u, v)
        for u, v in edges
        if np.sum((pos[u] - pos[v]) ** 2) <= r2  # radios cannot realize longer links
    ]
    return sorted(kept)


def dtg_topology(dep: Deployment) -> Graph:
    """Delaunay triangulation edges, restricted to realizable length <= r.

    An all-collinear deployment degenerates to the path of in-range
    consecutive points.
    """
    members = np.arange(dep.n, dtype=np.int64)
    return Graph.from_edges(dep.n, _dtg_edges(dep, members), directed=False)


@dataclass(frozen=True)
class ClusterAssignment:
    """Single-round head election result.

    ``cluster_of[v]`` is the id of v's head (v itself for heads).  Members
    whose nearest head sits beyond the transmission range are still assigned
    to it, but flagged in ``over_range_members``.
    """

    heads: tuple[int, ...]
    cluster_of: np.ndarray
    over_range_members: tuple[int, ...] = ()

    def members_of(self, head: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_of == head)


def leach_cluster(
    dep: Deployment, p_head: float, gen: np.random.Generator
) -> ClusterAssignment:
    """One election round: each non-sink node turns head with prob p_head.

    Draw discipline: one ``gen.random()`` per non-sink node in increasing id
    order.  Non-heads (the sink included) join the nearest head, id breaking
    ties; joins longer than r are flagged, not refused, since a cluster
    member unable to reach any head would otherwise sit isolated.  A
    zero-head election is redrawn up to a bounded number of times.
    """
    if not (0 < p_head < 1):
        raise ConfigError(f"p_head must lie in (0, 1), got {p_head}")
    for _ in range(ELECTION_ATTEMPTS):
        draws = np.array(
            [gen.random() < p_head if v != dep.sink else False for v in range(dep.n)]
        )
        heads = np.flatnonzero(draws)
        if heads.size:
            break
    else:
        raise ElectionError(f"no heads elected in {ELECTION_ATTEMPTS} rounds")

    pos = dep.positions
    r2 = dep.config.r ** 2
    cluster_of = np.arange(dep.n, dtype=np.int64)
    over_range = []
    for v in range(dep.n):
        if draws[v]:
            continue
        d2 = np.sum((pos[heads] - pos[v]) ** 2, axis=1)
        order = np.lexsort((heads, d2))
        nearest = int(heads[order[0]])
        cluster_of[v] = nearest
        if d2[order[0]] > r2:
            over_range.append(v)
    return ClusterAssignment(
        heads=tuple(int(h) for h in heads),
        cluster_of=cluster_of,
        over_range_members=tuple(over_range),
    )


def cluster_subtopology(
    dep: Deployment, members: np.ndarray, intra: str, knn_k: int = 6
) -> list[tuple[int, int]]:
    """Intra-cluster undirected edges by the chosen constructor."""
    members = np.asarray(members, dtype=np.int64)
    if intra == "knn":
        out = _knn_out_links(dep, members, knn_k)
        return sorted({(min(v, u), max(v, u)) for v, us in out.items() for u in us})
    if intra == "dtg":
        return _dtg_edges(dep, members)
    raise ConfigError(f"unknown intra-cluster constructor {intra!r}")


def _head_backbone(
    dep: Deployment, heads: tuple[int, ...]
) -> tuple[list[tuple[int, int]], list[list[int]]]:
    """One uplink per head: to the sink when in range, else to the nearest
    head strictly closer to the sink (the closest head falls back to a direct
    sink link).  Links longer than r are flagged: they violate the disk model
    and exist only to keep the hierarchy rooted."""
    pos = dep.positions
    r2 = dep.config.r ** 2
    sink_d2 = np.sum((pos[list(heads)] - pos[dep.sink]) ** 2, axis=1)
    links: list[tuple[int, int]] = []
    over_range: list[list[int]] = []
    for i, head in enumerate(heads):
        if sink_d2[i] <= r2:
            link = (min(head, dep.sink), max(head, dep.sink))
        else:
            closer = [
                (float(np.sum((pos[heads[j]] - pos[head]) ** 2)), heads[j])
                for j in range(len(heads))
                if sink_d2[j] < sink_d2[i]
            ]
            if closer:
                closer.sort()
                d2_target, target = closer[0]
                link = (min(head, target), max(head, target))
                if d2_target > r2:
                    over_range.append(list(link))
            else:
                link = (min(head, dep.sink), max(head, dep.sink))
                over_range.append(list(link))
        links.append(link)
    return links, over_range


def leach_composite(
    dep: Deployment,
    p_head: float,
    intra: str,
    gen: np.random.Generator,
    knn_k: int = 6,
) -> tuple[Graph, dict]:
    """Clustered topology: per-cluster construction plus a head backbone.

    The returned graph is the undirected union of intra-cluster edges and
    backbone uplinks.  For the KNN flavor the report also carries
    ``knn_out_degrees`` -- per-node out-link counts of the directed
    intra-cluster view, which is the degree semantics the comparison table
    uses (a node's out-degree is capped at k, so max equals k and min equals
    the smallest in-range cluster neighborhood).
    """
    assignment = leach_cluster(dep, p_head, gen)
    edges: set[tuple[int, int]] = set()
    knn_out_degrees: list[int] | None = [0] * dep.n if intra == "knn" else None
    for head in assignment.heads:
        members = assignment.members_of(head)
        if intra == "knn":
            out = _knn_out_links(dep, members, knn_k)
            for v, us in out.items():
                knn_out_degrees[v] = len(us)
                for u in us:
                    edges.add((min(v, u), max(v, u)))
        else:
            for e in cluster_subtopology(dep, members, intra, knn_k):
                edges.add(e)

    backbone, over_range = _head_backbone(dep, assignment.heads)
    edges.update(backbone)
    graph = Graph.from_edges(dep.n, sorted(edges), directed=False)
    report = {
        "heads": list(assignment.heads),
        "over_range_members": list(assignment.over_range_members),
        "over_range_backbone": sorted(over_range),
    }
    if knn_out_degrees is not None:
        report["knn_out_degrees"] = knn_out_degrees
    return graph, report


def ba_graph(n: int, m0: int, m: int, seed: int) -> Graph:
    """Preferential-attachment graph: new nodes link m existing ones with
    probability proportional to degree.

    Non-spatial.  Draw discipline: one stream ``substream(seed, "ba")``;
    the first newcomer picks its m targets uniformly among the m0 seed nodes
    (``sample_indices``); later newcomers rejection-sample m distinct targets
    from the degree-weighted repeat list with ``rand_below``.
    """
    if not (1 <= m <= m0 < n):
        raise ConfigError(f"need 1 <= m <= m0 < n, got m={m}, m0={m0}, n={n}")
    gen = substream(seed, "ba")
    edges: list[tuple[int, int]] = []
    repeated: list[int] = []
    for source in range(m0, n):
        if not repeated:
            targets = sample_indices(gen, m0, m)
        else:
            chosen: list[int] = []
            seen = set()
            while len(chosen) < m:
                cand = repeated[rand_below(gen, len(repeated))]
                if cand not in seen:
                    seen.add(cand)
                    chosen.append(cand)
            targets = chosen
        for t in targets:
            edges.append((min(source, t), max(source, t)))
        repeated.extend(targets)
        repeated.extend([source] * m)
    return Graph.from_edges(n, edges, directed=False)
