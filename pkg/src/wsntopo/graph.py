"""Adjacency-list graph over integer node ids, plus its JSON form.

Undirected graphs keep a symmetric adjacency; directed graphs (only the raw
k-nearest-neighbor out-link view) keep out-neighbors per node.  Edge lists
are always emitted sorted -- lower id first inside an undirected pair, then
lexicographically -- so serialized graphs are stable golden-file material.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = ["Graph"]


@dataclass(frozen=True)
class Graph:
    node_count: int
    adjacency: tuple[tuple[int, ...], ...]
    directed: bool = False

    @staticmethod
    def from_edges(node_count: int, edges, directed: bool = False) -> "Graph":
        """Build a graph from (u, v) pairs, validating ids and duplicates."""
        adj: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ConfigError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ConfigError(f"edge ({u}, {v}) outside 0..{node_count - 1}")
            adj[u].add(v)
            if not directed:
                adj[v].add(u)
        return Graph(
            node_count=node_count,
            adjacency=tuple(tuple(sorted(s)) for s in adj),
            directed=directed,
        )

    @staticmethod
    def from_out_neighbors(out_neighbors) -> "Graph":
        """Directed graph from per-node out-neighbor id lists."""
        n = len(out_neighbors)
        edges = [(u, v) for u in range(n) for v in out_neighbors[u]]
        return Graph.from_edges(n, edges, directed=True)

    def degrees(self) -> np.ndarray:
        """Per-node degree (out-degree for directed graphs)."""
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def edge_count(self) -> int:
        total = sum(len(a) for a in self.adjacency)
        return total if self.directed else total // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def edge_list(self) -> list[tuple[int, int]]:
        """Sorted edge list; undirected pairs are (min, max)."""
        if self.directed:
            out = [(u, v) for u in range(self.node_count) for v in self.adjacency[u]]
        else:
            out = [
                (u, v)
                for u in range(self.node_count)
                for v in self.adjacency[u]
                if u < v
            ]
        out.sort()
        return out

    def undirected(self) -> "Graph":
        """Union view: edge if either endpoint links the other."""
        if not self.directed:
            return self
        return Graph.from_edges(self.node_count, self.edge_list(), directed=False)

    def to_json_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "directed": self.directed,
            "edges": [[u, v] for u, v in self.edge_list()],
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "Graph":
        try:
            return Graph.from_edges(
                int(doc["node_count"]),
                [(int(u), int(v)) for u, v in doc["edges"]],
                directed=bool(doc.get("directed", False)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed graph document: {exc}") from exc
