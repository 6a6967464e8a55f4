"""Two-phase scale-free topology evolution for sensor deployments.

Phase one is the deployment itself (see :mod:`wsntopo.geometry`).  Phase two
grows the topology outward from the sink:

1. seed it with the sink plus ``m0 - 1`` of its in-range neighbors and
   ``e0`` random in-range links between them (redrawn until connected);
2. repeatedly pick the in-topology node with the most scattered in-range
   neighbors, pick one of those scattered neighbors uniformly as the newcomer;
3. link the newcomer to up to ``m`` of its in-topology in-range neighbors by
   energy-and-degree preferential attachment: mass ``f(E_i) * k_i``, nodes at
   the degree cap ``k_max`` excluded, every candidate linked when there are
   at most ``m`` of them, and otherwise ``m`` independent preferential picks
   whose repeats collapse into single links;
4. stop when nothing scattered can be attached any more; leftovers (nodes in
   radio islands the seed can't reach, or walled off behind saturated
   neighbors) are reported, not errors.

Draw discipline per :mod:`wsntopo.rng`, one stream ``substream(seed,
"evolve")`` consumed in event order: seed-neighbor pick (``sample_indices``
over the sink's sorted neighbor list), then per connectivity attempt one
``sample_indices`` over the sorted feasible pair list, then per growth step
one ``rand_below`` tie-break over the sorted maximizer ids, one
``rand_below`` over the sorted scattered-neighbor ids, and (only when
candidates exceed ``m``) exactly ``m`` ``weighted_index`` draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GrowthExhausted, SeedTopologyError, StateError
from .geometry import Deployment, neighbor_lists
from .graph import Graph
from .rng import rand_below, sample_indices, substream, weighted_index

__all__ = [
    "LaeeParams",
    "EvolutionState",
    "EvolutionReport",
    "ENERGY_WEIGHT_FNS",
    "init_seed_topology",
    "select_growth_pair",
    "attachment_weights",
    "attach",
    "evolve",
]

SEED_LINK_ATTEMPTS = 100

# f(E): monotone increasing map from remaining energy to attachment appeal.
# Callables accept scalars or numpy arrays.
ENERGY_WEIGHT_FNS = {
    "identity": lambda e: e,
    "sqrt": np.sqrt,
}


@dataclass(frozen=True)
class LaeeParams:
    """Evolution knobs: seed size m0/e0, links per newcomer m, degree cap."""

    m0: int = 10
    e0: int = 10
    m: int = 3
    k_max: int = 30
    f_kind: str = "identity"

    def __post_init__(self):
        if self.m0 < 2:
            raise ConfigError(f"m0 must be >= 2, got {self.m0}")
        if not (1 <= self.e0 <= self.m0 * (self.m0 - 1) // 2):
            raise ConfigError(
                f"e0 must lie in 1..{self.m0 * (self.m0 - 1) // 2}, got {self.e0}"
            )
        if not (1 <= self.m <= self.m0):
            raise ConfigError(f"m must lie in 1..m0={self.m0}, got {self.m}")
        if self.m >= self.k_max:
            raise ConfigError(f"m={self.m} must be below k_max={self.k_max}")
        if self.f_kind not in ENERGY_WEIGHT_FNS:
            raise ConfigError(f"unknown f_kind {self.f_kind!r}")

    def energy_weight(self, energy: float) -> float:
        return ENERGY_WEIGHT_FNS[self.f_kind](energy)


@dataclass
class EvolutionState:
    """In-progress evolution: membership, degrees, saturation count q.

    ``frontier_counts[v]`` caches how many scattered in-range neighbors the
    in-topology node v still has; it is meaningless for scattered v.
    """

    in_topology: np.ndarray  # bool per node
    degrees: np.ndarray  # int64 per node
    q: int  # nodes currently at k_max
    edges: list[tuple[int, int]]
    t: int  # growth steps completed (newcomers attached)
    k_max: int
    f_kind: str = "identity"
    frontier_counts: np.ndarray = field(repr=False, default=None)
    join_order: list[int] = field(default_factory=list)
    steps: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)

    @property
    def scattered(self) -> np.ndarray:
        """Ids not yet attached to the topology."""
        return np.flatnonzero(~self.in_topology)

    @staticmethod
    def from_membership(
        dep: Deployment, members, edges, k_max: int, f_kind: str = "identity"
    ) -> "EvolutionState":
        """State with the given members and edges; caches frontier counts."""
        n = dep.n
        in_top = np.zeros(n, dtype=bool)
        in_top[list(members)] = True
        degrees = np.zeros(n, dtype=np.int64)
        for u, v in edges:
            degrees[u] += 1
            degrees[v] += 1
        nbrs = neighbor_lists(dep)
        counts = np.zeros(n, dtype=np.int64)
        for v in np.flatnonzero(in_top):
            counts[v] = int(np.count_nonzero(~in_top[nbrs[v]]))
        return EvolutionState(
            in_topology=in_top,
            degrees=degrees,
            q=int(np.count_nonzero(degrees == k_max)),
            edges=[(min(u, v), max(u, v)) for u, v in edges],
            t=0,
            k_max=k_max,
            f_kind=f_kind,
            frontier_counts=counts,
            join_order=sorted(int(v) for v in members),
        )


@dataclass(frozen=True)
class EvolutionReport:
    """Per-run trace: join order, unreached leftovers, final edge list."""

    join_order: list[int]
    unreached: list[int]
    edges: list[tuple[int, int]]
    params: LaeeParams
    seed: int
    steps: list[tuple[int, tuple[int, ...]]]

    def to_json_dict(self) -> dict:
        return {
            "join_order": list(self.join_order),
            "unreached": list(self.unreached),
            "edges": [[u, v] for u, v in sorted(self.edges)],
            "params": {
                "m0": self.params.m0,
                "e0": self.params.e0,
                "m": self.params.m,
                "k_max": self.params.k_max,
                "f_kind": self.params.f_kind,
            },
            "seed": self.seed,
            "steps": [
                {"node": node, "linked": list(linked)} for node, linked in self.steps
            ],
        }


def _seed_connected(members: list[int], edges: list[tuple[int, int]]) -> bool:
    adj: dict[int, list[int]] = {v: [] for v in members}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {members[0]}
    stack = [members[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(members)


def _respects_cap(members: list[int], edges: list[tuple[int, int]], k_max: int) -> bool:
    degree = dict.fromkeys(members, 0)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    return max(degree.values()) <= k_max


def init_seed_topology(
    dep: Deployment, params: LaeeParams, gen: np.random.Generator
) -> EvolutionState:
    """Seed the evolution: sink + m0-1 in-range neighbors + e0 random links.

    Links are drawn uniformly among in-range pairs of the seed members and
    redrawn (bounded attempts) until the seed is connected and no member
    starts above the degree cap.
    """
    nbrs = neighbor_lists(dep)
    sink_nbrs = nbrs[dep.sink]
    if sink_nbrs.size < params.m0 - 1:
        raise SeedTopologyError(
            f"sink has {sink_nbrs.size} potential neighbors, "
            f"m0={params.m0} needs {params.m0 - 1}"
        )
    picked = sample_indices(gen, int(sink_nbrs.size), params.m0 - 1)
    members = [dep.sink] + [int(sink_nbrs[i]) for i in picked]

    member_set = set(members)
    pairs = sorted(
        (u, int(v))
        for u in members
        for v in nbrs[u]
        if int(v) in member_set and u < int(v)
    )
    if len(pairs) < params.e0:
        raise SeedTopologyError(
            f"only {len(pairs)} in-range seed pairs, e0={params.e0} requested"
        )
    for _ in range(SEED_LINK_ATTEMPTS):
        chosen = [pairs[i] for i in sample_indices(gen, len(pairs), params.e0)]
        if _seed_connected(members, chosen) and _respects_cap(
            members, chosen, params.k_max
        ):
            return EvolutionState.from_membership(
                dep, members, chosen, params.k_max, params.f_kind
            )
    raise SeedTopologyError(
        f"no capped connected seed found in {SEED_LINK_ATTEMPTS} link draws "
        f"(m0={params.m0}, e0={params.e0}, k_max={params.k_max})"
    )


def _select_pair(dep, state, gen, blocked=None):
    """Growth pair (a, b) or None when nothing attachable remains."""
    nbrs = neighbor_lists(dep)
    counts = state.frontier_counts
    if blocked is not None and blocked.any():
        counts = counts.copy()
        for x in np.flatnonzero(blocked):
            hit = nbrs[x][state.in_topology[nbrs[x]]]
            counts[hit] -= 1
    members = np.flatnonzero(state.in_topology)
    if members.size == 0:
        return None
    best = int(counts[members].max())
    if best <= 0:
        return None
    maximizers = members[counts[members] == best]
    a = int(maximizers[rand_below(gen, maximizers.size)])
    options = nbrs[a][~state.in_topology[nbrs[a]]]
    if blocked is not None and blocked.any():
        options = options[~blocked[options]]
    b = int(options[rand_below(gen, options.size)])
    return a, b


def select_growth_pair(
    dep: Deployment, state: EvolutionState, gen: np.random.Generator
) -> tuple[int, int]:
    """Pick node a with the most scattered in-range neighbors (ties uniform),
    then a uniform scattered neighbor b of a as the newcomer."""
    pair = _select_pair(dep, state, gen)
    if pair is None:
        raise GrowthExhausted("no in-topology node has a scattered neighbor")
    return pair


def attachment_weights(
    dep: Deployment, state: EvolutionState, b: int
) -> tuple[np.ndarray, np.ndarray]:
    """Attachment candidates for newcomer b and their unnormalized masses.

    Candidates are b's in-topology in-range neighbors below the degree cap;
    mass is f(E_i) * k_i with k floored at 1 so a zero-degree seed member
    stays attachable.  Sampling normalizes over the candidate set.
    """
    if state.in_topology[b]:
        raise StateError(f"node {b} is already in the topology")
    nbr = neighbor_lists(dep)[b]
    cands = nbr[state.in_topology[nbr] & (state.degrees[nbr] < state.k_max)]
    if cands.size == 0:
        return cands.astype(np.int64), np.zeros(0, dtype=np.float64)
    appeal = ENERGY_WEIGHT_FNS[state.f_kind](dep.energies[cands])
    k = np.maximum(state.degrees[cands], 1).astype(np.float64)
    return cands.astype(np.int64), np.asarray(appeal, dtype=np.float64) * k


def attach(
    dep: Deployment,
    state: EvolutionState,
    b: int,
    params: LaeeParams,
    gen: np.random.Generator,
) -> EvolutionState:
    """Link newcomer b to up to m candidates and move it into the topology.

    All candidates are linked when there are at most m.  Otherwise the m
    picks are drawn independently from the start-of-step masses and repeats
    collapse into a single link, so a newcomer facing many candidates often
    gains slightly fewer than m links; that loss is what keeps the average
    degree at the observed level rather than at the 2m ceiling.
    """
    cands, weights = attachment_weights(dep, state, b)
    if cands.size == 0:
        raise StateError(f"newcomer {b} has no attachable candidates")
    if cands.size <= params.m:
        chosen = [int(c) for c in cands]
    else:
        chosen = []
        for _ in range(params.m):
            pick = int(cands[weighted_index(gen, weights)])
            if pick not in chosen:
                chosen.append(pick)

    nbrs = neighbor_lists(dep)
    for c in chosen:
        state.edges.append((min(b, c), max(b, c)))
        state.degrees[c] += 1
        if state.degrees[c] == state.k_max:
            state.q += 1
    state.degrees[b] = len(chosen)
    if state.degrees[b] == state.k_max:
        state.q += 1

    # b leaves the scattered set: its in-topology neighbors lose one
    # frontier option, and b starts tracking its own scattered neighbors.
    in_top_nbrs = nbrs[b][state.in_topology[nbrs[b]]]
    state.frontier_counts[in_top_nbrs] -= 1
    state.in_topology[b] = True
    state.frontier_counts[b] = int(np.count_nonzero(~state.in_topology[nbrs[b]]))
    state.t += 1
    state.join_order.append(int(b))
    state.steps.append((int(b), tuple(sorted(chosen))))
    return state


def evolve(
    dep: Deployment, params: LaeeParams, seed: int, on_step=None
) -> tuple[Graph, EvolutionReport]:
    """Run the full evolution; returns the topology and its trace report.

    Newcomers whose in-topology neighbors are all at the degree cap are set
    aside and retried after the next successful step; evolution stops when
    no scattered node can be attached, and those left over are reported as
    unreached.  ``on_step(state)`` fires after the seed and after every
    attachment.
    """
    gen = substream(seed, "evolve")
    state = init_seed_topology(dep, params, gen)
    if on_step is not None:
        on_step(state)
    blocked = np.zeros(dep.n, dtype=bool)
    while True:
        pair = _select_pair(dep, state, gen, blocked)
        if pair is None:
            break
        _, b = pair
        cands, _ = attachment_weights(dep, state, b)
        if cands.size == 0:
            blocked[b] = True  # walled off behind saturated nodes, for now
            continue
        attach(dep, state, b, params, gen)
        if blocked.any():
            blocked[:] = False
        if on_step is not None:
            on_step(state)
    graph = Graph.from_edges(dep.n, state.edges, directed=False)
    report = EvolutionReport(
        join_order=list(state.join_order),
        unreached=[int(v) for v in state.scattered],
        edges=sorted(state.edges),
        params=params,
        seed=seed,
        steps=list(state.steps),
    )
    return graph, report
