import hashlib
import itertools

import numpy as np
import pytest

from conftest import make_deployment
from wsntopo.errors import (
    ConfigError,
    GrowthExhausted,
    SeedTopologyError,
    StateError,
)
from wsntopo.geometry import DeploymentConfig, deploy
from wsntopo.laee import (
    EvolutionState,
    LaeeParams,
    attach,
    attachment_weights,
    evolve,
    init_seed_topology,
    select_growth_pair,
)
from wsntopo.rng import substream


# --- parameters ------------------------------------------------------------

@pytest.mark.parametrize(
    "kwargs",
    [
        dict(m0=1),
        dict(m0=4, e0=0),
        dict(m0=4, e0=7),  # above 4*3/2
        dict(m0=4, e0=3, m=0),
        dict(m0=4, e0=3, m=5),
        dict(m0=4, e0=3, m=3, k_max=3),
        dict(f_kind="cubic"),
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ConfigError):
        LaeeParams(**kwargs)


# --- seed topology ----------------------------------------------------------

def test_seed_minimal_pair():
    dep = make_deployment([(0.0, 0.0), (1.0, 0.0), (9.0, 9.0)], side=10.0, r=2.0)
    state = init_seed_topology(dep, LaeeParams(m0=2, e0=1, m=1, k_max=5), substream(1, "t"))
    assert list(np.flatnonzero(state.in_topology)) == [0, 1]
    assert state.edges == [(0, 1)]
    assert state.degrees[0] == 1 and state.degrees[1] == 1
    assert state.q == 0 and state.t == 0


def test_seed_counts_nodes_and_links(clique_deployment):
    params = LaeeParams(m0=6, e0=8, m=2, k_max=10)
    state = init_seed_topology(clique_deployment, params, substream(2, "t"))
    assert int(state.in_topology.sum()) == 6
    assert len(state.edges) == 8
    assert state.degrees.sum() == 16


def test_seed_errors_when_sink_short_of_neighbors():
    dep = make_deployment([(0.0, 0.0), (1.0, 0.0), (9.0, 9.0)], side=10.0, r=2.0)
    with pytest.raises(SeedTopologyError):
        init_seed_topology(dep, LaeeParams(m0=3, e0=2, m=1, k_max=5), substream(3, "t"))


def test_seed_errors_when_too_few_feasible_pairs():
    # 0-1 and 0-2 in range, but 1-2 not: only 2 feasible pairs for e0=3
    dep = make_deployment([(2.0, 2.0), (4.0, 2.0), (0.0, 2.0)], side=10.0, r=2.0)
    with pytest.raises(SeedTopologyError):
        init_seed_topology(dep, LaeeParams(m0=3, e0=3, m=1, k_max=5), substream(4, "t"))


def test_seed_always_connected(clique_deployment):
    params = LaeeParams(m0=5, e0=4, m=2, k_max=10)  # 4 links on 5 nodes: a tree or bust
    for s in range(30):
        state = init_seed_topology(clique_deployment, params, substream(s, "t"))
        members = list(np.flatnonzero(state.in_topology))
        adj = {v: set() for v in members}
        for u, v in state.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen, stack = {members[0]}, [members[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert len(seen) == len(members)


def test_seed_links_match_enumeration_oracle():
    # 4 mutually-in-range nodes, m0=4, e0=3: draws land in the connected
    # 3-subsets of the 6 possible pairs, and replay the documented stream
    pts = [(1.0, 1.0), (1.5, 1.0), (1.0, 1.5), (1.5, 1.5)]
    dep = make_deployment(pts, side=10.0, r=5.0)
    params = LaeeParams(m0=4, e0=3, m=2, k_max=8)

    all_pairs = list(itertools.combinations(range(4), 2))
    connected_subsets = []
    for subset in itertools.combinations(all_pairs, 3):
        adj = {v: set() for v in range(4)}
        for u, v in subset:
            adj[u].add(v)
            adj[v].add(u)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == 4:
            connected_subsets.append(frozenset(subset))
    assert len(connected_subsets) == 16  # spanning-connected 3-subsets of K4

    def manual_gen(seed):
        h = hashlib.blake2b(digest_size=16)
        h.update(str(seed).encode())
        h.update(b"/seedcheck")
        return np.random.Generator(np.random.Philox(key=int.from_bytes(h.digest(), "big")))

    def manual_sample(gen, n, k):
        pool = list(range(n))
        for i in range(k):
            j = i + min(int(gen.random() * (n - i)), n - i - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    for seed in range(40):
        state = init_seed_topology(dep, params, substream(seed, "seedcheck"))
        assert frozenset(state.edges) in connected_subsets

        # independent transcript replay
        replay = manual_gen(seed)
        nbr0 = [1, 2, 3]
        picked = [nbr0[i] for i in manual_sample(replay, 3, 3)]
        members = [0] + picked
        pairs = sorted((min(u, v), max(u, v)) for u, v in itertools.combinations(members, 2))
        while True:
            chosen = [pairs[i] for i in manual_sample(replay, 6, 3)]
            if frozenset(chosen) in connected_subsets:
                break
        assert sorted(state.edges) == sorted(chosen)


# --- growth pair selection ---------------------------------------------------

def test_select_single_frontier_node():
    # sink in topology alone, 3 scattered neighbors
    pts = [(5.0, 5.0), (5.5, 5.0), (5.0, 5.5), (4.5, 5.0), (9.9, 9.9)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    state = EvolutionState.from_membership(dep, [0], [], k_max=5)
    seen_b = set()
    for s in range(60):
        a, b = select_growth_pair(dep, state, substream(s, "sel"))
        assert a == 0
        seen_b.add(b)
    assert seen_b == {1, 2, 3}


def test_select_strict_maximum_always_wins():
    # node 0 has 5 scattered neighbors, node 1 has 2; both in topology
    pts = [(2.0, 2.0)] + [(2.0 + 0.1 * i, 2.2) for i in range(5)]
    pts += [(8.0, 8.0), (8.2, 8.0), (8.0, 8.2)]
    dep = make_deployment(pts, side=10.0, r=0.5)
    state = EvolutionState.from_membership(dep, [0, 6], [], k_max=9)
    for s in range(50):
        a, _ = select_growth_pair(dep, state, substream(s, "sel2"))
        assert a == 0


def test_select_tie_breaks_uniformly():
    pts = [(2.0, 2.0)] + [(2.0 + 0.1 * i, 2.2) for i in range(4)]
    pts += [(8.0, 8.0)] + [(8.0 + 0.1 * i, 8.2) for i in range(4)]
    dep = make_deployment(pts, side=10.0, r=0.6)
    state = EvolutionState.from_membership(dep, [0, 5], [], k_max=9)
    trials = 10_000
    hits = 0
    for s in range(trials):
        a, _ = select_growth_pair(dep, state, substream(s, "tie"))
        hits += a == 0
    sigma = np.sqrt(0.25 / trials)
    assert abs(hits / trials - 0.5) < 3 * sigma


def test_select_exhausted_signal():
    dep = make_deployment([(0.0, 0.0), (1.0, 0.0), (9.0, 9.0)], side=10.0, r=2.0)
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=5)
    with pytest.raises(GrowthExhausted):
        select_growth_pair(dep, state, substream(1, "x"))


# --- attachment weights ------------------------------------------------------

def test_weights_proportional_to_degree_equal_energy():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.0, 5.5), (5.3, 5.3)]
    dep = make_deployment(pts, side=10.0, r=1.0, energies=[1.0, 1.0, 1.0, 1.0])
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=9)
    state.degrees[0] = 2
    state.degrees[1] = 4
    cands, weights = attachment_weights(dep, state, 3)
    assert list(cands) == [0, 1]
    assert weights[1] / weights[0] == pytest.approx(2.0)
    probs = weights / weights.sum()
    assert probs[0] == pytest.approx(1 / 3)
    assert probs[1] == pytest.approx(2 / 3)


def test_weights_exclude_saturated_candidates():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.3, 5.3)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=4)
    state.degrees[1] = 4
    state.q = 1
    cands, weights = attachment_weights(dep, state, 2)
    assert list(cands) == [0]


def test_weights_monte_carlo_energy_degree_mix():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.0, 5.5), (5.3, 5.3)]
    dep = make_deployment(pts, side=10.0, r=1.0, energies=[0.5, 0.75, 1.0, 0.9])
    state = EvolutionState.from_membership(dep, [0, 1, 2], [(0, 1), (1, 2)], k_max=9)
    state.degrees[0] = 4
    state.degrees[1] = 2
    state.degrees[2] = 1
    cands, weights = attachment_weights(dep, state, 3)
    assert list(weights) == pytest.approx([2.0, 1.5, 1.0])

    from wsntopo.rng import weighted_index

    gen = substream(77, "mc")
    trials = 100_000
    counts = np.zeros(3)
    for _ in range(trials):
        counts[weighted_index(gen, weights)] += 1
    for i, p in enumerate([4 / 9, 3 / 9, 2 / 9]):
        sigma = np.sqrt(p * (1 - p) / trials)
        assert abs(counts[i] / trials - p) < 3 * sigma


def test_weights_empty_signal_and_state_error():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.3, 5.3)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    state = EvolutionState.from_membership(dep, [0], [], k_max=4)
    state.degrees[0] = 4  # saturated
    cands, weights = attachment_weights(dep, state, 1)
    assert cands.size == 0 and weights.size == 0
    with pytest.raises(StateError):
        attachment_weights(dep, state, 0)


def test_weights_floor_keeps_zero_degree_member_attachable():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.3, 5.3)]
    dep = make_deployment(pts, side=10.0, r=1.0, energies=[0.8, 1.0, 1.0])
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=4)
    state.degrees[0] = 0  # hypothetical isolated seed member
    cands, weights = attachment_weights(dep, state, 2)
    assert list(cands) == [0, 1]
    assert weights[0] == pytest.approx(0.8)  # f(E) * max(k, 1)


# --- attach ------------------------------------------------------------------

def test_attach_links_all_when_few_candidates():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.3, 5.3), (9.0, 9.0)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=9)
    params = LaeeParams(m0=4, e0=3, m=3, k_max=9)
    attach(dep, state, 2, params, substream(5, "at"))
    assert state.degrees[2] == 2  # only 2 candidates existed
    assert state.in_topology[2]
    assert state.t == 1
    assert (0, 2) in state.edges and (1, 2) in state.edges


def test_attach_exhausts_candidate_set_at_m_equal_count(clique_deployment):
    params = LaeeParams(m0=5, e0=4, m=5, k_max=11)
    state = init_seed_topology(clique_deployment, params, substream(6, "at2"))
    members = list(np.flatnonzero(state.in_topology))
    scattered = [v for v in range(clique_deployment.n) if v not in members]
    b = scattered[0]
    cands, _ = attachment_weights(clique_deployment, state, b)
    assert cands.size == 5
    attach(clique_deployment, state, b, params, substream(7, "at2"))
    assert state.degrees[b] == 5  # all five linked regardless of weights


def test_attach_updates_q_at_cap():
    pts = [(5.0, 5.0), (5.5, 5.0), (5.3, 5.3)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=3)
    state.degrees[0] = 2  # one below cap
    params = LaeeParams(m0=2, e0=1, m=2, k_max=3)
    q_before = state.q
    attach(dep, state, 2, params, substream(8, "at3"))
    assert state.degrees[0] == 3
    assert state.q == q_before + 1


def test_attach_rejects_member():
    pts = [(5.0, 5.0), (5.5, 5.0)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    state = EvolutionState.from_membership(dep, [0, 1], [(0, 1)], k_max=3)
    with pytest.raises(StateError):
        attach(dep, state, 0, LaeeParams(m0=2, e0=1, m=1, k_max=3), substream(9, "x"))


# --- evolve ------------------------------------------------------------------

def test_evolve_single_link_budget_on_clique(clique_deployment):
    params = LaeeParams(m0=4, e0=3, m=1, k_max=11)
    graph, report = evolve(clique_deployment, params, seed=12)
    n, m0, e0 = clique_deployment.n, params.m0, params.e0
    assert graph.edge_count == e0 + (n - m0)
    assert report.unreached == []


def test_evolve_deterministic():
    cfg = DeploymentConfig(n=60, side=30.0, r=8.0)
    dep = deploy(cfg, 0.5, 1.0, seed=44)
    params = LaeeParams(m0=4, e0=4, m=2, k_max=8)
    g1, r1 = evolve(dep, params, seed=9)
    g2, r2 = evolve(dep, params, seed=9)
    assert r1.edges == r2.edges
    assert r1.join_order == r2.join_order
    g3, r3 = evolve(dep, params, seed=10)
    assert r1.edges != r3.edges


def test_evolve_reports_unreachable_island():
    pts = [(1.0, 1.0), (1.5, 1.0), (1.0, 1.5), (1.5, 1.5), (9.0, 9.0), (9.2, 9.0)]
    dep = make_deployment(pts, side=10.0, r=1.0)
    params = LaeeParams(m0=3, e0=2, m=1, k_max=5)
    graph, report = evolve(dep, params, seed=3)
    assert set(report.unreached) == {4, 5}
    assert graph.degrees()[4] == 0 and graph.degrees()[5] == 0


def test_evolve_invariants_stepwise():
    cfg = DeploymentConfig(n=70, side=25.0, r=6.0, sink_position=(12.5, 12.5))
    dep = deploy(cfg, 0.5, 1.0, seed=21)
    params = LaeeParams(m0=4, e0=4, m=2, k_max=6)
    r2 = cfg.r ** 2
    checks = {"steps": 0}

    def on_step(state):
        checks["steps"] += 1
        # degree cap, q bookkeeping, and t tracking the newcomer count
        assert state.degrees.max() <= params.k_max
        assert state.q == int(np.count_nonzero(state.degrees == params.k_max))
        assert state.t == int(state.in_topology.sum()) - params.m0
        # spatial feasibility
        for u, v in state.edges:
            d2 = np.sum((dep.positions[u] - dep.positions[v]) ** 2)
            assert d2 <= r2 + 1e-9
        # grown subgraph connected
        members = list(np.flatnonzero(state.in_topology))
        adj = {v: [] for v in members}
        for u, v in state.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen, stack = {members[0]}, [members[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert len(seen) == len(members)

    graph, report = evolve(dep, params, seed=5, on_step=on_step)
    assert checks["steps"] >= 2
    assert len(report.join_order) == int(np.count_nonzero(graph.degrees() > 0))


def test_evolve_monotone_growth_order():
    cfg = DeploymentConfig(n=50, side=20.0, r=6.0)
    dep = deploy(cfg, 0.5, 1.0, seed=31)
    params = LaeeParams(m0=3, e0=2, m=2, k_max=7)
    sizes = []
    evolve(dep, params, seed=2, on_step=lambda st: sizes.append(int(st.in_topology.sum())))
    assert sizes == list(range(sizes[0], sizes[0] + len(sizes)))


def test_seed_full_scale_counts():
    # default-scale deployment whose corner sink happens to support m0 = 10
    cfg = DeploymentConfig(n=1000, side=1000.0, r=100.0, sink_position=(0.0, 0.0))
    dep = deploy(cfg, 0.5, 1.0, seed=42)
    state = init_seed_topology(dep, LaeeParams(), substream(0, "full"))
    assert int(state.in_topology.sum()) == 10
    assert len(state.edges) == 10


def test_evolve_matches_golden_histogram():
    import json
    import os

    path = os.path.join(os.path.dirname(__file__), "data", "golden_laee_m3_seed42.json")
    with open(path) as fh:
        golden = json.load(fh)
    cfg = DeploymentConfig(n=1000, side=1000.0, r=100.0, sink_position=(0.0, 0.0))
    dep = deploy(cfg, 0.5, 1.0, seed=golden["deploy_seed"])
    graph, _ = evolve(dep, LaeeParams(m=golden["m"]), seed=golden["evolve_seed"])
    assert graph.edge_count == golden["edge_count"]
    assert list(np.bincount(graph.degrees())) == golden["degree_counts"]


def test_report_json_schema():
    cfg = DeploymentConfig(n=30, side=15.0, r=6.0)
    dep = deploy(cfg, 0.5, 1.0, seed=8)
    params = LaeeParams(m0=3, e0=2, m=2, k_max=7)
    _, report = evolve(dep, params, seed=4)
    doc = report.to_json_dict()
    assert list(doc.keys()) == ["join_order", "unreached", "edges", "params", "seed", "steps"]
    assert doc["edges"] == sorted(doc["edges"])
    assert doc["params"]["m"] == 2
    assert doc["seed"] == 4
    for step in doc["steps"]:
        assert set(step.keys()) == {"node", "linked"}
