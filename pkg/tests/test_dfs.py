import json
import random

import pytest

from inducedpaths import Graph, QuerySource, Step, VertexOrdering, dfs_init, dfs_round, dfs_run, is_path_in_gprime_induced_in_g, stop_when
from inducedpaths.dfs import Auditor, TerminalStateError, audit_invariants
from inducedpaths.sources import sample_gnp

from graphs import complete, cycle, path_graph, random_subgraph
from reference import reference_search

HAND = {
    "K3": (complete(3), ["step1", "step3a", "step3b", "step4", "step4"], {0, 1}, {2}, 2),
    "C4": (cycle(4), ["step1", "step3a", "step3a", "step3b", "step4", "step4", "step4"], {0, 1, 2}, {3}, 3),
    "P4": (path_graph(4), ["step1", "step3a", "step3a", "step3a", "step4", "step4", "step4", "step4"], {0, 1, 2, 3}, set(), 4),
}


def steps_of(G, Gp=None, order=None):
    src = QuerySource.fixed(Gp or G, G)
    st = dfs_init(G.n, order)
    steps, stacks = [], []
    while not st.is_terminal:
        steps.append(dfs_round(st, src).value)
        stacks.append(st.U)
    return st, src, steps, stacks


@pytest.mark.parametrize("name", sorted(HAND))
def test_hand_traces(name):
    G, steps, s1, s2, max_u = HAND[name]
    st, src, got, _ = steps_of(G)
    assert got == steps
    assert st.S1 == s1 and st.S2 == s2 and st.max_u == max_u


def test_init_and_trivial_sizes():
    st = dfs_init(3)
    assert st.U == [] and st.T == {0, 1, 2} and len(st.S1) == len(st.S2) == 0
    st = dfs_init(0)
    assert st.is_terminal
    with pytest.raises(TerminalStateError):
        dfs_round(st, QuerySource.fixed(Graph.empty(0), Graph.empty(0)))
    st, _, steps, _ = steps_of(Graph.empty(1))
    assert steps == ["step1", "step4"] and st.S1 == {0}


def test_run_examples(p4):
    rec = dfs_run(3, None, QuerySource.fixed(complete(3), complete(3)))
    assert rec.max_u == 2 and rec.s1_size == 2 and rec.s2_size == 1 and rec.stop_reason == "exhausted"
    rec = dfs_run(4, None, QuerySource.fixed(p4, p4), stop_when(path_vertices=3))
    assert rec.stop_reason == "path_hit" and rec.path_length == 2 and rec.best_path == [0, 1, 2]
    G = sample_gnp(30, 0.2, 1)
    rec = dfs_run(30, None, QuerySource.fixed(G, G))
    st = rec.state
    assert st.u_size == st.t_size == 0 and rec.s1_size + rec.s2_size == 30


def test_audit_every_round_hand_cases():
    for G, *_ in HAND.values():
        aud = Auditor(full=True)
        dfs_run(G.n, None, QuerySource.fixed(G, G), on_round=aud)
        assert aud.ok and aud.rounds > 0
    st = dfs_init(4)
    src = QuerySource.fixed(cycle(4), cycle(4))
    src.bind(st)
    st.source = src
    assert audit_invariants(st, src).ok


def test_matches_reference_search():
    """Engine (fast and pairwise modes, fixed and generative) against the
    literal restart-from-head search with an explicit ledger."""
    rng = random.Random(1)
    for trial in range(150):
        n = rng.randint(1, 24)
        G = sample_gnp(n, rng.choice([0.05, 0.1, 0.3, 0.7]), trial)
        Gp = random_subgraph(G, 0.7, trial)
        order = VertexOrdering.shuffled(n, trial) if trial % 2 else VertexOrdering.identity(n)
        ref = reference_search(Gp.has_edge, G.has_edge, order.pi)
        for pairwise in (False, True):
            src = QuerySource.fixed(Gp, G, pairwise=pairwise)
            st = dfs_init(n, order)
            steps, stacks = [], []
            while not st.is_terminal:
                steps.append(dfs_round(st, src).value)
                stacks.append(st.U)
            queried = {frozenset((a, b)) for a in range(n) for b in range(a + 1, n) if src.lookup(a, b) is not None}
            assert (steps, stacks) == (ref[0], ref[1])
            assert (set(st.S1), set(st.S2), st.max_u) == ref[2:5]
            assert queried == ref[5] and src.new_queries == len(ref[5])
        src = QuerySource.generative(n, rng.choice([0.05, 0.2, 0.5]), trial)
        st = dfs_init(n, order)
        steps = []
        while not st.is_terminal:
            steps.append(dfs_round(st, src).value)
        queried = {frozenset((a, b)) for a in range(n) for b in range(a + 1, n) if src.lookup(a, b) is not None}
        asked = src.new_queries
        F = src.finalize()
        ref = reference_search(F.has_edge, F.has_edge, order.pi)
        assert steps == ref[0] and queried == ref[5] and asked == len(ref[5])


def test_step3_picks_pi_first_and_order_matters():
    # star with centre 0: leaves are pushed/discarded in pi order
    G = Graph.from_edge_list(4, [(0, 1), (0, 2), (0, 3)])
    order = VertexOrdering([0, 3, 2, 1])
    st, _, steps, stacks = steps_of(G, order=order)
    assert stacks[1] == [0, 3]


def test_paths_are_certified_each_round():
    rng = random.Random(2)
    for trial in range(40):
        n = rng.randint(2, 40)
        G = sample_gnp(n, 0.15, trial)
        Gp = random_subgraph(G, 0.6, trial)
        src = QuerySource.fixed(Gp, G)
        st = dfs_init(n, VertexOrdering.shuffled(n, trial))
        best = 0
        while not st.is_terminal:
            dfs_round(st, src)
            assert is_path_in_gprime_induced_in_g(Gp, G, st.U, validate=False)
            best = max(best, st.u_size)
        assert best == st.max_u
        assert is_path_in_gprime_induced_in_g(Gp, G, [st.order.pi[x] for x in st.best], validate=False)


def test_determinism_and_trace():
    G = sample_gnp(60, 0.1, 3)
    a = dfs_run(60, VertexOrdering.shuffled(60, 1), QuerySource.fixed(G, G), trace_every=5)
    b = dfs_run(60, VertexOrdering.shuffled(60, 1), QuerySource.fixed(G, G), trace_every=5)
    assert a == b and a.trace and a.trace[0]["round"] == 5
    lines = []
    dfs_run(60, None, QuerySource.generative(60, 0.05, 2), trace_every=7, trace_sink=lines.append)
    row = json.loads(lines[0])
    assert {"round", "step", "ut_queries", "new_queries"} <= set(row)


def test_query_budget_and_stops():
    G = sample_gnp(80, 0.1, 4)
    rec = dfs_run(80, None, QuerySource.fixed(G, G), query_budget=50)
    assert rec.stop_reason == "query_budget" and rec.new_queries >= 50
    rec = dfs_run(80, None, QuerySource.fixed(G, G), stop_when(s1=3))
    assert rec.stop_reason == "s1_hit" and rec.s1_size == 3
    rec = dfs_run(80, None, QuerySource.fixed(G, G), stop_when(s2=2))
    assert rec.stop_reason == "s2_hit" and rec.s2_size == 2


def test_generative_s2_excess_every_round():
    for seed in range(10):
        aud = Auditor(full=False)
        dfs_run(500, VertexOrdering.shuffled(500, seed), QuerySource.generative(500, 1.2 / 500, seed), on_round=aud)
        assert aud.ok


def test_step_enum_values():
    assert Step.STEP3B.value == "step3b"
