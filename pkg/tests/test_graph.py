import json
import random

import numpy as np
import pytest
from hypothesis import given, settings

from inducedpaths import Graph, GraphError, VertexSet, excess, induced_subgraph, is_path_in_gprime_induced_in_g, prune_min_degree
from inducedpaths.graph import external_neighbourhood, load_graph, parse_edge_list
from inducedpaths.sources import sample_gnp

from graphs import complete, cycle, graphs, path_graph, star


def disjoint_union(*gs):
    edges, off = [], 0
    for g in gs:
        edges += [(u + off, v + off) for u, v in g.edges()]
        off += g.n
    return Graph.from_edge_list(off, edges)


def slow_excess(G):
    parent = list(range(G.n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for u, v in G.edges():
        parent[find(u)] = find(v)
    comps = {}
    for v in range(G.n):
        comps.setdefault(find(v), [0, 0])[0] += 1
    for u, v in G.edges():
        comps[find(u)][1] += 1
    return sum(m - n + 1 for n, m in comps.values())


def test_from_edge_list_examples():
    g = Graph.from_edge_list(3, [(0, 1), (1, 2), (2, 0)])
    assert g.m == 3 and g.edges() == [(0, 1), (0, 2), (1, 2)]
    assert Graph.from_edge_list(4, [(0, 1), (0, 1)]).m == 1
    assert Graph.from_edge_list(4, [(0, 1), (1, 0)]).m == 1
    with pytest.raises(GraphError):
        Graph.from_edge_list(2, [(0, 0)])
    with pytest.raises(GraphError):
        Graph.from_edge_list(2, [(0, 2)])
    with pytest.raises(GraphError):
        Graph.from_edge_list(2, [(-1, 1)])


@given(graphs())
def test_graph_invariants(G):
    deg = G.degrees
    assert deg.sum() == 2 * G.m
    for v in range(G.n):
        nb = G.neighbours(v)
        assert np.all(np.diff(nb) > 0)
        assert v not in nb.tolist()
        for w in nb.tolist():
            assert G.has_edge(w, v)


def test_excess_examples():
    assert excess(path_graph(4)) == 0
    assert excess(complete(3)) == 1
    assert excess(disjoint_union(complete(3), cycle(4), Graph.empty(1))) == 2
    assert excess(Graph.empty(0)) == 0


@given(graphs(), graphs())
def test_excess_properties(G, H):
    assert excess(G) == slow_excess(G) >= 0
    assert excess(disjoint_union(G, H)) == excess(G) + excess(H)
    perm = np.random.default_rng(G.n).permutation(G.n)
    assert excess(G.permuted(perm)) == excess(G)


def test_prune_examples():
    core, removed = prune_min_degree(star(5), 1)
    assert core.n == 0 and len(removed) == 6
    core, removed = prune_min_degree(complete(4), 2)
    assert core == complete(4) and len(removed) == 0
    core, _ = prune_min_degree(path_graph(5), 1)
    assert core.n == 0


def naive_prune(G, d, rng):
    alive = set(range(G.n))
    adj = {v: set(G.neighbours(v).tolist()) for v in range(G.n)}
    while True:
        low = [v for v in alive if len(adj[v] & alive) <= d]
        if not low:
            return alive
        alive.discard(rng.choice(low))


def test_prune_order_independent():
    rng = random.Random(5)
    for trial in range(100):
        n = rng.randint(0, 40)
        G = sample_gnp(n, rng.choice([0.05, 0.1, 0.2, 0.4]), trial)
        d = rng.choice([0, 1, 2, 3, 4.5])
        a = naive_prune(G, d, random.Random(trial))
        b = naive_prune(G, d, random.Random(trial + 1000))
        core, removed = prune_min_degree(G, d)
        assert a == b == set(removed.complement())
        assert core.n == len(a)
        if core.n:
            assert core.degrees.min() > d
        again, rem2 = prune_min_degree(core, d)
        assert again == core and len(rem2) == 0


def test_is_path_examples(c4):
    assert is_path_in_gprime_induced_in_g(c4, c4, (0, 1, 2))
    assert not is_path_in_gprime_induced_in_g(c4, c4, (0, 1, 2, 3))
    assert is_path_in_gprime_induced_in_g(c4, c4, (3,))
    assert is_path_in_gprime_induced_in_g(c4, c4, ())
    assert not is_path_in_gprime_induced_in_g(c4, c4, (0, 1, 0))
    sub = Graph.from_edge_list(4, [(0, 1)])
    assert not is_path_in_gprime_induced_in_g(sub, c4, (0, 1, 2))
    with pytest.raises(GraphError):
        is_path_in_gprime_induced_in_g(c4, sub, (0, 1))


@given(graphs(max_n=9))
@settings(max_examples=60)
def test_induced_path_edge_count(G):
    rng = random.Random(G.m)
    for _ in range(20):
        k = rng.randint(0, G.n)
        seq = rng.sample(range(G.n), k)
        if is_path_in_gprime_induced_in_g(G, G, seq):
            H, _ = induced_subgraph(G, seq)
            assert H.m == max(k - 1, 0)


def test_external_neighbourhood():
    assert external_neighbourhood(cycle(4), [0]) == {1, 3}
    g = sample_gnp(10, 0.4, 1)
    assert len(external_neighbourhood(g, range(10))) == 0
    assert external_neighbourhood(star(4), [0]) == {1, 2, 3, 4}


def test_induced_subgraph():
    H, labels = induced_subgraph(complete(4), [1, 3])
    assert H.n == 2 and H.m == 1 and labels.tolist() == [1, 3]
    assert induced_subgraph(cycle(5), [])[0].n == 0
    H, _ = induced_subgraph(cycle(4), [0, 1, 2])
    assert H.edges() == [(0, 1), (1, 2)]


def test_vertex_set():
    s = VertexSet(5, [0, 3])
    assert len(s) == 2 and 3 in s and 1 not in s
    assert s == {0, 3} and list(s.complement()) == [1, 2, 4]


def test_parse_and_load(tmp_path):
    g, labels = parse_edge_list("3 2\n0 1\n1 2\n")
    assert labels is None and g.edges() == [(0, 1), (1, 2)]
    g, labels = parse_edge_list("# comment\n3 2\na b\nb c\n")
    assert labels == ["a", "b", "c"] and g.m == 2
    with pytest.raises(GraphError, match="line 3"):
        parse_edge_list("3 2\n0 1\n1 2 3\n")
    with pytest.raises(GraphError):
        parse_edge_list("3 3\n0 1\n")
    p = tmp_path / "g.json"
    p.write_text(json.dumps(cycle(5).to_json_dict()))
    assert load_graph(p)[0] == cycle(5)
    q = tmp_path / "g.edges"
    q.write_text(cycle(5).to_edge_list_text())
    assert load_graph(q)[0] == cycle(5)
