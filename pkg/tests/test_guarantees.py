import itertools
import random

import numpy as np
import pytest

from inducedpaths import Graph, is_path_in_gprime_induced_in_g, prune_min_degree
from inducedpaths.graph import GraphError, external_neighbourhood
from inducedpaths.guarantees import (
    GuaranteeParams,
    HypothesesViolated,
    check_expansion,
    check_local_density,
    find_induced_path_guaranteed,
    default_params,
    ramsey_pipeline,
    scale_for_ell,
)
from inducedpaths.sources import sample_gnp

from graphs import complete, path_graph, random_subgraph


def test_params_validation():
    assert GuaranteeParams(1, 2, 3).total == 6
    with pytest.raises(ValueError):
        GuaranteeParams(0, 1, 1)


def test_local_density_examples():
    assert check_local_density(complete(3), 3, 2).passed
    res = check_local_density(complete(4), 4, 2)
    assert res.status == "fail" and len(res.witness) == 3 and res.value == 3
    assert check_local_density(Graph.empty(6), 5, 1).passed
    assert check_local_density(Graph.empty(30), 5, 1).status == "undecided"


def test_expansion_examples():
    assert check_expansion(complete(3), 1, 2).passed
    res = check_expansion(path_graph(4), 1, 2)
    assert res.status == "fail" and res.witness == (0,)
    res = check_expansion(Graph.from_edge_list(3, [(0, 1)]), 1, 1)
    assert res.witness == (2,)
    assert check_expansion(Graph.empty(26), 1, 1).status == "undecided"


def brute_density(G, cap, edges):
    return all(
        induced_edges(G, S) < edges
        for k in range(min(cap - 1, G.n) + 1)
        for S in itertools.combinations(range(G.n), k)
    )


def induced_edges(G, S):
    return sum(G.has_edge(a, b) for a, b in itertools.combinations(S, 2))


def test_checkers_match_brute_force():
    rng = random.Random(3)
    for trial in range(80):
        n = rng.randint(0, 9)
        G = sample_gnp(n, rng.choice([0.2, 0.5, 0.8]), trial)
        cap, edges = rng.randint(1, n + 2), rng.randint(1, 8)
        assert check_local_density(G, cap, edges).passed == brute_density(G, cap, edges)
        s1, need = rng.randint(1, max(n, 1)), rng.randint(0, n)
        brute = all(len(external_neighbourhood(G, S)) >= need for S in itertools.combinations(range(n), s1))
        res = check_expansion(G, s1, need)
        assert res.passed == brute
        if not res.passed:
            assert len(external_neighbourhood(G, res.witness)) == res.value < need


def test_find_path_examples(k3):
    assert find_induced_path_guaranteed(k3, k3, GuaranteeParams(1, 1, 1)) == [0, 1]
    with pytest.raises(HypothesesViolated) as exc:
        find_induced_path_guaranteed(k3, k3, GuaranteeParams(1, 1, 2))
    assert exc.value.sizes["n"] == 3
    with pytest.raises(GraphError):
        find_induced_path_guaranteed(k3, path_graph(3), GuaranteeParams(1, 1, 1))


def test_screened_instances_never_fail():
    rng = random.Random(11)
    hits = 0
    for trial in range(60):
        n = rng.randint(3, 11)
        G = sample_gnp(n, rng.choice([0.3, 0.5, 0.7]), trial)
        Gp = random_subgraph(G, rng.choice([0.8, 1.0]), trial)
        for s1, s2, ell in itertools.product(range(1, 3), range(1, 4), range(1, 4)):
            p = GuaranteeParams(s1, s2, ell)
            if n < p.total:
                continue
            if not (check_local_density(G, p.total, 2 * s2).passed and check_expansion(Gp, s1, s2 + ell).passed):
                continue
            hits += 1
            path = find_induced_path_guaranteed(Gp, G, p)
            assert len(path) - 1 >= ell and is_path_in_gprime_induced_in_g(Gp, G, path)
    assert hits >= 20


def test_default_params():
    p, raw = default_params("two_colour", 10 ** 7)
    assert (p.ell, p.s1, p.s2) == (7, 21, 168)
    scale = scale_for_ell(50, "two_colour", 10 ** 5)
    p, raw = default_params("two_colour", 10 ** 5, scale=scale)
    assert p.ell == 50 and p.s1 == 150 and p.s2 == 1200
    p, raw = default_params("multi", 1000, k=20, c=10.0, scale=1.0)
    assert raw["ell"] == raw["s1"] and raw["s2"] > raw["ell"]
    with pytest.raises(ValueError):
        default_params("multi", 1000, k=2)


def test_pipeline_k3():
    G = complete(3)
    res = ramsey_pipeline(G, np.zeros(3, dtype=int), 2, params=GuaranteeParams(1, 1, 1))
    # degree-16 pruning empties K3
    assert res.status == "too_small"
    res = ramsey_pipeline(G, np.zeros(3, dtype=int), 2, "multi", c=1.0, params=GuaranteeParams(1, 1, 1))
    assert res.status == "ok" and res.certified and res.path_length == 1


def test_pipeline_single_colour_matches_direct_run():
    G = complete(20)
    params = GuaranteeParams(1, 1, 1)
    res = ramsey_pipeline(G, np.zeros(G.m, dtype=int), 1, params=params)
    core, _ = prune_min_degree(G, 16)
    assert res.path == find_induced_path_guaranteed(core, core, params)
    H = sample_gnp(400, 0.2, 1)
    res = ramsey_pipeline(H, np.zeros(H.m, dtype=int), 1, params=GuaranteeParams(3, 10, 5))
    core, removed = prune_min_degree(H, 16)
    keep = np.flatnonzero(~removed.mask)
    direct = find_induced_path_guaranteed(core, core, GuaranteeParams(3, 10, 5))
    assert res.path == keep[direct].tolist()


def test_pipeline_stages_and_certificates():
    from inducedpaths.experiments import ColouringStrategy, colour_edges

    for seed, kind in enumerate(["uniform_random", "label_alternating", "greedy_balance", "round_robin"]):
        n = 3000
        G = sample_gnp(n, 64 / n, seed)
        colours = colour_edges(G, ColouringStrategy(kind, 2, seed))
        res = ramsey_pipeline(G, colours, 2, params=GuaranteeParams(20, 120, 10))
        d = res.diagnostics
        assert d["pruned"]["n"] <= d["class_graph"]["n"] <= G.n
        assert d["pruned"]["min_degree"] > 16
        assert d["class_edges"][res.colour] * 2 >= G.m
        assert res.status == "ok" and res.certified
        cols = colours[G.edge_index(res.path[:-1], res.path[1:])]
        assert np.all(cols == res.colour)
        assert is_path_in_gprime_induced_in_g(G, G, res.path)


def test_pipeline_rejects_bad_colouring(k3):
    with pytest.raises(ValueError):
        ramsey_pipeline(k3, [0, 1], 2)
    with pytest.raises(ValueError):
        ramsey_pipeline(k3, [0, 1, 2], 2)


def test_majority_tie_lowest_colour():
    G = complete(4)
    colours = np.array([0, 1, 0, 1, 0, 1])
    res = ramsey_pipeline(G, colours, 2, "multi", c=1.0, params=GuaranteeParams(1, 1, 1))
    assert res.colour == 0
