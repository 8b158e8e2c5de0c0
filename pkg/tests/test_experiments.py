import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inducedpaths import sample_gnp
from inducedpaths.experiments import (
    HEADER,
    STRATEGIES,
    ColouringStrategy,
    ConfigError,
    SupercriticalConfig,
    colour_edges,
    compute_verdicts,
    parse_config,
    ramsey2_trial,
    ramseyk_trial,
    supercritical_trial,
    sweep,
)


def test_single_vertex_trial():
    rec = supercritical_trial(SupercriticalConfig(n=1, epsilon=0.1), 0)
    assert rec.path_length == 0 and rec.excess_final == 0 and rec.edge_count == 0
    assert rec.max_U == 1 and rec.certified


def test_config_validation():
    for bad in ({"n": 10, "epsilon": 0}, {"n": 0, "epsilon": 0.1}, {"n": 10, "epsilon": 0.1, "pi_mode": "x"},
                {"n": 10, "epsilon": 0.1, "audit": "x"}):
        with pytest.raises(ValueError):
            SupercriticalConfig(**bad)


def test_targets():
    cfg = SupercriticalConfig(n=1000, epsilon=0.2)
    assert cfg.p == pytest.approx(1.2 / 1000)
    assert cfg.length_target == pytest.approx(8.0)
    assert cfg.excess_target == pytest.approx(8.0)


@pytest.mark.parametrize("pi_mode", ["identity", "shuffled"])
def test_supercritical_deterministic(pi_mode):
    cfg = SupercriticalConfig(n=1500, epsilon=0.2, pi_mode=pi_mode)
    a = supercritical_trial(cfg, 7)
    b = supercritical_trial(cfg, 7)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
    assert a.audit_failures == 0 and a.extra["audit_mode"] == "full"
    assert a.s2_final <= a.excess_final
    c = supercritical_trial(cfg, 8)
    assert c.to_dict() != a.to_dict()


def test_audit_modes_agree_on_outcome():
    outs = {}
    for mode in ("full", "sampled", "invariants", "none"):
        rec = supercritical_trial(SupercriticalConfig(n=400, epsilon=0.2, audit=mode), 3)
        assert rec.audit_failures == 0
        outs[mode] = (rec.max_U, rec.path_length, rec.excess_final, rec.edge_count)
    assert len(set(outs.values())) == 1


def test_verdicts_recomputed_from_fields():
    rec = supercritical_trial(SupercriticalConfig(n=800, epsilon=0.2), 1)
    v = rec.verdicts
    assert v["length"] == (rec.path_length >= 0.04 * 800 / 5)
    rec.audit_failures = 3
    assert not compute_verdicts(rec)["audit"]
    rec.path_length = 0
    assert not rec.verdicts["length"]
    row = rec.to_row()
    assert row["ok_audit"] is False and row["ok_length"] is False


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.floats(0.05, 0.6), st.integers(0, 10 ** 6), st.sampled_from(STRATEGIES), st.integers(1, 5))
def test_colourings_valid(n, p, seed, kind, k):
    G = sample_gnp(n, p, seed)
    col = colour_edges(G, ColouringStrategy(kind, k, seed))
    assert col.shape == (G.m,)
    if G.m:
        assert col.min() >= 0 and col.max() < k
    assert np.array_equal(col, colour_edges(G, ColouringStrategy(kind, k, seed)))


def test_colouring_examples():
    G = sample_gnp(40, 0.3, 2)
    e = G.edge_array()
    assert np.array_equal(colour_edges(G, ColouringStrategy("label_alternating", 2)), (e[:, 0] + e[:, 1]) % 2)
    assert np.array_equal(colour_edges(G, ColouringStrategy("round_robin", 3)), np.arange(G.m) % 3)
    assert not colour_edges(G, ColouringStrategy("single_colour", 4)).any()
    greedy = colour_edges(G, ColouringStrategy("greedy_balance", 2))
    counts = np.bincount(greedy, minlength=2)
    assert abs(int(counts[0]) - int(counts[1])) <= G.n
    with pytest.raises(ValueError):
        ColouringStrategy("nope")


def test_ramsey2_small_trial():
    rec = ramsey2_trial(3000, 4, ColouringStrategy("uniform_random", 2, 4), ell=5)
    assert rec.extra["status"] == "ok" and rec.certified
    assert rec.path_length >= rec.extra["ell"] == 5
    assert all(rec.verdicts.values())
    assert rec.extra["class_edges"] * 2 >= rec.edge_count
    again = ramsey2_trial(3000, 4, ColouringStrategy("uniform_random", 2, 4), ell=5)
    assert again.extra["path"] == rec.extra["path"]


def test_ramseyk_two_colours_matches_structure():
    rec = ramseyk_trial(1500, 2, 40.0, 1, ColouringStrategy("label_alternating", 2), ell=3)
    assert rec.params["k"] == 2 and rec.extra["k"] == 2
    assert rec.edge_count > 0
    assert rec.extra["class_edges"] * 2 >= rec.edge_count
    if rec.extra["status"] == "ok":
        assert rec.certified and rec.path_length >= 3
    rec3 = ramseyk_trial(600, 3, 30.0, 2, ColouringStrategy("uniform_random", 3, 2), ell=3)
    assert rec3.extra["class_edges"] * 3 >= rec3.edge_count
    with pytest.raises(ValueError):
        ramseyk_trial(100, 1, 30.0, 0, ColouringStrategy("uniform_random", 1))


def test_sweep_empty_grid_header_only():
    res = sweep({"experiment": "supercritical", "grid": {"epsilon": []}, "seeds": 3})
    assert res.rows == []
    assert res.to_csv().strip().split(",") == HEADER["supercritical"]


def test_sweep_rows_and_ordering(tmp_path):
    out_csv = tmp_path / "rows.csv"
    out_json = tmp_path / "rows.json"
    cfg = {"experiment": "supercritical", "grid": {"n": [300], "epsilon": [0.2, 0.1]}, "seeds": 10,
           "output": {"csv": str(out_csv), "json": str(out_json)}}
    res = sweep(cfg)
    assert len(res.rows) == 20
    keys = [(r["epsilon"], r["seed"]) for r in res.rows]
    assert keys == [(0.1, s) for s in range(10)] + [(0.2, s) for s in range(10)]
    assert out_csv.read_text() == res.to_csv()
    assert json.loads(out_json.read_text())["metadata"]["seeds"] == list(range(10))
    assert len(list(csv.DictReader(io.StringIO(res.to_csv())))) == 20
    assert sweep(cfg).to_csv() == res.to_csv()
    assert [c["trials"] for c in res.summary] == [10, 10]


@pytest.mark.parametrize("text, line", [
    ('{\n "experiment": "supercritical",\n "bogus": 1\n}', 3),
    ('{\n "experiment": "supercritical",\n "grid": {\n  "k": [2]\n }\n}', 4),
    ('{\n "experiment": "supercritical",\n "seeds": -1\n}', 3),
    ('{\n "experiment": "nothing"\n}', 2),
    ('{\n "experiment": "supercritical",\n "grid": {"n": 5}\n}', 3),
    ('{\n "experiment": "supercritical",\n\n "seeds": [1,,2]\n}', 4),
])
def test_config_errors_name_line(text, line):
    with pytest.raises(ConfigError, match=rf"^line {line}\b"):
        parse_config(text)


def test_parse_config_normalises():
    cfg = parse_config('{"experiment": "ramsey2", "seeds": [3, 1, 3], "scale": 2}')
    assert cfg["seeds"] == [1, 3] and cfg["scale"] == 2.0 and cfg["grid"] == {}
