"""Seeded trial harnesses and parameter sweeps.

Three settings: the induced-path search on supercritical ``G(n, (1+eps)/n)``
with edges revealed on demand, and the one-colour-class pipelines on random
hosts under two or ``k`` colours.  Colouring strategies are simple fixed
adversaries: they probe, they do not exhaust, the space of colourings.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
import statistics
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .dfs import Auditor, DfsState, ExcessTracker, Step, VertexOrdering, dfs_run
from .graph import Graph, excess, is_path_in_gprime_induced_in_g
from .guarantees import default_params, ramsey_pipeline
from .sources import GenerativeSource, QuerySource, generator_info, sample_gnp

FULL_AUDIT_LIMIT = 2000
# full: |S2| <= excess(exposed) after every round; sampled: every audit_every
# rounds; invariants: additionally every search invariant, every round
AUDIT_MODES = ("auto", "full", "sampled", "invariants", "none")
TWO_COLOUR_DENSITY = 64.0
STRATEGIES = ("uniform_random", "label_alternating", "greedy_balance", "round_robin", "single_colour")


class ConfigError(ValueError):
    pass


# supercritical ------------------------------------------------------------------------


@dataclass(frozen=True)
class SupercriticalConfig:
    n: int
    epsilon: float
    seeds: tuple[int, ...] = (0,)
    pi_mode: str = "identity"
    trace: bool = False
    audit: str = "auto"
    audit_every: int = 64

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.pi_mode not in ("identity", "shuffled"):
            raise ValueError("pi_mode is identity or shuffled")
        if self.audit not in AUDIT_MODES:
            raise ValueError(f"audit is one of {', '.join(AUDIT_MODES)}")

    @property
    def p(self) -> float:
        return min(1.0, (1 + self.epsilon) / self.n)

    @property
    def n0(self) -> float:
        """Budget ``eps n^2 / 2`` on distinct stack/unvisited queries."""
        return self.epsilon * self.n ** 2 / 2

    @property
    def length_target(self) -> float:
        return self.epsilon ** 2 * self.n / 5

    @property
    def excess_target(self) -> float:
        return self.epsilon ** 3 * self.n


@dataclass
class TrialRecord:
    experiment: str
    seed: int
    params: dict
    max_U: int
    path_length: int
    excess_final: int | None
    s2_final: int
    ut_queries_at_peak: int
    edge_count: int
    audit_failures: int = 0
    certified: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def verdicts(self) -> dict:
        return compute_verdicts(self)

    def to_row(self) -> dict:
        row = {"experiment": self.experiment, "seed": self.seed}
        row.update(self.params)
        row.update(
            max_U=self.max_U,
            path_length=self.path_length,
            excess_final=self.excess_final,
            s2_final=self.s2_final,
            ut_queries_at_peak=self.ut_queries_at_peak,
            edge_count=self.edge_count,
            audit_failures=self.audit_failures,
            certified=self.certified,
        )
        for key, value in self.extra.items():
            if not isinstance(value, (dict, list)):
                row[key] = value
        for key, value in self.verdicts.items():
            row[f"ok_{key}"] = value
        return row

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdicts"] = self.verdicts
        return d


def _edge_sigma_ok(rec: TrialRecord) -> bool:
    mean, sd = rec.extra["edge_mean"], rec.extra["edge_sd"]
    return abs(rec.edge_count - mean) <= 5 * sd


def compute_verdicts(rec: TrialRecord) -> dict:
    """Pass/fail flags derived from a record's fields alone."""
    P = rec.params
    if rec.experiment == "supercritical":
        eps, n = P["epsilon"], P["n"]
        return {
            "length": rec.path_length >= eps ** 2 * n / 5,
            "s2_le_excess": rec.s2_final <= rec.excess_final,
            "excess": rec.excess_final <= eps ** 3 * n,
            "audit": rec.audit_failures == 0,
            "certified": bool(rec.certified),
        }
    status = rec.extra.get("status")
    found = status == "ok"
    return {
        "path_found": found,
        "certified": (not found) or bool(rec.certified),
        "length": found and rec.path_length >= rec.extra["ell"],
        "edges_5sigma": _edge_sigma_ok(rec),
        "class_share": rec.extra["class_edges"] * rec.extra["k"] >= rec.edge_count,
    }


class SampledExcessAudit:
    """``|S2| <= excess(exposed)`` every ``every`` rounds (and at the end)."""

    def __init__(self, n: int, every: int = 64):
        self.every = max(1, every)
        self.tracker = ExcessTracker(n)
        self.failures = 0
        self.checks = 0
        self._seen = 0

    def __call__(self, state: DfsState, src: GenerativeSource, step: Step) -> None:
        if state.round % self.every and not state.is_terminal:
            return
        self.check(state, src)

    def check(self, state: DfsState, src: GenerativeSource) -> None:
        pos = src.positives
        for a, b in pos[self._seen:]:
            self.tracker.add(a, b)
        self._seen = len(pos)
        self.checks += 1
        if state.s2_size > self.tracker.excess:
            self.failures += 1


def supercritical_trial(cfg: SupercriticalConfig, seed: int, *, trace_sink: Callable[[str], None] | None = None) -> TrialRecord:
    """One search on ``G(n, (1+eps)/n)`` revealed on demand, run to the end."""
    n = cfg.n
    src = QuerySource.generative(n, cfg.p, seed)
    pi = VertexOrdering.shuffled(n, seed) if cfg.pi_mode == "shuffled" else None
    mode = cfg.audit
    if mode == "auto":
        mode = "full" if n <= FULL_AUDIT_LIMIT else "sampled"
    hook = None
    if mode == "invariants":
        hook = Auditor(full=False)
    elif mode in ("full", "sampled"):
        hook = SampledExcessAudit(n, 1 if mode == "full" else cfg.audit_every)
    rec = dfs_run(n, pi, src, on_round=hook, trace_every=1 if cfg.trace else 0, trace_sink=trace_sink)
    G = src.finalize()
    failures = 0
    audited = 0
    if isinstance(hook, Auditor):
        failures, audited = len(hook.failures), hook.rounds
    elif isinstance(hook, SampledExcessAudit):
        failures, audited = hook.failures, hook.checks
    path = rec.best_path
    return TrialRecord(
        experiment="supercritical",
        seed=seed,
        params={"n": n, "epsilon": cfg.epsilon, "pi_mode": cfg.pi_mode},
        max_U=rec.max_u,
        path_length=rec.max_u - 1 if rec.max_u else 0,
        excess_final=excess(G),
        s2_final=rec.s2_size,
        ut_queries_at_peak=rec.ut_queries_at_peak,
        edge_count=G.m,
        audit_failures=failures,
        certified=is_path_in_gprime_induced_in_g(G, G, path, validate=False),
        extra={"rounds": rec.rounds, "audit_mode": mode, "audited_rounds": audited, "n0": cfg.n0},
    )


# colourings ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColouringStrategy:
    kind: str
    k: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown colouring {self.kind!r}; choose from {', '.join(STRATEGIES)}")
        if self.k < 1:
            raise ValueError("need at least one colour")


def colour_edges(G: Graph, strategy: ColouringStrategy) -> np.ndarray:
    """One colour in ``0..k-1`` per edge, in :meth:`Graph.edge_array` order."""
    k = strategy.k
    e = G.edge_array()
    m = len(e)
    if strategy.kind == "single_colour" or k == 1:
        return np.zeros(m, dtype=np.int64)
    if strategy.kind == "uniform_random":
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([strategy.seed, 0xC0105])))
        return rng.integers(0, k, size=m, dtype=np.int64)
    if strategy.kind == "label_alternating":
        return (e[:, 0] + e[:, 1]) % k
    if strategy.kind == "round_robin":
        return np.arange(m, dtype=np.int64) % k
    # greedy_balance: each edge takes the colour least used at its two ends
    load = [[0] * k for _ in range(G.n)]
    out = [0] * m
    for j, (u, v) in enumerate(e.tolist()):
        lu, lv = load[u], load[v]
        best = 0
        best_val = lu[0] + lv[0]
        for c in range(1, k):
            val = lu[c] + lv[c]
            if val < best_val:
                best, best_val = c, val
        out[j] = best
        lu[best] += 1
        lv[best] += 1
    return np.asarray(out, dtype=np.int64)


def _pipeline_record(experiment, seed, params, G, colours, k, res, p) -> TrialRecord:
    pairs = G.n * (G.n - 1) / 2
    run = res.diagnostics.get("run", {})
    counts = res.diagnostics["class_edges"]
    return TrialRecord(
        experiment=experiment,
        seed=seed,
        params=params,
        max_U=run.get("U", 0),
        path_length=res.path_length,
        excess_final=None,
        s2_final=run.get("S2", 0),
        ut_queries_at_peak=0,
        edge_count=G.m,
        certified=res.certified if res.path is not None else None,
        extra={
            "status": res.status,
            "colour": res.colour,
            "class_edges": counts[res.colour],
            "k": k,
            "ell": res.params.ell,
            "s1": res.params.s1,
            "s2": res.params.s2,
            "pruned_n": res.diagnostics["pruned"]["n"],
            "class_n": res.diagnostics["class_graph"]["n"],
            "edge_mean": pairs * p,
            "edge_sd": math.sqrt(pairs * p * (1 - p)),
            "diagnostics": res.diagnostics,
            "path": res.path,
        },
    )


def ramsey2_trial(n: int, seed: int, strategy: ColouringStrategy, *, scale: float = 1.0, ell: float | None = None) -> TrialRecord:
    """Host ``G(n, 64/n)``, two colours, majority class pruned at degree 16.

    ``ell`` (if given) overrides ``scale`` so that the default length
    parameter equals it.
    """
    if strategy.k != 2:
        raise ValueError("two-colour trials need k = 2")
    p = min(1.0, TWO_COLOUR_DENSITY / n)
    G = sample_gnp(n, p, seed)
    colours = colour_edges(G, strategy)
    if ell is not None:
        _, raw = default_params("two_colour", n)
        scale = ell / raw["ell"]
    res = ramsey_pipeline(G, colours, 2, "two_colour", scale=scale)
    params = {"n": n, "strategy": strategy.kind, "scale": scale}
    return _pipeline_record("ramsey2", seed, params, G, colours, 2, res, p)


def ramseyk_trial(n: int, k: int, c: float, seed: int, strategy: ColouringStrategy, *, scale: float = 1.0,
                  ell: float | None = None) -> TrialRecord:
    """Host ``G(k n, c log k / n)``, ``k`` colours, densest class pruned at ``d/4``."""
    if k < 2 or c <= 0:
        raise ValueError("need k >= 2 and c > 0")
    if strategy.k != k:
        strategy = ColouringStrategy(strategy.kind, k, strategy.seed)
    p = min(1.0, c * math.log(k) / n)
    G = sample_gnp(k * n, p, seed)
    colours = colour_edges(G, strategy)
    if ell is not None:
        _, raw = default_params("multi", k * n, k, c)
        scale = ell / raw["ell"]
    res = ramsey_pipeline(G, colours, k, "multi", c=c, scale=scale)
    params = {"n": n, "k": k, "c": c, "strategy": strategy.kind, "scale": scale}
    return _pipeline_record("ramseyk", seed, params, G, colours, k, res, p)


# sweeps -------------------------------------------------------------------------------


EXPERIMENTS = ("supercritical", "ramsey2", "ramseyk")
_GRID_KEYS = {
    "supercritical": {"n", "epsilon", "pi_mode"},
    "ramsey2": {"n", "strategy", "ell"},
    "ramseyk": {"n", "k", "c", "strategy", "ell"},
}
_TOP_KEYS = {"experiment", "grid", "seeds", "output", "scale"}


def _line_of(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def parse_config(text: str) -> dict:
    """Validate a sweep config; errors name the offending line."""
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("line 1: config must be a JSON object")
    for key in cfg:
        if key not in _TOP_KEYS:
            raise ConfigError(f"line {_line_of(text, key)}: unknown key {key!r}")
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"line {_line_of(text, 'experiment')}: experiment must be one of {', '.join(EXPERIMENTS)}")
    grid = cfg.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError(f"line {_line_of(text, 'grid')}: grid must map parameter names to lists")
    for key, values in grid.items():
        if key not in _GRID_KEYS[exp]:
            raise ConfigError(f"line {_line_of(text, key)}: {key!r} is not a {exp} parameter")
        if not isinstance(values, list):
            raise ConfigError(f"line {_line_of(text, key)}: values of {key!r} must be a list")
    seeds = cfg.get("seeds", 1)
    if isinstance(seeds, int) and not isinstance(seeds, bool) and seeds >= 0:
        seeds = list(range(seeds))
    elif not (isinstance(seeds, list) and all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds)):
        raise ConfigError(f"line {_line_of(text, 'seeds')}: seeds must be a count or a list of non-negative integers")
    scale = cfg.get("scale", 1.0)
    if not isinstance(scale, (int, float)) or isinstance(scale, bool) or scale <= 0:
        raise ConfigError(f"line {_line_of(text, 'scale')}: scale must be a positive number")
    output = cfg.get("output", {})
    if not isinstance(output, dict) or not set(output) <= {"csv", "json"}:
        raise ConfigError(f"line {_line_of(text, 'output')}: output takes optional 'csv' and 'json' paths")
    return {"experiment": exp, "grid": grid, "seeds": sorted(set(seeds)), "scale": float(scale), "output": output}


def _cells(grid: dict) -> list[dict]:
    if not grid or any(len(v) == 0 for v in grid.values()):
        return []
    keys = sorted(grid)
    cells = [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
    return sorted(cells, key=lambda c: json.dumps(c, sort_keys=True))


def _run_cell(exp: str, cell: dict, seed: int, scale: float) -> TrialRecord:
    if exp == "supercritical":
        cfg = SupercriticalConfig(n=int(cell.get("n", 1000)), epsilon=float(cell.get("epsilon", 0.1)),
                                  seeds=(seed,), pi_mode=cell.get("pi_mode", "identity"))
        return supercritical_trial(cfg, seed)
    strat = cell.get("strategy", "uniform_random")
    if exp == "ramsey2":
        return ramsey2_trial(int(cell.get("n", 10_000)), seed, ColouringStrategy(strat, 2, seed), scale=scale, ell=cell.get("ell"))
    k = int(cell.get("k", 2))
    return ramseyk_trial(int(cell.get("n", 1000)), k, float(cell.get("c", 100.0)), seed, ColouringStrategy(strat, k, seed),
                         scale=scale, ell=cell.get("ell"))


@dataclass
class SweepResult:
    rows: list[dict]
    summary: list[dict]
    metadata: dict

    def to_csv(self) -> str:
        return rows_to_csv(self.rows, self.metadata.get("columns"))

    def to_json(self) -> str:
        return json.dumps({"metadata": self.metadata, "cells": self.summary, "rows": self.rows}, sort_keys=True, indent=2)


def rows_to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    buf = io.StringIO()
    if columns is None:
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in columns})
    return buf.getvalue()


HEADER = {
    "supercritical": ["experiment", "seed", "n", "epsilon", "pi_mode", "max_U", "path_length", "excess_final", "s2_final",
                      "ut_queries_at_peak", "edge_count", "audit_failures", "certified"],
    "ramsey2": ["experiment", "seed", "n", "strategy", "scale", "max_U", "path_length", "s2_final", "edge_count", "certified",
                "status"],
    "ramseyk": ["experiment", "seed", "n", "k", "c", "strategy", "scale", "max_U", "path_length", "s2_final", "edge_count",
                "certified", "status"],
}


def sweep(config: dict | str, *, progress: Callable[[str], None] | None = None) -> SweepResult:
    """Run every (grid cell, seed) pair, ordered by cell then seed."""
    cfg = parse_config(config) if isinstance(config, str) else parse_config(json.dumps(config))
    exp = cfg["experiment"]
    rows, summary = [], []
    columns = None
    for cell in _cells(cfg["grid"]):
        records = []
        for seed in cfg["seeds"]:
            rec = _run_cell(exp, cell, seed, cfg["scale"])
            records.append(rec)
            row = rec.to_row()
            if columns is None:
                columns = list(row)
            rows.append(row)
            if progress:
                progress(f"{json.dumps(cell, sort_keys=True)} seed={seed} length={rec.path_length}")
        lengths = [r.path_length for r in records]
        verdicts = [r.verdicts for r in records]
        cell_summary = dict(cell)
        cell_summary.update(
            trials=len(records),
            median_path_length=statistics.median(lengths) if lengths else None,
            **{f"frac_{k}": sum(v[k] for v in verdicts) / len(verdicts) for k in (verdicts[0] if verdicts else {})},
        )
        summary.append(cell_summary)
    if columns is None:
        columns = HEADER[exp]
    metadata = {
        "experiment": exp,
        "grid": cfg["grid"],
        "seeds": cfg["seeds"],
        "scale": cfg["scale"],
        "version": __version__,
        "columns": columns,
        **generator_info(),
    }
    result = SweepResult(rows, summary, metadata)
    out = cfg["output"]
    if "csv" in out:
        with open(out["csv"], "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
    if "json" in out:
        with open(out["json"], "w", encoding="utf-8") as fh:
            fh.write(result.to_json())
    return result
