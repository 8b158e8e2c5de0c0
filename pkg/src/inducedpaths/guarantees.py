"""Local-density / expansion hypotheses and certified path extraction.

If ``G`` is locally sparse (every set of fewer than ``s1 + s2 + ell``
vertices spans fewer than ``2 s2`` edges) and ``Gp ⊆ G`` expands (every
``s1``-set has at least ``s2 + ell`` external ``Gp``-neighbours), the search
stopped at the first moment ``|S1| = s1`` or ``|S2| = s2`` holds a stack of at
least ``ell + 1`` vertices.  Here the two hypotheses are exact brute-force
checkers (small graphs only) and the path finder certifies what it returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .dfs import VertexOrdering, dfs_run, stop_when
from .graph import Graph, GraphError, induced_subgraph, is_path_in_gprime_induced_in_g, prune_min_degree
from .sources import FixedSource

EXACT_LIMIT = 25
TWO_COLOUR_PRUNE = 16


class HypothesesViolated(RuntimeError):
    """The search stopped without a long enough stack (or could not start)."""

    def __init__(self, message: str, sizes: dict):
        super().__init__(f"{message} {sizes}")
        self.sizes = sizes


@dataclass(frozen=True)
class GuaranteeParams:
    s1: int
    s2: int
    ell: int

    def __post_init__(self):
        for name in ("s1", "s2", "ell"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def total(self) -> int:
        return self.s1 + self.s2 + self.ell


@dataclass
class CheckResult:
    status: Literal["pass", "fail", "undecided"]
    witness: tuple[int, ...] | None = None
    value: int | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"status": self.status, "witness": list(self.witness) if self.witness else None, "value": self.value}


def check_local_density(G: Graph, size_cap: int, edge_cap: int, *, limit: int = EXACT_LIMIT) -> CheckResult:
    """Do all sets with fewer than ``size_cap`` vertices span fewer than
    ``edge_cap`` edges?

    Exhaustive: spanned edges only grow with the set, so it is enough to
    enumerate sets of size ``min(size_cap - 1, n)``.
    """
    n = G.n
    if n > limit:
        return CheckResult("undecided")
    k = min(size_cap - 1, n)
    if k <= 0 or edge_cap <= 0:
        return CheckResult("pass" if edge_cap > 0 else "fail", () if edge_cap <= 0 else None, 0)
    adj = G.adjacency_masks()
    chosen: list[int] = []

    def rec(start: int, mask: int, edges: int):
        if len(chosen) == k:
            return tuple(chosen) if edges >= edge_cap else None
        for v in range(start, n - (k - len(chosen)) + 1):
            chosen.append(v)
            found = rec(v + 1, mask | (1 << v), edges + (adj[v] & mask).bit_count())
            chosen.pop()
            if found:
                return found
        return None

    witness = rec(0, 0, 0)
    if witness:
        return CheckResult("fail", witness, _spanned(adj, witness))
    return CheckResult("pass")


def _spanned(adj: list[int], verts) -> int:
    mask = 0
    for v in verts:
        mask |= 1 << v
    return sum((adj[v] & mask).bit_count() for v in verts) // 2


def check_expansion(Gp: Graph, s1: int, need: int, *, limit: int = EXACT_LIMIT) -> CheckResult:
    """Does every set of exactly ``s1`` vertices have ``>= need`` external
    ``Gp``-neighbours?  Exhaustive over all ``s1``-sets."""
    n = Gp.n
    if n > limit:
        return CheckResult("undecided")
    if s1 > n:
        return CheckResult("pass")
    adj = Gp.adjacency_masks()
    chosen: list[int] = []

    def rec(start: int, mask: int, reach: int):
        if len(chosen) == s1:
            size = (reach & ~mask).bit_count()
            return (tuple(chosen), size) if size < need else None
        for v in range(start, n - (s1 - len(chosen)) + 1):
            chosen.append(v)
            found = rec(v + 1, mask | (1 << v), reach | adj[v])
            chosen.pop()
            if found:
                return found
        return None

    found = rec(0, 0, 0)
    if found:
        return CheckResult("fail", found[0], found[1])
    return CheckResult("pass")


def _guaranteed_run(Gp: Graph, G: Graph, params: GuaranteeParams, pi: VertexOrdering | None):
    if Gp.n != G.n or not Gp.is_subgraph_of(G):
        raise GraphError("Gp must be a subgraph of G on the same vertex set")
    n = G.n
    if n < params.total:
        raise HypothesesViolated("vertex count below s1 + s2 + ell", {"n": n, "needed": params.total})
    rule = stop_when(s1=params.s1, s2=params.s2, path_vertices=params.ell + 1)
    rec = dfs_run(n, pi, FixedSource(Gp, G), rule)
    path = rec.final_path
    if len(path) < params.ell + 1:
        raise HypothesesViolated(
            "search stopped with a short stack",
            {"U": rec.u_size, "S1": rec.s1_size, "S2": rec.s2_size, "stop": rec.stop_reason},
        )
    if not is_path_in_gprime_induced_in_g(Gp, G, path, validate=False):
        raise AssertionError("stack failed its induced-path certificate")
    return path, rec


def find_induced_path_guaranteed(Gp: Graph, G: Graph, params: GuaranteeParams,
                                 pi: VertexOrdering | None = None) -> list[int]:
    """Path of ``Gp`` with at least ``params.ell`` edges, induced in ``G``.

    Stops at ``|S1| = s1``, ``|S2| = s2`` or as soon as the stack holds
    ``ell + 1`` vertices.  Raises :class:`HypothesesViolated` when the stack
    is too short at that point, which cannot happen if both hypotheses hold.
    """
    return _guaranteed_run(Gp, G, params, pi)[0]


# colour-class pipeline -------------------------------------------------------------


def default_params(mode: str, n_host: int, k: int = 2, c: float | None = None, scale: float = 1.0) -> tuple[GuaranteeParams, dict]:
    """Default ``(s1, s2, ell)`` scaled by ``scale``, plus the unrounded values.

    two_colour: ``ell = 7 n / 10**7``, ``s1 = 3 ell``, ``s2 = 24 ell``.
    multi: with ``n = n_host / k`` and ``L = ln k``,
    ``ell = s1 = n / (c**3 k L**3)``, ``s2 = n / (c**3 k L**2)``.
    """
    if mode == "two_colour":
        ell = 7 * n_host / 1e7 * scale
        raw = {"s1": 3 * ell, "s2": 24 * ell, "ell": ell}
    elif mode == "multi":
        if c is None or k < 2:
            raise ValueError("multi mode needs c and k >= 2")
        n = n_host / k
        L = math.log(k)
        ell = n / (c ** 3 * k * L ** 3) * scale
        raw = {"s1": ell, "s2": n / (c ** 3 * k * L ** 2) * scale, "ell": ell}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rounded = {key: max(1, int(round(v))) for key, v in raw.items()}
    return GuaranteeParams(**rounded), raw


def scale_for_ell(target_ell: float, mode: str, n_host: int, k: int = 2, c: float | None = None) -> float:
    """Scale factor making the default ``ell`` equal ``target_ell``."""
    _, raw = default_params(mode, n_host, k, c, 1.0)
    return target_ell / raw["ell"]


def prune_threshold(mode: str, k: int = 2, c: float | None = None) -> float:
    if mode == "two_colour":
        return TWO_COLOUR_PRUNE
    return c * math.log(k) / 2 / 4


@dataclass
class PipelineResult:
    status: str
    colour: int
    params: GuaranteeParams | None
    path: list[int] | None
    certified: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def path_length(self) -> int:
        return len(self.path) - 1 if self.path else 0


def colour_class_graph(G: Graph, colouring: np.ndarray, colour: int) -> Graph:
    e = G.edge_array()[np.asarray(colouring) == colour]
    return Graph.from_arrays(G.n, e[:, 0], e[:, 1])


def is_monochromatic_path(G: Graph, colouring: np.ndarray, path: list[int], colour: int) -> bool:
    if len(path) < 2:
        return True
    idx = G.edge_index(path[:-1], path[1:])
    if np.any(idx < 0):
        return False
    return bool(np.all(np.asarray(colouring)[idx] == colour))


def ramsey_pipeline(
    G: Graph,
    colouring,
    k: int,
    mode: str = "two_colour",
    *,
    c: float | None = None,
    scale: float = 1.0,
    params: GuaranteeParams | None = None,
    pi: VertexOrdering | None = None,
) -> PipelineResult:
    """Pick the largest colour class, strip low degrees, certify a path.

    ``colouring`` holds one colour in ``0..k-1`` per edge of ``G`` in
    :meth:`Graph.edge_array` order; ties between classes go to the lowest
    colour.  The returned path (host labels) is checked to be monochromatic,
    a path of the pruned class graph and induced in ``G``.
    """
    colours = np.asarray(colouring, dtype=np.int64)
    if colours.shape != (G.m,):
        raise ValueError("colouring must give one colour per edge")
    if G.m and (colours.min() < 0 or colours.max() >= k):
        raise ValueError(f"colours must lie in 0..{k - 1}")
    counts = np.bincount(colours, minlength=k)
    colour = int(np.argmax(counts))
    full = colour_class_graph(G, colours, colour)
    w1 = np.flatnonzero(full.degrees > 0)
    g1, _ = induced_subgraph(full, w1)
    threshold = prune_threshold(mode, k, c)
    core, removed = prune_min_degree(g1, threshold)
    w = w1[~removed.mask]
    host, _ = induced_subgraph(G, w)
    if params is None:
        params, raw = default_params(mode, G.n, k, c, scale)
    else:
        raw = {"s1": params.s1, "s2": params.s2, "ell": params.ell}
    diag = {
        "mode": mode,
        "k": k,
        "colour": colour,
        "class_edges": counts.tolist(),
        "host": {"n": G.n, "m": G.m},
        "class_graph": {"n": g1.n, "m": g1.m},
        "pruned": {"n": core.n, "m": core.m, "min_degree": int(core.degrees.min()) if core.n else None},
        "prune_threshold": threshold,
        "params": {"s1": params.s1, "s2": params.s2, "ell": params.ell, "scale": scale, "raw": raw},
    }
    if core.n < params.total:
        diag["reason"] = f"pruned graph has {core.n} < s1 + s2 + ell = {params.total} vertices"
        return PipelineResult("too_small", colour, params, None, False, diag)
    try:
        local, rec = _guaranteed_run(core, host, params, pi)
    except HypothesesViolated as exc:
        diag["reason"] = str(exc)
        diag["run"] = exc.sizes
        return PipelineResult("hypotheses_violated", colour, params, None, False, diag)
    path = w[np.asarray(local, dtype=np.int64)].tolist()
    verdicts = {
        "monochromatic": is_monochromatic_path(G, colours, path, colour),
        "path_in_pruned": all(core.has_edge(a, b) for a, b in zip(local, local[1:])),
        "induced_in_host": is_path_in_gprime_induced_in_g(G, G, path, validate=False),
        "length_ok": len(path) - 1 >= params.ell,
    }
    diag["run"] = {"stop": rec.stop_reason, "U": rec.u_size, "S1": rec.s1_size, "S2": rec.s2_size, "rounds": rec.rounds}
    diag["certificate"] = verdicts
    return PipelineResult("ok", colour, params, path, all(verdicts.values()), diag)
