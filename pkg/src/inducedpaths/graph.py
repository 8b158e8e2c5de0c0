"""Simple undirected graphs on dense integer vertices.

Vertices are ``0..n-1``.  Adjacency is stored in CSR form (``indptr``,
``indices``) with each neighbour row sorted ascending, which keeps million
vertex hosts cheap to build and scan with numpy.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Rejected graph input (bad endpoint, self-loop, non-subgraph...)."""


class VertexSet:
    """Membership mask over ``0..n-1`` with a cached cardinality."""

    __slots__ = ("n", "mask", "_size")

    def __init__(self, n: int, members: Iterable[int] = ()):
        self.n = n
        self.mask = np.zeros(n, dtype=bool)
        idx = np.fromiter(members, dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= n:
                raise GraphError(f"vertex out of range 0..{n - 1}")
            self.mask[idx] = True
        self._size = int(self.mask.sum())

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> VertexSet:
        vs = cls.__new__(cls)
        vs.n = len(mask)
        vs.mask = np.asarray(mask, dtype=bool).copy()
        vs._size = int(vs.mask.sum())
        return vs

    def __len__(self) -> int:
        return self._size

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool(self.mask[v])

    def __iter__(self):
        return iter(np.flatnonzero(self.mask).tolist())

    def __eq__(self, other) -> bool:
        if isinstance(other, VertexSet):
            return self.n == other.n and np.array_equal(self.mask, other.mask)
        try:
            return set(self) == set(other)
        except TypeError:
            return NotImplemented

    def __repr__(self) -> str:
        items = list(self)
        body = ", ".join(map(str, items[:12])) + (", ..." if len(items) > 12 else "")
        return f"VertexSet(n={self.n}, {{{body}}})"

    def complement(self) -> VertexSet:
        return VertexSet.from_mask(~self.mask)

    def to_array(self) -> np.ndarray:
        return np.flatnonzero(self.mask)


def _as_mask(n: int, S) -> np.ndarray:
    if isinstance(S, VertexSet):
        if S.n != n:
            raise GraphError("vertex set built for a different vertex count")
        return S.mask
    return VertexSet(n, S).mask


class Graph:
    """Immutable simple graph.

    Build with :meth:`from_edge_list` or :meth:`from_arrays`; duplicate pairs
    are merged, self-loops and out-of-range endpoints raise :class:`GraphError`.
    """

    __slots__ = ("n", "indptr", "indices", "m", "_keys")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.m = int(len(indices) // 2)
        self._keys = None

    # construction ---------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_edge_list(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        arr = np.array([tuple(e) for e in edges], dtype=np.int64).reshape(-1, 2)
        return cls.from_arrays(n, arr[:, 0], arr[:, 1])

    @classmethod
    def from_arrays(cls, n: int, us, vs) -> Graph:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if n < 0:
            raise GraphError("negative vertex count")
        if us.size:
            lo = min(us.min(), vs.min())
            hi = max(us.max(), vs.max())
            if lo < 0 or hi >= n:
                raise GraphError(f"endpoint out of range 0..{n - 1}")
            if np.any(us == vs):
                v = int(us[us == vs][0])
                raise GraphError(f"self-loop at vertex {v}")
        a = np.minimum(us, vs)
        b = np.maximum(us, vs)
        keys = np.unique(a * n + b) if n else np.zeros(0, dtype=np.int64)
        return cls._from_keys(n, keys)

    @classmethod
    def _from_keys(cls, n: int, keys: np.ndarray) -> Graph:
        """Build from sorted unique keys ``u*n+v`` with ``u < v``."""
        if not len(keys):
            g = cls.empty(n)
            g._keys = keys.astype(np.int64)
            return g
        a = keys // n
        b = keys % n
        both = np.sort(np.concatenate([keys, b * n + a]))
        indices = both % n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both // n, minlength=n), out=indptr[1:])
        g = cls(n, indptr, indices)
        g._keys = keys
        return g

    # queries --------------------------------------------------------------

    def neighbours(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbours(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    def edge_keys(self) -> np.ndarray:
        """Sorted keys ``u*n+v`` (``u < v``), one per edge."""
        if self._keys is None:
            rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
            sel = rows < self.indices
            self._keys = rows[sel] * self.n + self.indices[sel]
        return self._keys

    def edge_array(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``(u, v)``, ``u < v``, lexicographic order."""
        keys = self.edge_keys()
        return np.stack([keys // self.n, keys % self.n], axis=1) if self.n else np.zeros((0, 2), np.int64)

    def edges(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edge_array().tolist()]

    def edge_index(self, u, v) -> np.ndarray:
        """Positions of edges ``(u, v)`` in :meth:`edge_array`; -1 when absent."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        key = np.minimum(u, v) * self.n + np.maximum(u, v)
        keys = self.edge_keys()
        pos = np.searchsorted(keys, key)
        ok = pos < len(keys)
        ok[ok] = keys[pos[ok]] == key[ok]
        return np.where(ok, pos, -1)

    def is_subgraph_of(self, other: Graph) -> bool:
        if self.n != other.n:
            return False
        if self.m == 0:
            return True
        return bool(np.all(other.edge_index(*self.edge_array().T) >= 0))

    def permuted(self, new_label: np.ndarray) -> Graph:
        """Copy with vertex ``v`` renamed to ``new_label[v]``."""
        new_label = np.asarray(new_label, dtype=np.int64)
        e = self.edge_array()
        return Graph.from_arrays(self.n, new_label[e[:, 0]], new_label[e[:, 1]])

    def adjacency_masks(self) -> list[int]:
        """Neighbourhoods as Python int bitmasks (small graphs only)."""
        masks = [0] * self.n
        for u, v in self.edge_array().tolist():
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def to_scipy(self) -> csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edge_keys(), other.edge_keys())

    def __hash__(self):
        return hash((self.n, self.edge_keys().tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # serialisation --------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"n": self.n, "edges": self.edge_array().tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> Graph:
        try:
            return cls.from_edge_list(int(data["n"]), data.get("edges", []))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"bad graph JSON: {exc}") from None

    def to_edge_list_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edge_array().tolist())
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> tuple[Graph, list[str] | None]:
    """Parse the ``n m`` / ``u v`` text format.

    Labels that are not integers in ``0..n-1`` are mapped to dense ids in
    order of first appearance; the original labels are returned alongside
    (``None`` when no mapping was needed).
    """
    rows = [ln.split() for ln in text.splitlines()]
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise GraphError("edge list must start with a 'n m' header line")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
    except ValueError:
        raise GraphError("header line must hold two integers") from None
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"header announces {m} edges, found {len(body)}")
    for lineno, r in enumerate(body, start=2):
        if len(r) != 2:
            raise GraphError(f"line {lineno}: expected 'u v'")
    tokens = [t for r in body for t in r]
    try:
        ints = [int(t) for t in tokens]
        dense = all(0 <= x < n for x in ints)
    except ValueError:
        dense = False
    if dense:
        pairs = np.array(ints, dtype=np.int64).reshape(-1, 2)
        return Graph.from_arrays(n, pairs[:, 0], pairs[:, 1]), None
    ids: dict[str, int] = {}
    for t in tokens:
        ids.setdefault(t, len(ids))
    labels = list(ids)
    size = max(n, len(labels))
    labels += [f"_{i}" for i in range(len(labels), size)]
    pairs = np.array([ids[t] for t in tokens], dtype=np.int64).reshape(-1, 2)
    return Graph.from_arrays(size, pairs[:, 0], pairs[:, 1]), labels


def load_graph(path: str | Path) -> tuple[Graph, list[str] | None]:
    """Read an edge-list or JSON (``{"n":..,"edges":[..]}``) graph file."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        return Graph.from_json_dict(data), None
    return parse_edge_list(text)


# operations -----------------------------------------------------------------


def excess(G: Graph) -> int:
    """Sum over components of ``|E(C)| - |V(C)| + 1``."""
    if G.n == 0:
        return 0
    ncomp, _ = connected_components(G.to_scipy(), directed=False)
    return G.m - G.n + int(ncomp)


def _gather_rows(G: Graph, verts: np.ndarray) -> np.ndarray:
    """Concatenated neighbour rows of ``verts``."""
    starts = G.indptr[verts]
    lens = G.indptr[verts + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return G.indices[offs + np.arange(total)]


def prune_min_degree(G: Graph, d: float) -> tuple[Graph, VertexSet]:
    """Repeatedly delete vertices of degree ``<= d``.

    Returns the surviving core relabelled to ``0..k-1`` (survivors keep their
    ascending order, so ``removed.complement().to_array()`` maps back) and the
    set of removed vertices.  The core is the unique maximal subgraph with
    minimum degree above ``d``, so removal order does not matter.
    """
    if d < 0:
        raise ValueError("threshold must be non-negative")
    deg = G.degrees.astype(np.int64)
    alive = np.ones(G.n, dtype=bool)
    frontier = np.flatnonzero(deg <= d)
    while frontier.size:
        rem = frontier[alive[frontier] & (deg[frontier] <= d)]
        if not rem.size:
            break
        alive[rem] = False
        nb = _gather_rows(G, rem)
        nb = nb[alive[nb]]
        if not nb.size:
            break
        deg -= np.bincount(nb, minlength=G.n)
        frontier = np.unique(nb[deg[nb] <= d])
    core, _ = induced_subgraph(G, VertexSet.from_mask(alive))
    return core, VertexSet.from_mask(~alive)


def induced_subgraph(G: Graph, S) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``S`` relabelled to ``0..|S|-1``; returns ``(H, old_labels)``."""
    mask = _as_mask(G.n, S)
    keep = np.flatnonzero(mask)
    new = np.full(G.n, -1, dtype=np.int64)
    new[keep] = np.arange(len(keep))
    e = G.edge_array()
    sel = mask[e[:, 0]] & mask[e[:, 1]]
    e = e[sel]
    # relabelling is monotone, so keys stay sorted and unique
    k = len(keep)
    keys = new[e[:, 0]] * k + new[e[:, 1]]
    return Graph._from_keys(k, keys.astype(np.int64)), keep


def external_neighbourhood(G: Graph, S) -> VertexSet:
    """Vertices outside ``S`` with at least one neighbour in ``S``."""
    mask = _as_mask(G.n, S)
    out = np.zeros(G.n, dtype=bool)
    out[_gather_rows(G, np.flatnonzero(mask))] = True
    out &= ~mask
    return VertexSet.from_mask(out)


def is_path_in_gprime_induced_in_g(Gp: Graph, G: Graph, seq: Sequence[int], *, validate: bool = True) -> bool:
    """True iff ``seq`` is a path of ``Gp`` whose vertex set induces exactly
    that path in ``G``.  Empty and one-vertex sequences are length-0 paths."""
    if validate and not Gp.is_subgraph_of(G):
        raise GraphError("Gp must be a subgraph of G on the same vertex set")
    seq = [int(v) for v in seq]
    if any(v < 0 or v >= G.n for v in seq):
        raise GraphError("sequence vertex out of range")
    if len(set(seq)) != len(seq):
        return False
    pos = {v: i for i, v in enumerate(seq)}
    for i, v in enumerate(seq):
        if i + 1 < len(seq) and not Gp.has_edge(v, seq[i + 1]):
            return False
        for w in G.neighbours(v).tolist():
            j = pos.get(w)
            if j is not None and abs(i - j) != 1:
                return False
    return True
