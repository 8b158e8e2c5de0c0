"""Edge-query answering for the induced-path search.

A :class:`QuerySource` answers "is ``{a, b}`` an edge?" either from a pair of
fixed graphs ``Gp ⊆ G`` or generatively, by revealing each pair of ``G(n, p)``
with a fresh Bernoulli variable the first time it is asked about.  Every
answer lands in a query ledger so that repeated questions get the recorded
answer.

The search asks in two bulk shapes (scan the unvisited set for a neighbour of
the stack top; scan the stack for a neighbour of a candidate).  For those the
ledger is kept implicitly, as scan positions plus stack membership intervals,
instead of one entry per pair; that is what lets a generative run over
``10**5`` vertices decide ~``10**10`` pairs.  :meth:`QuerySource.lookup`
answers from the implicit ledger and from the explicit per-pair side ledger
alike.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import NamedTuple

import numpy as np

from .graph import Graph, GraphError

GENERATOR_NAME = "numpy.random.PCG64"
INF = 1 << 62


def generator_info() -> dict:
    return {"generator": GENERATOR_NAME, "numpy": np.__version__}


class LedgerEntry(NamedTuple):
    in_eprime: bool
    in_e: bool


# pair indexing ----------------------------------------------------------------


def pairs_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major index of pairs ``u < v``."""
    idx = np.asarray(idx, dtype=np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(float(b) * b - 8.0 * idx)) / 2).astype(np.int64)
    u = np.clip(u, 0, max(n - 2, 0))

    def row_start(r):
        return r * (2 * n - r - 1) // 2

    for _ in range(2):
        u = np.where(row_start(u + 1) <= idx, u + 1, u)
        u = np.where(row_start(u) > idx, u - 1, u)
    v = idx - row_start(u) + u + 1
    return u, v


def gnp_pair_indices(N: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices in ``0..N-1`` kept independently with probability ``p``, ascending."""
    if N <= 0 or p <= 0.0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(N, dtype=np.int64)
    chunks = []
    last = -1
    while True:
        mean = (N - 1 - last) * p
        size = int(mean + 6.0 * math.sqrt(mean) + 64)
        idx = last + np.cumsum(rng.geometric(p, size=size), dtype=np.int64)
        if idx[-1] >= N:
            chunks.append(idx[idx < N])
            break
        chunks.append(idx)
        last = int(idx[-1])
    return np.concatenate(chunks)


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """``G(n, p)`` with pairs decided in canonical ``(u, v)`` order."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    N = n * (n - 1) // 2
    u, v = pairs_from_index(gnp_pair_indices(N, p, rng), n)
    return Graph._from_keys(n, u * n + v)


# Bernoulli stream ---------------------------------------------------------------


class BernoulliStream:
    """Seeded i.i.d. Bernoulli(``p``) variables.

    Draws come from a buffered block of uniforms.  ``skip(limit)`` resolves a
    run of up to ``limit`` variables at once from a single uniform (inverse
    geometric), which is how long negative scans stay cheap.  ``index`` counts
    Bernoulli variables resolved so far.
    """

    def __init__(self, seed: int, p: float, block: int = 4096):
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        self.seed = int(seed)
        self.p = float(p)
        self.index = 0
        search_seq, bulk_seq = np.random.SeedSequence(self.seed).spawn(2)
        self._rng = np.random.Generator(np.random.PCG64(search_seq))
        self.bulk_rng = np.random.Generator(np.random.PCG64(bulk_seq))
        self._block = block
        self._buf: list[float] = []
        self._k = 0
        self._log_q = math.log1p(-self.p) if 0.0 < self.p < 1.0 else None

    def _uniform(self) -> float:
        if self._k == len(self._buf):
            self._buf = (1.0 - self._rng.random(self._block)).tolist()
            self._k = 0
        u = self._buf[self._k]
        self._k += 1
        return u

    def draw(self) -> bool:
        self.index += 1
        return self._uniform() <= self.p

    def skip(self, limit: int) -> tuple[int, bool]:
        """Resolve variables until the first success, looking at most ``limit``.

        Returns ``(failures, True)`` when a success comes after ``failures``
        failures (``failures < limit``), else ``(limit, False)``.
        """
        if limit <= 0:
            return 0, False
        if self.p >= 1.0:
            self.index += 1
            return 0, True
        if self.p <= 0.0:
            self.index += limit
            return limit, False
        g = math.log(self._uniform()) / self._log_q
        if g < limit:
            k = int(g)
            self.index += k + 1
            return k, True
        self.index += limit
        return limit, False


# query sources --------------------------------------------------------------------


class QuerySource:
    """Base class; build with :meth:`fixed` or :meth:`generative`.

    Public methods take vertex labels.  Methods prefixed ``_`` work in search
    positions (the rank of a vertex in the search ordering) and are driven by
    :mod:`inducedpaths.dfs`.
    """

    mode = "abstract"

    def __init__(self, n: int, pairwise: bool = False):
        self.n = n
        self.new_queries = 0
        self.ut_queries = 0
        self.pairwise = pairwise
        self.finalized = False
        self._side: dict[int, LedgerEntry] = {}
        self._state = None
        self._pi: list[int] | None = None
        self._pinv: list[int] | None = None
        self._final_keys: set[int] | None = None

    @staticmethod
    def fixed(Gp: Graph, G: Graph, *, pairwise: bool = False) -> FixedSource:
        return FixedSource(Gp, G, pairwise=pairwise)

    @staticmethod
    def generative(n: int, p: float, seed: int, *, pairwise: bool = False) -> GenerativeSource:
        return GenerativeSource(n, BernoulliStream(seed, p), pairwise=pairwise)

    # binding to a search ----------------------------------------------------

    def bind(self, state) -> None:
        if self._state is state:
            return
        if self._state is not None:
            raise RuntimeError("a query source serves a single search run")
        if state.n != self.n:
            raise ValueError("search and source disagree on the vertex count")
        if self.finalized:
            raise RuntimeError("source already finalized")
        self._state = state
        self._pi = state.order.pi
        self._pinv = state.order.inverse
        if self._side:
            # re-key side entries from labels to positions
            n = self.n
            moved = {}
            for key, entry in self._side.items():
                a, b = self._pinv[key // n], self._pinv[key % n]
                moved[min(a, b) * n + max(a, b)] = entry
            self._side = moved
        self._hist_r: list[list[int]] = [[] for _ in range(self.n)]
        self._hist_p: list[list[int]] = [[] for _ in range(self.n)]
        self._stop = [-1] * self.n
        self._on_bind()

    def _on_bind(self) -> None:
        pass

    def _to_pos(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range")
        return self._pinv[v] if self._pinv is not None else v

    def _to_label(self, x: int) -> int:
        return self._pi[x] if self._pi is not None else x

    # ledger -----------------------------------------------------------------

    def _scan_pos_at(self, a: int, rnd: int) -> int:
        hr = self._hist_r[a]
        j = bisect_right(hr, rnd)
        return self._hist_p[a][j - 1] if j else 0

    def _queried_implicit(self, x: int, y: int) -> bool:
        st = self._state
        ex = st.exit_round
        for a, b in ((x, y), (y, x)):
            # b still unvisited when a's scan went past it
            if self._hist_r[a] and self._scan_pos_at(a, ex[b]) > b:
                return True
            # a was a candidate checked against the stack, b among those checked
            stop = self._stop[a]
            if stop >= 0 and b <= stop and b != st.parent[a]:
                r = ex[a]
                if st.u_enter[b] < r < st.u_leave[b]:
                    return True
        return False

    def _lookup(self, a: int, b: int) -> LedgerEntry | None:
        if a > b:
            a, b = b, a
        key = a * self.n + b
        if self._final_keys is not None:
            hit = key in self._final_keys
            return self._final_entry(a, b, hit)
        entry = self._side.get(key)
        if entry is not None:
            return entry
        if self._state is not None and self._queried_implicit(a, b):
            return self._recorded_answer(a, b)
        return None

    def lookup(self, u: int, v: int) -> LedgerEntry | None:
        """Recorded answer for the pair, or ``None`` if never queried."""
        return self._lookup(self._to_pos(u), self._to_pos(v))

    def _final_entry(self, a: int, b: int, hit: bool) -> LedgerEntry:
        return LedgerEntry(hit, hit)

    def _recorded_answer(self, a: int, b: int) -> LedgerEntry:
        raise NotImplementedError

    def _fresh_answer(self, a: int, b: int) -> LedgerEntry:
        raise NotImplementedError

    def _note_positive(self, a: int, b: int) -> None:
        pass

    # per-pair queries -----------------------------------------------------------

    def _query_pos(self, a: int, b: int, eprime: bool, context: str) -> bool:
        if a == b:
            raise ValueError("a pair needs two distinct vertices")
        entry = self._lookup(a, b)
        if entry is None:
            entry = self._fresh_answer(a, b)
            lo, hi = (a, b) if a < b else (b, a)
            self._side[lo * self.n + hi] = entry
            self.new_queries += 1
            if context == "step2":
                self.ut_queries += 1
            if entry.in_e:
                self._note_positive(lo, hi)
        return entry.in_eprime if eprime else entry.in_e

    def query_eprime(self, u: int, t: int, context: str = "step2") -> bool:
        """Is ``{u, t}`` an edge of ``Gp``?  A fresh pair asked with
        ``context="step2"`` also counts towards ``ut_queries``."""
        return self._query_pos(self._to_pos(u), self._to_pos(t), True, context)

    def query_e(self, t: int, u2: int, context: str = "step3") -> bool:
        """Is ``{t, u2}`` an edge of ``G``?"""
        return self._query_pos(self._to_pos(t), self._to_pos(u2), False, context)

    # bulk scans used by the search -----------------------------------------------

    def _scan_t(self, u: int, start: int, rnd: int) -> int:
        """First unvisited ``t >= start`` with ``{u, t}`` in ``Gp``, or -1.

        Records the scan in the ledger; the caller sets ``scan_pos[u]``
        (``t + 1`` on a hit, ``n`` otherwise).
        """
        if self.pairwise or self._side:
            t = self._scan_t_pairwise(u, start)
        else:
            t = self._scan_t_fast(u, start)
        self._hist_r[u].append(rnd)
        self._hist_p[u].append(t + 1 if t >= 0 else self.n)
        return t

    def _scan_t_pairwise(self, u: int, start: int) -> int:
        tree = self._state.tree
        rank = tree.prefix(start) + 1
        while rank <= tree.total:
            t = tree.select(rank)
            if self._query_pos(u, t, True, "step2"):
                return t
            rank += 1
        return -1

    def _scan_u(self, t: int, rnd: int) -> bool:
        """Does candidate ``t`` have a ``G``-neighbour on the stack below its
        parent?  Scans in search order and stops at the first positive."""
        if self.pairwise or self._side:
            stop = self._scan_u_pairwise(t)
        else:
            stop = self._scan_u_fast(t)
        self._stop[t] = stop if stop >= 0 else self.n
        return stop >= 0

    def _scan_u_pairwise(self, t: int) -> int:
        for w in sorted(self._state.stack[:-1]):
            if self._query_pos(t, w, False, "step3"):
                return w
        return -1

    def _fresh_below(self, t: int) -> int:
        # a non-top stack vertex has scanned up to its child, so it has seen
        # t exactly when that child precedes t
        return self._state.stree.prefix(t)

    def _fresh_upto(self, t: int, stop: int) -> int:
        st = self._state
        s = st.stack_np[:len(st.stack)]
        return int(np.count_nonzero((s[1:] < t) & (s[:-1] <= stop)))

    def _scan_t_fast(self, u: int, start: int) -> int:
        raise NotImplementedError

    def _scan_u_fast(self, t: int) -> int:
        raise NotImplementedError

    def finalize(self) -> Graph:
        raise NotImplementedError

    @property
    def total_pairs(self) -> int:
        return self.n * (self.n - 1) // 2


class FixedSource(QuerySource):
    """Answers from fixed graphs ``Gp ⊆ G`` on the same vertex set."""

    mode = "fixed"

    def __init__(self, Gp: Graph, G: Graph, *, pairwise: bool = False):
        if Gp.n != G.n or not Gp.is_subgraph_of(G):
            raise GraphError("Gp must be a subgraph of G on the same vertex set")
        super().__init__(G.n, pairwise)
        self.Gp = Gp
        self.G = G

    def _on_bind(self) -> None:
        order = self._state.order
        if order.is_identity:
            gp, g = self.Gp, self.G
        else:
            gp = self.Gp.permuted(order.inverse)
            g = self.G.permuted(order.inverse)
        self._gp = gp
        self._g = g
        self._gp_ptr = gp.indptr[:-1].tolist()
        self._gp_end = gp.indptr[1:].tolist()
        self._gp_ind = gp.indices.tolist()
        self._g_indptr = g.indptr.tolist()
        self._g_ind = g.indices.tolist()

    def _answer_pos(self, a: int, b: int) -> LedgerEntry:
        if self._state is None:
            return LedgerEntry(self.Gp.has_edge(a, b), self.G.has_edge(a, b))
        return LedgerEntry(self._gp.has_edge(a, b), self._g.has_edge(a, b))

    _recorded_answer = _answer_pos
    _fresh_answer = _answer_pos

    def _final_entry(self, a: int, b: int, hit: bool) -> LedgerEntry:
        return self._answer_pos(a, b)

    def _scan_t_fast(self, u: int, start: int) -> int:
        st = self._state
        status = st.status
        ind = self._gp_ind
        i = self._gp_ptr[u]
        end = self._gp_end[u]
        while i < end:
            w = ind[i]
            if w >= start and status[w] == 0:
                break
            i += 1
        tree = st.tree
        before = tree.prefix(start)
        if i < end:
            self._gp_ptr[u] = i + 1
            scanned = tree.prefix(w + 1) - before
        else:
            self._gp_ptr[u] = end
            w = -1
            scanned = tree.total - before
        self.new_queries += scanned
        self.ut_queries += scanned
        return w

    def _scan_u_fast(self, t: int) -> int:
        st = self._state
        status = st.status
        parent = st.parent[t]
        best = INF
        ind = self._g_ind
        for i in range(self._g_indptr[t], self._g_indptr[t + 1]):
            w = ind[i]
            if status[w] == 1 and w != parent and w < best:
                best = w
        if best == INF:
            self.new_queries += self._fresh_below(t)
            return -1
        self.new_queries += self._fresh_upto(t, best)
        return best

    def finalize(self) -> Graph:
        self.new_queries = self.total_pairs
        self.finalized = True
        self._final_keys = set()
        return self.G


class GenerativeSource(QuerySource):
    """Reveals ``G(n, p)`` on the fly; ``Gp = G``."""

    mode = "generative"

    def __init__(self, n: int, stream: BernoulliStream, *, pairwise: bool = False):
        super().__init__(n, pairwise)
        self.stream = stream
        self.p = stream.p
        self._positive: set[int] = set()
        # exposed edges in discovery order, as search positions
        self.positives: list[tuple[int, int]] = []
        self.final_graph: Graph | None = None

    @property
    def seed(self) -> int:
        return self.stream.seed

    def _note_positive(self, a: int, b: int) -> None:
        self._positive.add(a * self.n + b)
        self.positives.append((a, b))

    def _add_positive(self, a: int, b: int) -> None:
        if a > b:
            a, b = b, a
        self._note_positive(a, b)

    def _recorded_answer(self, a: int, b: int) -> LedgerEntry:
        hit = (a * self.n + b) in self._positive
        return LedgerEntry(hit, hit)

    def _fresh_answer(self, a: int, b: int) -> LedgerEntry:
        hit = self.stream.draw()
        return LedgerEntry(hit, hit)

    def _scan_t_fast(self, u: int, start: int) -> int:
        tree = self._state.tree
        before = tree.prefix(start)
        remaining = tree.total - before
        k, hit = self.stream.skip(remaining)
        if hit:
            t = tree.select(before + k + 1)
            self.new_queries += k + 1
            self.ut_queries += k + 1
            self._add_positive(u, t)
            return t
        self.new_queries += remaining
        self.ut_queries += remaining
        return -1

    def _scan_u_fast(self, t: int) -> int:
        fresh = self._fresh_below(t)
        k, hit = self.stream.skip(fresh)
        if not hit:
            self.new_queries += fresh
            return -1
        st = self._state
        s = st.stack_np[:len(st.stack)]
        cands = np.sort(s[:-1][s[1:] < t])
        w = int(cands[k])
        self.new_queries += k + 1
        self._add_positive(t, w)
        return w

    def exposed_graph(self) -> Graph:
        """Edges revealed so far, in vertex labels."""
        if not self.positives:
            return Graph.empty(self.n)
        arr = np.array(self.positives, dtype=np.int64)
        if self._pi is not None:
            pi = np.asarray(self._pi, dtype=np.int64)
            arr = pi[arr]
        return Graph.from_arrays(self.n, arr[:, 0], arr[:, 1])

    def finalize(self) -> Graph:
        """Decide every pair not queried yet and return the whole graph."""
        if self.final_graph is not None:
            return self.final_graph
        n = self.n
        N = self.total_pairs
        fresh = gnp_pair_indices(N, self.p, self.stream.bulk_rng)
        us, vs = pairs_from_index(fresh, n)
        keep = [a * n + b for a, b in zip(us.tolist(), vs.tolist()) if self._lookup(a, b) is None]
        keys = np.array(sorted(self._positive.union(keep)), dtype=np.int64)
        self.stream.index += N - self.new_queries
        self.new_queries = N
        self.finalized = True
        self._final_keys = set(keys.tolist())
        if self._pi is not None:
            pi = np.asarray(self._pi, dtype=np.int64)
            g = Graph.from_arrays(n, pi[keys // n], pi[keys % n]) if n else Graph.empty(0)
        else:
            g = Graph._from_keys(n, keys)
        self.final_graph = g
        return g
