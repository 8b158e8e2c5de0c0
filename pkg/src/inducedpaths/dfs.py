"""Depth-first search that keeps its stack an induced path.

The search partitions the vertices into the stack ``U``, the unvisited set
``T`` and two discard piles ``S1``/``S2``.  Each round does one move:

* ``STEP1``  -- empty stack: push the first unvisited vertex;
* ``STEP3A`` -- the top ``u`` has a ``Gp``-neighbour ``t`` in ``T`` with no
  ``G``-neighbour lower on the stack: push ``t``;
* ``STEP3B`` -- same, but ``t`` does see the stack below ``u``: ``t`` goes to ``S2``;
* ``STEP4``  -- ``u`` has no ``Gp``-neighbour left in ``T``: pop it into ``S1``.

Internally vertices are handled by their rank in the ordering ``pi``
("positions"), so "scan in ``pi`` order" is "scan in increasing position".
Everything public speaks vertex labels.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from ._fenwick import Fenwick
from .graph import Graph, VertexSet, excess, is_path_in_gprime_induced_in_g
from .sources import INF, FixedSource, GenerativeSource, QuerySource

IN_T, IN_U, IN_S1, IN_S2 = 0, 1, 2, 3


class Step(str, Enum):
    STEP1 = "step1"
    STEP3A = "step3a"
    STEP3B = "step3b"
    STEP4 = "step4"


class TerminalStateError(RuntimeError):
    pass


class VertexOrdering:
    """A permutation ``pi`` (position -> vertex) with its inverse."""

    __slots__ = ("pi", "inverse", "is_identity")

    def __init__(self, pi):
        pi = [int(v) for v in pi]
        n = len(pi)
        inverse = [-1] * n
        for pos, v in enumerate(pi):
            if not 0 <= v < n or inverse[v] != -1:
                raise ValueError("ordering must be a permutation of 0..n-1")
            inverse[v] = pos
        self.pi = pi
        self.inverse = inverse
        self.is_identity = all(v == i for i, v in enumerate(pi))

    @classmethod
    def identity(cls, n: int) -> VertexOrdering:
        return cls(range(n))

    @classmethod
    def shuffled(cls, n: int, seed: int) -> VertexOrdering:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x5EED])))
        return cls(rng.permutation(n).tolist())

    def __len__(self) -> int:
        return len(self.pi)


class DfsState:
    """Mutable search state over positions ``0..n-1``."""

    def __init__(self, n: int, order: VertexOrdering):
        if len(order) != n:
            raise ValueError("ordering length differs from n")
        self.n = n
        self.order = order
        self.status = [IN_T] * n
        self.stack: list[int] = []
        self.stack_np = np.zeros(max(n, 1), dtype=np.int64)
        self.tree = Fenwick(n, fill=1)
        # stack members other than the bottom one
        self.stree = Fenwick(n)
        self.scan_pos = [0] * n
        self.parent = [-1] * n
        self.exit_round = [INF] * n
        self.u_enter = [INF] * n
        self.u_leave = [INF] * n
        self.s1_size = 0
        self.s2_size = 0
        self.round = 0
        self.max_u = 0
        self.best: list[int] = []
        self.last = -1  # position moved by the latest round
        self.source: QuerySource | None = None

    @property
    def u_size(self) -> int:
        return len(self.stack)

    @property
    def t_size(self) -> int:
        return self.tree.total

    @property
    def explored(self) -> int:
        return self.n - self.tree.total

    @property
    def is_terminal(self) -> bool:
        return not self.stack and self.tree.total == 0

    @property
    def U(self) -> list[int]:
        """Stack contents as vertex labels, bottom to top."""
        pi = self.order.pi
        return [pi[x] for x in self.stack]

    def _labels_with(self, code: int) -> VertexSet:
        pi = self.order.pi
        return VertexSet(self.n, (pi[x] for x, s in enumerate(self.status) if s == code))

    @property
    def T(self) -> VertexSet:
        return self._labels_with(IN_T)

    @property
    def S1(self) -> VertexSet:
        return self._labels_with(IN_S1)

    @property
    def S2(self) -> VertexSet:
        return self._labels_with(IN_S2)

    def sizes(self) -> dict:
        return {"U": self.u_size, "T": self.t_size, "S1": self.s1_size, "S2": self.s2_size}

    def _push(self, v: int) -> None:
        if self.stack:
            self.stree.add(v, 1)
        self.stack_np[len(self.stack)] = v
        self.stack.append(v)
        if len(self.stack) > self.max_u:
            self.max_u = len(self.stack)
            self.best = list(self.stack)


def dfs_init(n: int, pi: VertexOrdering | None = None) -> DfsState:
    """``U = S1 = S2 = ∅`` and ``T = V``."""
    return DfsState(n, pi if pi is not None else VertexOrdering.identity(n))


def dfs_round(state: DfsState, src: QuerySource) -> Step:
    """Carry out one round and report which move it made."""
    if state.is_terminal:
        raise TerminalStateError("search already finished (U and T empty)")
    if state.source is None:
        src.bind(state)
        state.source = src
    elif state.source is not src:
        raise RuntimeError("state is bound to a different query source")
    state.round += 1
    r = state.round
    stack = state.stack
    if not stack:
        v = state.tree.select(1)
        state.tree.add(v, -1)
        state.status[v] = IN_U
        state.exit_round[v] = r
        state.u_enter[v] = r
        state._push(v)
        state.last = v
        return Step.STEP1
    u = stack[-1]
    t = src._scan_t(u, state.scan_pos[u], r)
    if t >= 0:
        state.scan_pos[u] = t + 1
        state.tree.add(t, -1)
        state.exit_round[t] = r
        state.parent[t] = u
        state.last = t
        if src._scan_u(t, r):
            state.status[t] = IN_S2
            state.s2_size += 1
            return Step.STEP3B
        state.status[t] = IN_U
        state.u_enter[t] = r
        state._push(t)
        return Step.STEP3A
    state.scan_pos[u] = state.n
    stack.pop()
    if stack:
        state.stree.add(u, -1)
    state.status[u] = IN_S1
    state.s1_size += 1
    state.u_leave[u] = r
    state.last = u
    return Step.STEP4


# running -----------------------------------------------------------------------

StopRule = Callable[[DfsState], "str | bool | None"]


def stop_when(*, s1: int | None = None, s2: int | None = None, path_vertices: int | None = None) -> StopRule:
    """Stop as soon as ``|S1| >= s1``, ``|S2| >= s2`` or ``|U| >= path_vertices``."""

    def rule(state: DfsState):
        if path_vertices is not None and state.u_size >= path_vertices:
            return "path_hit"
        if s1 is not None and state.s1_size >= s1:
            return "s1_hit"
        if s2 is not None and state.s2_size >= s2:
            return "s2_hit"
        return None

    return rule


@dataclass
class RunRecord:
    n: int
    max_u: int
    best_path: list[int]
    final_path: list[int]
    s1_size: int
    s2_size: int
    u_size: int
    ut_queries: int
    new_queries: int
    ut_queries_at_peak: int
    rounds: int
    stop_reason: str
    trace: list[dict] = field(default_factory=list)
    state: DfsState | None = field(default=None, repr=False, compare=False)

    @property
    def path_length(self) -> int:
        return max(self.max_u - 1, 0)

    def to_dict(self, with_trace: bool = False) -> dict:
        d = asdict(self)
        d.pop("state")
        if not with_trace:
            d.pop("trace")
        d["path_length"] = self.path_length
        return d


def trace_row(state: DfsState, src: QuerySource, step: Step) -> dict:
    return {
        "round": state.round,
        "step": step.value,
        **state.sizes(),
        "ut_queries": src.ut_queries,
        "new_queries": src.new_queries,
    }


def dfs_run(
    n: int,
    pi: VertexOrdering | None,
    src: QuerySource,
    stop: StopRule | None = None,
    *,
    query_budget: int | None = None,
    trace_every: int = 0,
    trace_sink: Callable[[str], None] | None = None,
    on_round: Callable[[DfsState, QuerySource, Step], None] | None = None,
) -> RunRecord:
    """Run rounds until ``U = T = ∅`` or ``stop`` fires.

    A generative source is finalized on natural termination, so the whole
    random graph is decided afterwards.  ``on_round`` is called after every
    round (auditors hook in here).
    """
    state = dfs_init(n, pi)
    if state.source is None:
        src.bind(state)
        state.source = src
    trace: list[dict] = []
    reason = None
    peak_ut = 0
    peak = 0
    while not state.is_terminal:
        step = dfs_round(state, src)
        if state.max_u > peak:
            peak = state.max_u
            peak_ut = src.ut_queries
        if on_round is not None:
            on_round(state, src, step)
        if trace_every and state.round % trace_every == 0:
            row = trace_row(state, src, step)
            if trace_sink is not None:
                trace_sink(json.dumps(row))
            else:
                trace.append(row)
        if stop is not None:
            hit = stop(state)
            if hit:
                reason = hit if isinstance(hit, str) else "stopped"
                break
        if query_budget is not None and src.new_queries >= query_budget:
            reason = "query_budget"
            break
    pi_list = state.order.pi
    rec = RunRecord(
        n=n,
        max_u=state.max_u,
        best_path=[pi_list[x] for x in state.best],
        final_path=state.U,
        s1_size=state.s1_size,
        s2_size=state.s2_size,
        u_size=state.u_size,
        ut_queries=src.ut_queries,
        new_queries=src.new_queries,
        ut_queries_at_peak=peak_ut,
        rounds=state.round,
        stop_reason=reason or "exhausted",
        trace=trace,
        state=state,
    )
    if reason is None and isinstance(src, GenerativeSource):
        src.finalize()
    return rec


# invariant auditing ---------------------------------------------------------------


@dataclass
class AuditReport:
    round: int
    A: bool = True
    B: bool = True
    C: bool = True
    D: bool = True
    s2_excess: bool | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.A and self.B and self.C and self.D and self.s2_excess is not False

    def failed(self) -> list[str]:
        out = [k for k in "ABCD" if not getattr(self, k)]
        if self.s2_excess is False:
            out.append("s2_excess")
        return out


def _path_ok_by_ledger(src: QuerySource, stack: list[int]) -> bool:
    for i, a in enumerate(stack):
        for j in range(i + 1, len(stack)):
            e = src._lookup(a, stack[j])
            if e is None:
                return False
            if j == i + 1 and not e.in_eprime:
                return False
            if j > i + 1 and e.in_e:
                return False
    return True


def _exposed_edges(src: GenerativeSource) -> np.ndarray:
    if not src.positives:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(src.positives, dtype=np.int64)


def audit_invariants(state: DfsState, src: QuerySource, previous_explored: int | None = None,
                     step: Step | None = None) -> AuditReport:
    """Check the four search invariants on the current state from scratch.

    A: every ``S1 x T`` pair is in the ledger with a negative ``Gp`` answer.
    B: the explored count did not shrink and grew by one on a step-3 round
       (needs ``previous_explored``).
    C: ``G[U ∪ S1 ∪ S2]`` has at least ``2|S2|`` edges (exposed edges in
       generative mode).
    D: the stack is a ``Gp``-path inducing a path in ``G``.
    Generative sources also get ``|S2| <= excess(exposed graph)``.
    """
    rep = AuditReport(round=state.round)
    status = state.status
    s1 = [x for x, s in enumerate(status) if s == IN_S1]
    tt = [x for x, s in enumerate(status) if s == IN_T]
    for a in s1:
        for b in tt:
            e = src._lookup(a, b)
            if e is None or e.in_eprime:
                rep.A = False
                rep.detail += f"A: pair {a},{b} "
                break
        if not rep.A:
            break
    if previous_explored is not None:
        cur = state.explored
        if cur < previous_explored:
            rep.B = False
        if step in (Step.STEP3A, Step.STEP3B) and cur != previous_explored + 1:
            rep.B = False
    explored = np.array([s != IN_T for s in status], dtype=bool)
    if isinstance(src, FixedSource):
        e = src._g.edge_array()
        inside = int(np.count_nonzero(explored[e[:, 0]] & explored[e[:, 1]])) if len(e) else 0
        rep.C = inside >= 2 * state.s2_size
        rep.D = is_path_in_gprime_induced_in_g(src._gp, src._g, state.stack, validate=False)
    else:
        e = _exposed_edges(src)
        inside = int(np.count_nonzero(explored[e[:, 0]] & explored[e[:, 1]])) if len(e) else 0
        rep.C = inside >= 2 * state.s2_size
        rep.D = _path_ok_by_ledger(src, state.stack)
        exposed = Graph.from_arrays(state.n, e[:, 0], e[:, 1]) if len(e) else Graph.empty(state.n)
        rep.s2_excess = state.s2_size <= excess(exposed)
    return rep


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


class ExcessTracker:
    """Excess of a growing edge set, updated one edge at a time."""

    def __init__(self, n: int):
        self._uf = _UnionFind(n)
        self.excess = 0
        self.edges = 0

    def add(self, a: int, b: int) -> None:
        self.edges += 1
        if not self._uf.union(a, b):
            self.excess += 1


class Auditor:
    """Per-round invariant checker, usable as ``dfs_run(..., on_round=auditor)``.

    ``full=True`` re-checks everything from scratch each round (fine for
    ``n`` in the tens).  Otherwise checks are incremental but still exact:
    A is checked for each vertex at the moment it retires (``T`` only
    shrinks afterwards), D for each pushed vertex against the stack, C and
    the excess bound through running counts.
    """

    def __init__(self, full: bool = True, stop_on_failure: bool = False):
        self.full = full
        self.stop_on_failure = stop_on_failure
        self.failures: list[AuditReport] = []
        self.rounds = 0
        self._prev_explored = 0
        self._excess: ExcessTracker | None = None
        self._seen_pos = 0
        self._inside = 0

    def __call__(self, state: DfsState, src: QuerySource, step: Step) -> None:
        self.rounds += 1
        if self.full:
            rep = audit_invariants(state, src, self._prev_explored, step)
        else:
            rep = self._incremental(state, src, step)
        if isinstance(src, GenerativeSource) and rep.s2_excess is None:
            rep.s2_excess = self._s2_excess(state, src)
        self._prev_explored = state.explored
        if not rep.ok:
            self.failures.append(rep)
            if self.stop_on_failure:
                raise AssertionError(f"round {rep.round}: invariants {rep.failed()} failed {rep.detail}")

    @property
    def ok(self) -> bool:
        return not self.failures

    def _s2_excess(self, state: DfsState, src: GenerativeSource) -> bool:
        if self._excess is None:
            self._excess = ExcessTracker(state.n)
        pos = src.positives
        while self._seen_pos < len(pos):
            a, b = pos[self._seen_pos]
            self._excess.add(a, b)
            self._seen_pos += 1
        return state.s2_size <= self._excess.excess

    def _incremental(self, state: DfsState, src: QuerySource, step: Step) -> AuditReport:
        rep = AuditReport(round=state.round)
        cur = state.explored
        if cur < self._prev_explored or (step in (Step.STEP3A, Step.STEP3B) and cur != self._prev_explored + 1):
            rep.B = False
        stack = state.stack
        if step is Step.STEP4:
            u = state.last
            lookup = src._lookup
            for b, s in enumerate(state.status):
                if s == IN_T:
                    e = lookup(u, b)
                    if e is None or e.in_eprime:
                        rep.A = False
                        rep.detail += f"A: pair {u},{b} "
                        break
        elif step in (Step.STEP1, Step.STEP3A):
            t = stack[-1]
            for j, w in enumerate(stack[:-1]):
                e = src._lookup(t, w)
                if e is None:
                    rep.D = False
                elif j == len(stack) - 2:
                    rep.D = rep.D and e.in_eprime
                else:
                    rep.D = rep.D and not e.in_e
        if isinstance(src, GenerativeSource):
            # every exposed edge joins two explored vertices
            rep.C = len(src.positives) >= 2 * state.s2_size
        else:
            if step is not Step.STEP4:
                v = state.last
                self._inside += sum(1 for w in src._g.neighbours(v).tolist() if state.status[w] != IN_T)
            rep.C = self._inside >= 2 * state.s2_size
        return rep
