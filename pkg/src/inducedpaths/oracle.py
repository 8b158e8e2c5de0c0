"""Exact brute-force ground truth for small graphs (bitmask branch and bound)."""

from __future__ import annotations

from .graph import Graph, GraphError

PATH_LIMIT = 30
TWO_GRAPH_LIMIT = 25
DENSE_LIMIT = 25


def _reach(start: int, allowed: int, adj: list[int]) -> int:
    """Vertices of ``allowed`` reachable from ``start`` (excluded) inside ``allowed``."""
    seen = 0
    frontier = adj[start] & allowed
    while frontier:
        seen |= frontier
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        frontier = nxt & allowed & ~seen
    return seen


def _longest(n: int, walk: list[int], host: list[int]) -> tuple[int, list[int]]:
    """Longest sequence whose consecutive pairs are ``walk`` edges and whose
    vertex set spans no other ``host`` edge.  ``walk`` must be a subgraph of
    ``host``."""
    if n == 0:
        return 0, []
    closed = [host[v] | (1 << v) for v in range(n)]
    best = [0, [0]]
    path: list[int] = []

    def extend(v: int, allowed: int):
        # allowed: vertices not on the path and not host-adjacent to any path
        # vertex other than v
        length = len(path) - 1
        if length > best[0]:
            best[0] = length
            best[1] = list(path)
        cand = walk[v] & allowed
        if not cand:
            return
        if length + (_reach(v, allowed, walk)).bit_count() <= best[0]:
            return
        nxt_allowed = allowed & ~closed[v]
        while cand:
            low = cand & -cand
            w = low.bit_length() - 1
            cand ^= low
            path.append(w)
            extend(w, nxt_allowed & ~low)
            path.pop()

    full = (1 << n) - 1
    for s in range(n):
        path.append(s)
        extend(s, full & ~(1 << s))
        path.pop()
    return best[0], best[1]


def longest_induced_path_exact(G: Graph) -> tuple[int, list[int]]:
    """Maximum number of edges of an induced path of ``G``, with a witness."""
    if G.n > PATH_LIMIT:
        raise GraphError(f"exact search is limited to {PATH_LIMIT} vertices")
    adj = G.adjacency_masks()
    return _longest(G.n, adj, adj)


def longest_gprime_path_induced_in_g_exact(Gp: Graph, G: Graph) -> tuple[int, list[int]]:
    """Longest path of ``Gp`` whose vertex set induces exactly that path in ``G``."""
    if G.n > TWO_GRAPH_LIMIT:
        raise GraphError(f"exact search is limited to {TWO_GRAPH_LIMIT} vertices")
    if Gp.n != G.n or not Gp.is_subgraph_of(G):
        raise GraphError("Gp must be a subgraph of G on the same vertex set")
    return _longest(G.n, Gp.adjacency_masks(), G.adjacency_masks())


def max_edges_bounded_set(G: Graph, size_cap: int) -> tuple[int, list[int]]:
    """Largest ``e(G[S])`` over ``|S| <= size_cap``, with a witness set."""
    n = G.n
    if n > DENSE_LIMIT:
        raise GraphError(f"exact search is limited to {DENSE_LIMIT} vertices")
    k = max(0, min(size_cap, n))
    if k == 0:
        return 0, []
    adj0 = G.adjacency_masks()
    order = sorted(range(n), key=lambda v: -adj0[v].bit_count())
    pos = {v: i for i, v in enumerate(order)}
    adj = [sum(1 << pos[w] for w in range(n) if adj0[v] >> w & 1) for v in order]
    best = [-1, 0]

    def rec(i: int, chosen: int, count: int, edges: int):
        r = k - count
        if r == 0 or i == n:
            if edges > best[0]:
                best[0], best[1] = edges, chosen
            return
        if n - i < r:
            r = n - i
        cand = ((1 << n) - 1) & ~((1 << i) - 1)
        gains = sorted(
            ((adj[v] & chosen).bit_count() * 2 + min((adj[v] & cand).bit_count(), r - 1) for v in range(i, n)),
            reverse=True,
        )
        if edges + sum(gains[:r]) // 2 <= best[0]:
            return
        rec(i + 1, chosen | (1 << i), count + 1, edges + (adj[i] & chosen).bit_count())
        rec(i + 1, chosen, count, edges)

    rec(0, 0, 0, 0)
    witness = sorted(order[i] for i in range(n) if best[1] >> i & 1)
    return best[0], witness
