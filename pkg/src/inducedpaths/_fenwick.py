class Fenwick:
    """Non-negative counts on positions ``0..n-1`` with prefix sums and rank select."""

    __slots__ = ("n", "tree", "total", "_top")

    def __init__(self, n: int, fill: int = 0):
        self.n = n
        tree = [0] * (n + 1)
        if fill:
            for i in range(1, n + 1):
                tree[i] += fill
                j = i + (i & -i)
                if j <= n:
                    tree[j] += tree[i]
        self.tree = tree
        self.total = fill * n
        self._top = 1 << (n.bit_length() - 1) if n else 0

    def add(self, i: int, delta: int) -> None:
        tree = self.tree
        n = self.n
        self.total += delta
        i += 1
        while i <= n:
            tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        """Sum over positions ``< i``."""
        tree = self.tree
        s = 0
        while i > 0:
            s += tree[i]
            i &= i - 1
        return s

    def select(self, k: int) -> int:
        """Position holding the ``k``-th unit (1-based); needs ``1 <= k <= total``."""
        tree = self.tree
        n = self.n
        pos = 0
        step = self._top
        while step:
            nxt = pos + step
            if nxt <= n and tree[nxt] < k:
                pos = nxt
                k -= tree[nxt]
            step >>= 1
        return pos
