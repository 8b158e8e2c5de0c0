"""Union-bound evaluators for sparse sets and sparse cuts in G(N, p).

Two families of first-moment bounds:

* sparse sets: ``sum_{1 <= i <= t} C(N, i) C(C(i, 2), ceil(alpha i)) p^ceil(alpha i)``,
  the expected number of sets of at most ``t`` vertices spanning at least
  ``alpha |S|`` edges, next to its simplified form
  ``[(e N / i) (e i p / (2 alpha))^alpha]^i``;
* sparse cuts: ``C(N, s) C(N, t) C(t s, m) p^m`` for disjoint ``s``- and
  ``t``-sets with at least ``m`` crossing edges.

Everything is evaluated in log space (scipy) with closed-form constants in
mpmath; :func:`sparse_sets_bound_rational` is an exact ``Fraction`` route for
small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.special import betaln

mpmath.mp.dps = 50

MAX_TERMS = 2_000_000
CHUNK = 200_000


@dataclass(frozen=True)
class BoundParams:
    """``n`` vertices per unit, ``k`` units (``N = k n`` vertices in all)."""

    n: float
    p: float
    t: float
    alpha: float = 2.0
    s: float = 0.0
    k: float = 1.0
    c: float | None = None

    def __post_init__(self):
        if not (0 <= self.p <= 1):
            raise ValueError("p must lie in [0, 1]")
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be at least 1")
        if self.alpha <= 1:
            raise ValueError("alpha must exceed 1")
        if not (0 <= self.t <= self.N and 0 <= self.s <= self.N):
            raise ValueError("set sizes must lie in [0, N]")

    @property
    def N(self) -> float:
        return self.n * self.k


def _ceil_alpha_i(alpha, i):
    if isinstance(alpha, Fraction):
        return math.ceil(alpha * i)
    return math.ceil(alpha * i - 1e-9)


def _log_comb(a, b):
    """``log C(a, b)`` for real ``a >= b >= 0`` (vectorised)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -np.log1p(a) - betaln(a - b + 1.0, b + 1.0)


def _logsumexp(logs: np.ndarray) -> float:
    logs = logs[np.isfinite(logs)]
    if logs.size == 0:
        return -math.inf
    top = float(logs.max())
    return top + math.log(math.fsum(np.exp(logs - top).tolist()))


# sparse sets -----------------------------------------------------------------------


@dataclass
class SparseSetsResult:
    log_total: float
    log_simplified_total: float
    per_i: np.ndarray
    per_i_simplified: np.ndarray
    bracket_coefficient: mpmath.mpf
    tail_base: mpmath.mpf
    small_regime: dict
    termwise_ok: bool
    truncated_tail: float = 0.0

    @property
    def total(self) -> mpmath.mpf:
        return mpmath.exp(self.log_total) if self.log_total > -math.inf else mpmath.mpf(0)

    def summary(self) -> dict:
        return {
            "total": mpmath.nstr(self.total, 12),
            "log_total": self.log_total,
            "log_simplified_total": self.log_simplified_total,
            "bracket_coefficient": mpmath.nstr(self.bracket_coefficient, 12),
            "tail_base": mpmath.nstr(self.tail_base, 12),
            "terms": int(self.per_i.size),
            "termwise_ok": self.termwise_ok,
            **{f"small_{key}": value for key, value in self.small_regime.items()},
        }


def bracket_coefficient(params: BoundParams) -> mpmath.mpf:
    """``C`` with ``(e N / i)(e i p / (2 alpha))^alpha = C (i / n)^(alpha - 1)``."""
    a = mpmath.mpf(params.alpha)
    pn = mpmath.mpf(params.p) * params.n
    return mpmath.e * params.k * (mpmath.e * pn / (2 * a)) ** a


def bracket_at(params: BoundParams, i) -> mpmath.mpf:
    return bracket_coefficient(params) * (mpmath.mpf(i) / params.n) ** (mpmath.mpf(params.alpha) - 1)


def _sparse_logs(params: BoundParams, i: np.ndarray):
    alpha = params.alpha
    N = params.N
    m = np.ceil(alpha * i - 1e-9)
    pairs = i * (i - 1) / 2
    logp = math.log(params.p) if params.p > 0 else -math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = _log_comb(N, i) + _log_comb(np.maximum(pairs, m), m) + m * logp
        exact = np.where(m > pairs, -np.inf, exact)
        simple = i * np.log(math.e * N / i) + alpha * i * (np.log(math.e * i / (2 * alpha)) + logp)
    return exact, simple


def sparse_sets_bound(params: BoundParams, *, max_terms: int = MAX_TERMS) -> SparseSetsResult:
    """Exact and simplified sparse-set union bounds plus regime constants.

    Summands whose edge requirement exceeds ``C(i, 2)`` are zero.  Beyond
    ``max_terms`` the remaining summands are bounded geometrically by the
    bracket at ``t`` (infinite if that bracket is at least 1).
    """
    last = int(math.floor(params.t + 1e-9))
    cut = min(last, max_terms)
    exact_parts, simple_parts = [], []
    for lo in range(1, cut + 1, CHUNK):
        i = np.arange(lo, min(cut, lo + CHUNK - 1) + 1, dtype=float)
        e, s = _sparse_logs(params, i)
        exact_parts.append(e)
        simple_parts.append(s)
    per_i = np.concatenate(exact_parts) if exact_parts else np.zeros(0)
    per_s = np.concatenate(simple_parts) if simple_parts else np.zeros(0)
    log_total = _logsumexp(per_i)
    log_simple = _logsumexp(per_s)
    tail = 0.0
    if last > cut:
        b = float(bracket_at(params, params.t))
        tail = math.inf if b >= 1 else (cut + 1) * math.log(b) - math.log1p(-b)
        log_total = float(np.logaddexp(log_total, tail))
        log_simple = float(np.logaddexp(log_simple, tail))
    live = np.isfinite(per_i)
    termwise = bool(np.all(per_i[live] <= per_s[live] + 1e-9 * np.maximum(1.0, np.abs(per_s[live]))))
    C = bracket_coefficient(params)
    a1 = mpmath.mpf(params.alpha) - 1
    tail_base = C * (mpmath.mpf(params.t) / params.n) ** a1
    root = mpmath.sqrt(params.n)
    small_base = C * (root / params.n) ** a1
    exponent = a1 / 2 - mpmath.mpf(1) / 4
    small = {
        "base": mpmath.nstr(small_base, 12),
        "ok": bool(small_base <= params.n ** mpmath.mpf(-0.25)),
        "n_from": mpmath.nstr(C ** (1 / exponent), 6) if exponent > 0 else "inf",
        "large_regime_empty": bool(params.t < root),
    }
    return SparseSetsResult(log_total, log_simple, per_i, per_s, C, tail_base, small, termwise, tail)


def sparse_sets_bound_rational(params: BoundParams) -> Fraction:
    """Exact rational value of the sparse-set sum (small integer ``N`` only)."""
    N = params.N
    if N != int(N) or N > 10_000:
        raise ValueError("rational route needs a small integer N")
    N = int(N)
    p = Fraction(params.p)
    total = Fraction(0)
    for i in range(1, int(math.floor(params.t + 1e-9)) + 1):
        m = _ceil_alpha_i(params.alpha, i)
        pairs = i * (i - 1) // 2
        if m > pairs:
            continue
        total += math.comb(N, i) * math.comb(pairs, m) * p ** m
    return total


# sparse cuts -----------------------------------------------------------------------


@dataclass
class CutResult:
    log_bound: float
    log_simplified: float
    base_n: mpmath.mpf
    base_exact_n: float
    vacuous: bool
    extra: dict = field(default_factory=dict)

    @property
    def bound(self) -> mpmath.mpf:
        return mpmath.exp(self.log_bound)

    def summary(self) -> dict:
        out = {
            "log_bound": self.log_bound,
            "log_simplified": self.log_simplified,
            "base_n": mpmath.nstr(self.base_n, 15),
            "base_n_minus_1": mpmath.nstr(self.base_n - 1, 6),
            "base_exact_n": self.base_exact_n,
            "vacuous": self.vacuous,
        }
        out.update(self.extra)
        return out


def cut_bound(params: BoundParams, edge_threshold: float) -> CutResult:
    """``C(N, s) C(N, t) C(t s, m) p^m`` in log space, plus its simplified form
    ``(eN/s)^s (eN/t)^t (e t s p / m)^m`` and the per-``n`` base of the latter."""
    s, t, m = params.s, params.t, edge_threshold
    if m < 0 or m > t * s:
        raise ValueError("edge threshold must lie in [0, t*s]")
    N = params.N
    logp = math.log(params.p) if params.p > 0 else -math.inf
    pterm = 0.0 if m == 0 else m * logp
    log_bound = float(_log_comb(N, s) + _log_comb(N, t) + _log_comb(t * s, m)) + pterm
    mp = mpmath.mpf
    simple = mp(0)
    for size in (s, t):
        if size > 0:
            simple += size * mpmath.log(mpmath.e * N / size)
    if m > 0:
        simple += m * mpmath.log(mpmath.e * mp(t) * s * mp(params.p) / m) if params.p > 0 else -mpmath.inf
    base_n = mpmath.exp(simple / params.n)
    return CutResult(log_bound, float(simple), base_n, math.exp(log_bound / params.n), log_bound >= 0)


# closed forms for the two parameter families ------------------------------------------


TWO_COLOUR_DENSITY = 64.0
TWO_COLOUR_T = 196e-7
TWO_COLOUR_ALPHA = 12 / 7
TWO_COLOUR_S_CUT = 21e-7
TWO_COLOUR_T_CUT = 175e-7
TWO_COLOUR_CUT_RATIO = 95 / 7
MULTI_K = math.exp(13)
MULTI_C = 200.0


def two_colour_sets_params(n: int = 10 ** 9) -> BoundParams:
    """``p = 64/n``, sets of at most ``196 n / 10**7`` vertices, ``alpha = 12/7``."""
    return BoundParams(n=n, p=TWO_COLOUR_DENSITY / n, t=math.floor(TWO_COLOUR_T * n + 1e-6), alpha=TWO_COLOUR_ALPHA)


def two_colour_cut_params(n: int = 10 ** 9) -> tuple[BoundParams, float]:
    s = round(TWO_COLOUR_S_CUT * n)
    t = round(TWO_COLOUR_T_CUT * n)
    return BoundParams(n=n, p=TWO_COLOUR_DENSITY / n, t=t, s=s), TWO_COLOUR_CUT_RATIO * s


def two_colour_cut_base() -> mpmath.mpf:
    """n-th root of the simplified cut bound, written out term by term."""
    e = mpmath.e
    mp = mpmath.mpf
    s, t = mp(21) / 10 ** 7, mp(175) / 10 ** 7
    return ((e / s) ** s) * ((e / t) ** t) * (mp(1225) * e * 64 / (95 * mp(10) ** 7)) ** (mp(95) * 21 / (7 * mp(10) ** 7))


def multi_alpha(k: float) -> float:
    L = math.log(k)
    return 2 * L / (L + 2)


def multi_sets_params(c: float = MULTI_C, k: float = MULTI_K, n: float = 1e18) -> BoundParams:
    """``N = k n``, ``p = c log k / n``, sets of at most ``2n / (c^3 k log^2 k)``."""
    L = math.log(k)
    t = 2 * n / (c ** 3 * k * L ** 2)
    return BoundParams(n=n, k=k, p=c * L / n, t=t, alpha=multi_alpha(k), c=c)


def multi_cut_params(c: float = MULTI_C, k: float = MULTI_K, n: float = 1e18) -> tuple[BoundParams, float]:
    L = math.log(k)
    s = n / (c ** 3 * k * L ** 3)
    t = 2 * n / (c ** 3 * k * L ** 2)
    return BoundParams(n=n, k=k, p=c * L / n, t=t, s=s, c=c), 8 * s * L


def multi_sets_relaxed_base(c: float, k: float) -> mpmath.mpf:
    """The looser per-summand bracket ``10 c^2 k L^2 (2/(c^3 k L^2))^(1 - 4/L)``."""
    mp = mpmath.mpf
    L = mpmath.log(mp(k))
    return 10 * mp(c) ** 2 * k * L ** 2 * (2 / (mp(c) ** 3 * k * L ** 2)) ** (1 - 4 / L)


def multi_cut_base(c: float, k: float) -> mpmath.mpf:
    """``e^3 / (32 c log^2 k)``: the ``2t``-th root of the simplified cut bound."""
    L = mpmath.log(mpmath.mpf(k))
    return mpmath.e ** 3 / (32 * mpmath.mpf(c) * L ** 2)


def multi_cut_base_from_display(c: float, k: float, n: float = 1e18) -> mpmath.mpf:
    """Same base, from ``(ekn/t)^2 (et/(8 log k))^4 (c log k / n)^4`` at concrete ``n``."""
    mp = mpmath.mpf
    L = mpmath.log(mp(k))
    t = 2 * mp(n) / (mp(c) ** 3 * k * L ** 2)
    e = mpmath.e
    return mpmath.sqrt((e * k * n / t) ** 2 * (e * t / (8 * L)) ** 4 * (mp(c) * L / n) ** 4)


def minimal_c(target: float, base_fn, k: float = MULTI_K, lo: float = 1.0, hi: float = 1e200) -> float:
    """Smallest ``c`` in ``[lo, hi]`` with ``base_fn(c, k) <= target`` (bisection in
    ``log c``; ``base_fn`` must be decreasing in ``c``)."""
    if base_fn(mpmath.mpf(hi), k) > target:
        return math.inf
    a, b = mpmath.log(lo), mpmath.log(hi)
    for _ in range(200):
        mid = (a + b) / 2
        if base_fn(mpmath.exp(mid), k) <= target:
            b = mid
        else:
            a = mid
    return float(mpmath.exp(b))


def multi_sets_exact_base(c: float, k: float) -> mpmath.mpf:
    """Bracket of the simplified summand at ``i = t`` (``n`` cancels)."""
    mp = mpmath.mpf
    L = mpmath.log(mp(k))
    a = 2 * L / (L + 2)
    C = mpmath.e * k * (mpmath.e * mp(c) * L / (2 * a)) ** a
    return C * (2 / (mp(c) ** 3 * k * L ** 2)) ** (a - 1)


FAMILY_ALIASES = {"4.1.1": "two_colour_sets", "4.1.2": "two_colour_cut", "4.3.1": "multi_sets", "4.3.2": "multi_cut"}


def evaluate(name: str, *, n: float | None = None, c: float = MULTI_C, k: float = MULTI_K) -> dict:
    """Headline numbers for one named parameter family (see ``FAMILY_ALIASES``)."""
    name = FAMILY_ALIASES.get(name, name)
    if name == "two_colour_sets":
        params = two_colour_sets_params(int(n) if n else 10 ** 9)
        res = sparse_sets_bound(params)
        out = res.summary()
        out.update(
            family=name,
            bracket_le_2280=bool(res.bracket_coefficient <= 2280),
            bracket_ge_2000=bool(res.bracket_coefficient >= 2000),
            tail_base_le_0_99=bool(res.tail_base <= mpmath.mpf("0.99")),
        )
        return out
    if name == "two_colour_cut":
        params, m = two_colour_cut_params(int(n) if n else 10 ** 9)
        res = cut_bound(params, m)
        out = res.summary()
        closed = two_colour_cut_base()
        out.update(
            family=name,
            closed_form_base=mpmath.nstr(closed, 15),
            closed_form_base_minus_1=mpmath.nstr(closed - 1, 6),
            base_lt_1_minus_1e7=bool(closed < 1 - mpmath.mpf(10) ** -7),
        )
        return out
    if name == "multi_sets":
        params = multi_sets_params(c, k, n or 1e18)
        res = sparse_sets_bound(params)
        out = res.summary()
        relaxed = multi_sets_relaxed_base(c, k)
        out.update(
            family=name,
            c=c,
            k=k,
            relaxed_base=mpmath.nstr(relaxed, 12),
            tail_base_le_half=bool(res.tail_base <= mpmath.mpf(1) / 2),
            relaxed_base_le_half=bool(relaxed <= mpmath.mpf(1) / 2),
            minimal_c_tail=minimal_c(0.5, multi_sets_exact_base, k),
            minimal_c_relaxed=minimal_c(0.5, multi_sets_relaxed_base, k),
        )
        return out
    if name == "multi_cut":
        params, m = multi_cut_params(c, k, n or 1e18)
        res = cut_bound(params, m)
        out = res.summary()
        base = multi_cut_base(c, k)
        exact_2t = math.exp(res.log_bound / (2 * params.t))
        out.update(
            family=name,
            c=c,
            k=k,
            base_2t=mpmath.nstr(base, 12),
            base_2t_display=mpmath.nstr(multi_cut_base_from_display(c, k, n or 1e18), 12),
            base_2t_exact=exact_2t,
            base_lt_1=bool(base < 1),
        )
        return out
    raise ValueError(f"unknown bound family {name!r}")


def per_i_rows(res: SparseSetsResult, limit: int = 40) -> list[dict]:
    """A thinned per-``i`` table: the first terms then log-spaced ones."""
    size = res.per_i.size
    if size == 0:
        return []
    head = list(range(1, min(size, limit // 2) + 1))
    spread = np.unique(np.geomspace(max(head[-1], 1), size, num=limit - len(head)).astype(int)).tolist()
    rows = []
    for i in sorted(set(head) | set(spread)):
        rows.append({"i": i, "log_exact": float(res.per_i[i - 1]), "log_simplified": float(res.per_i_simplified[i - 1])})
    return rows


__all__ = [
    "BoundParams",
    "CutResult",
    "SparseSetsResult",
    "bracket_at",
    "bracket_coefficient",
    "cut_bound",
    "evaluate",
    "minimal_c",
    "multi_cut_base",
    "multi_sets_relaxed_base",
    "sparse_sets_bound",
    "sparse_sets_bound_rational",
    "two_colour_cut_base",
]
