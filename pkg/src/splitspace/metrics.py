"""Dissimilarity matrices: four-point and Kalmanson tests, split metrics and
exact recovery of circular split weights.

Matrices built from ints, ``Fraction`` or ``"p/q"`` strings are *exact* and
compared exactly.  Anything containing a float is compared with an absolute
tolerance of ``tol * max_entry``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Rational

from .errors import CapacityError, InfeasibleFit, MalformedMatrix
from .splits import CircularOrdering, Split, WeightedSplitSystem, all_orderings, mask_of

DEFAULT_TOL = 1e-9
DEFAULT_SEARCH_BOUND = 9


class DissimilarityMatrix:
    """Symmetric, nonnegative, zero-diagonal matrix on taxa ``1..n``."""

    __slots__ = ("n", "rows", "exact", "tol")

    def __init__(self, rows: Sequence[Sequence[object]], tol: float = DEFAULT_TOL):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MalformedMatrix(f"matrix is not square ({n} rows)")
        exact = all(isinstance(v, Rational) for r in rows for v in r)
        conv = Fraction if exact else float
        table = tuple(tuple(conv(v) for v in r) for r in rows)
        scale = max((abs(v) for r in table for v in r), default=0)
        self.n = n
        self.rows = table
        self.exact = exact
        self.tol = 0 if exact else tol * scale
        for i in range(n):
            if table[i][i] != 0:
                raise MalformedMatrix(f"nonzero diagonal entry d({i + 1},{i + 1}) = {table[i][i]}")
            for j in range(n):
                v = table[i][j]
                if v < 0:
                    raise MalformedMatrix(f"negative entry d({i + 1},{j + 1}) = {v}")
                if abs(v - table[j][i]) > self.tol:
                    raise MalformedMatrix(f"asymmetric entries at ({i + 1},{j + 1})")

    @classmethod
    def zeros(cls, n: int) -> DissimilarityMatrix:
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def from_pairs(cls, n: int, pairs: dict[tuple[int, int], object]) -> DissimilarityMatrix:
        rows = [[0] * n for _ in range(n)]
        for (i, j), v in pairs.items():
            rows[i - 1][j - 1] = rows[j - 1][i - 1] = v
        return cls(rows)

    def __call__(self, i: int, j: int):
        return self.rows[i - 1][j - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DissimilarityMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __repr__(self) -> str:
        return f"DissimilarityMatrix(n={self.n}, exact={self.exact})"

    def scaled(self, factor) -> DissimilarityMatrix:
        return DissimilarityMatrix([[v * factor for v in r] for r in self.rows])

    def leq(self, a, b) -> bool:
        return a <= b + self.tol

    def eq(self, a, b) -> bool:
        return abs(a - b) <= self.tol


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    witness: dict | None = None
    ordering: CircularOrdering | None = field(default=None)

    def __bool__(self) -> bool:
        return self.passed


def _require_n4(D: DissimilarityMatrix) -> None:
    if D.n < 4:
        raise MalformedMatrix(f"need at least 4 taxa, got {D.n}")


def four_point_check(D: DissimilarityMatrix) -> CheckResult:
    """Tree-metric test: over every quadruple the largest of the three
    pairing sums must be attained at least twice.

    The witness is the lexicographically least failing quadruple.
    """
    _require_n4(D)
    for i, j, k, l in combinations(range(1, D.n + 1), 4):
        sums = (D(i, j) + D(k, l), D(i, l) + D(j, k), D(i, k) + D(j, l))
        lo, mid, hi = sorted(sums)
        if not D.eq(mid, hi):
            return CheckResult(False, {"quadruple": [i, j, k, l], "sums": list(sums)})
    return CheckResult(True)


def kalmanson_check(D: DissimilarityMatrix, ordering: CircularOrdering | Iterable[int]) -> CheckResult:
    """Circular decomposability test for one circular ordering.

    For positions ``a < b < c < e`` along the ordering both
    ``d(a,b) + d(c,e) <= d(a,c) + d(b,e)`` and
    ``d(a,e) + d(b,c) <= d(a,c) + d(b,e)`` must hold; equality passes.
    """
    _require_n4(D)
    if not isinstance(ordering, CircularOrdering):
        ordering = CircularOrdering(tuple(ordering))
    if ordering.n != D.n:
        raise MalformedMatrix(f"ordering on {ordering.n} taxa for a {D.n}-taxon matrix")
    seq = ordering.seq
    for a, b, c, e in combinations(seq, 4):
        diag = D(a, c) + D(b, e)
        for which, lhs in ((1, D(a, b) + D(c, e)), (2, D(a, e) + D(b, c))):
            if not D.leq(lhs, diag):
                witness = {"quadruple": [a, b, c, e], "inequality": which, "lhs": lhs, "rhs": diag}
                return CheckResult(False, witness, ordering)
    return CheckResult(True, None, ordering)


def find_kalmanson_ordering(
    D: DissimilarityMatrix, bound: int = DEFAULT_SEARCH_BOUND
) -> CircularOrdering | None:
    """Lexicographically least canonical ordering passing the Kalmanson test."""
    _require_n4(D)
    if D.n > bound:
        raise CapacityError(D.n, bound, "Kalmanson ordering search")
    for pi in all_orderings(D.n):
        if kalmanson_check(D, pi):
            return pi
    return None


def metric_from_network(W: WeightedSplitSystem) -> DissimilarityMatrix:
    """Distance between two taxa = total weight of the splits separating them."""
    n = W.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    items = list(W.items())
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            d = sum((w for s, w in items if s.separates(i, j)), Fraction(0))
            rows[i - 1][j - 1] = rows[j - 1][i - 1] = d
    return DissimilarityMatrix(rows)


@dataclass(frozen=True)
class SplitFit:
    system: WeightedSplitSystem
    residual: object
    ordering: CircularOrdering


def circular_split_weights(D: DissimilarityMatrix, ordering: CircularOrdering) -> dict[Split, object]:
    """Solve for the weight of every split circular for ``ordering`` (trivial
    ones included) so that the split metric equals ``D``; no sign constraint.

    For the arc ``first..last`` with neighbours ``prev`` and ``next`` the
    weight is ``(d(prev,last) + d(first,next) - d(prev,next) - d(first,last)) / 2``.
    """
    seq, n = ordering.seq, ordering.n
    half = Fraction(1, 2) if D.exact else 0.5
    out: dict[Split, object] = {}
    for length in range(1, n // 2 + 1):
        for start in range(n):
            arc = [seq[(start + t) % n] for t in range(length)]
            prev, nxt = seq[start - 1], seq[(start + length) % n]
            first, last = arc[0], arc[-1]
            s = Split.from_mask(mask_of(arc), n)
            if s in out:
                continue
            out[s] = half * (D(prev, last) + D(first, nxt) - D(prev, nxt) - D(first, last))
    return out


def recover_split_weights(
    D: DissimilarityMatrix, ordering: CircularOrdering | Iterable[int]
) -> SplitFit:
    """Invert :func:`metric_from_network` over the splits circular for ``ordering``.

    Raises :class:`InfeasibleFit` if a weight comes out negative (beyond the
    tolerance for float input) or the reconstructed metric misses ``D``.
    """
    if not isinstance(ordering, CircularOrdering):
        ordering = CircularOrdering(tuple(ordering))
    raw = circular_split_weights(D, ordering)
    offending = sorted(s for s, w in raw.items() if w < -D.tol)
    kept = {s: (w if D.exact else Fraction(w)) for s, w in raw.items() if w > 0}
    W = WeightedSplitSystem(D.n, kept)
    back = metric_from_network(W)
    residual = max(
        (abs(back(i, j) - (D(i, j) if D.exact else Fraction(D(i, j))))
         for i in range(1, D.n + 1) for j in range(i + 1, D.n + 1)),
        default=Fraction(0),
    )
    if not D.exact:
        residual = float(residual)
    # clamped float weights each contribute at most tol to any entry
    if offending or residual > D.tol * D.n:
        raise InfeasibleFit(residual, offending, raw)
    return SplitFit(W, residual, ordering)
