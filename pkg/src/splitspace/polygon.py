"""Dual polygon representation of circular split systems and twists.

A labeled polygon has its edges labeled by a circular ordering of the
taxa; every nontrivial split circular for that ordering is a diagonal (a
chord cutting off a contiguous run of edges).  A chord is identified with
the taxon bipartition it induces, so twisting changes the ordering of the
polygon but never the stored splits.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, ConsistencyError, IllegalTwist, RepresentationError
from .splits import (
    CircularOrdering,
    Split,
    SplitSystem,
    WeightedSplitSystem,
    circular_orderings,
    full_mask,
    is_arc,
    mask_of,
    pairwise_compatible,
)

DEFAULT_ORDERING_BOUND = 9


@dataclass(frozen=True)
class PolygonRep:
    ordering: CircularOrdering
    diagonals: frozenset[Split]
    weights: tuple[tuple[Split, Fraction], ...] = ()

    def __post_init__(self) -> None:
        diagonals = frozenset(self.diagonals)
        object.__setattr__(self, "diagonals", diagonals)
        n = self.ordering.n
        for d in diagonals:
            if d.n != n or d.is_trivial() or not is_arc(d.mask, self.ordering.seq):
                raise RepresentationError(d, self.ordering)
        weights = tuple(sorted((s, Fraction(w)) for s, w in dict(self.weights).items()))
        for s, w in weights:
            if s not in diagonals:
                raise RepresentationError(s, self.ordering)
            if w <= 0:
                raise ValueError(f"diagonal {s} has nonpositive weight {w}")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.ordering.n

    @property
    def system(self) -> SplitSystem:
        return SplitSystem(self.n, self.diagonals)

    def weight_map(self) -> dict[Split, Fraction]:
        return dict(self.weights)

    def sorted_diagonals(self) -> list[Split]:
        return sorted(self.diagonals)

    def key(self) -> tuple[CircularOrdering, frozenset[Split]]:
        """Identity of the drawing: canonical ordering plus split set."""
        return self.ordering, self.diagonals


def polygon_from(
    system: SplitSystem | WeightedSplitSystem, ordering: CircularOrdering | Iterable[int]
) -> PolygonRep:
    """Draw the system on the polygon labeled by ``ordering``; trivial splits are edges."""
    if not isinstance(ordering, CircularOrdering):
        ordering = CircularOrdering(tuple(ordering))
    if isinstance(system, WeightedSplitSystem):
        weights = {s: w for s, w in system.items() if not s.is_trivial()}
        splits = set(weights)
    else:
        weights = {}
        splits = {s for s in system.splits if not s.is_trivial()}
    for s in sorted(splits):
        if not is_arc(s.mask, ordering.seq):
            raise RepresentationError(s, ordering)
    return PolygonRep(ordering, frozenset(splits), tuple(weights.items()))


def diagonals_cross(d1: Split, d2: Split) -> bool:
    """Chords on a common polygon cross iff their endpoints interleave.

    For splits circular on one ordering this is exactly incompatibility.
    """
    return not pairwise_compatible(d1, d2)


def crossing_diagonal(polygon: PolygonRep, chord: Split) -> Split | None:
    for d in sorted(polygon.diagonals):
        if diagonals_cross(chord, d):
            return d
    return None


def _reverse_arc(seq: tuple[int, ...], side: int) -> tuple[int, ...]:
    n = len(seq)
    inside = [bool(side >> (t - 1) & 1) for t in seq]
    # rotate so that the arc starts at index 0
    start = next(i for i in range(n) if inside[i] and not inside[i - 1])
    rot = seq[start:] + seq[:start]
    k = bin(side).count("1")
    return tuple(reversed(rot[:k])) + rot[k:]


@dataclass(frozen=True)
class Twist:
    """A twist along ``chord`` reversing the arc of taxa in ``side``."""

    chord: Split
    side: tuple[int, ...]


def _side_mask(chord: Split, side: Iterable[int] | None) -> int:
    if side is None:
        # default: the side not containing taxon 1
        return chord.side_mask(1) ^ full_mask(chord.n)
    m = mask_of(side)
    if m not in (chord.mask, full_mask(chord.n) ^ chord.mask):
        raise ValueError(f"{sorted(side)} is not a side of chord {chord}")
    return m


def twist(polygon: PolygonRep, chord: Split, side: Iterable[int] | None = None) -> PolygonRep:
    """Break ``polygon`` along ``chord``, reflect one side and glue it back.

    ``chord`` may be one of the diagonals or an auxiliary chord of the
    polygon; either way it must cross no diagonal.
    """
    if chord.n != polygon.n or chord.is_trivial() or not is_arc(chord.mask, polygon.ordering.seq):
        raise RepresentationError(chord, polygon.ordering)
    crossing = crossing_diagonal(polygon, chord)
    if crossing is not None:
        raise IllegalTwist(chord, crossing)
    side_mask = _side_mask(chord, side)
    seq = _reverse_arc(polygon.ordering.seq, side_mask)
    return PolygonRep(CircularOrdering(seq), polygon.diagonals, polygon.weights)


def apply_twists(polygon: PolygonRep, twists: Iterable[Twist]) -> PolygonRep:
    for t in twists:
        polygon = twist(polygon, t.chord, t.side)
    return polygon


def compatible_orderings(
    system: SplitSystem | Iterable[Split], n: int | None = None, bound: int = DEFAULT_ORDERING_BOUND
) -> list[CircularOrdering]:
    """Every canonical ordering for which the whole system is circular."""
    if isinstance(system, SplitSystem):
        n, splits = system.n, system.splits
    else:
        splits = list(system)
        if n is None:
            raise ValueError("n is required when passing a bare iterable of splits")
    if n > bound:
        raise CapacityError(n, bound, "ordering enumeration")
    return list(circular_orderings(splits, n))


# ---------------------------------------------------------------------------
# twist sequences
# ---------------------------------------------------------------------------


class _Walker:
    """Mutable working state of the twist-sequence construction.

    ``seq`` is an oriented representative of the current ordering; legality of
    a chord depends only on the split set, never on the orientation.
    """

    def __init__(self, polygon: PolygonRep):
        self.n = polygon.n
        self.full = full_mask(self.n)
        self.diagonals = sorted(polygon.diagonals)
        self.seq = polygon.ordering.seq
        self.twists: list[Twist] = []

    def legal(self, side: int) -> bool:
        size = bin(side).count("1")
        if size < 2 or size > self.n - 2 or not is_arc(side, self.seq):
            return False
        chord = Split.from_mask(side, self.n)
        return not any(diagonals_cross(chord, d) for d in self.diagonals)

    def apply(self, side: int) -> None:
        chord = Split.from_mask(side, self.n)
        self.twists.append(Twist(chord, tuple(t for t in range(1, self.n + 1) if side >> (t - 1) & 1)))
        self.seq = _reverse_arc(self.seq, side)

    def align(self, first: int) -> None:
        k = self.seq.index(first)
        self.seq = self.seq[k:] + self.seq[:k]


def _segment_mask(seq: tuple[int, ...], i: int, j: int) -> int:
    return mask_of(seq[i : j + 1])


def _fix_adjacency(w: _Walker, k: int, y: int) -> bool:
    """Place ``y`` right after position ``k`` without disturbing ``seq[:k+1]``.

    Applies the four cases of the constructive argument in order and reports
    failure when the case that applies would need an illegal (crossing) chord.
    """
    seq, n = w.seq, w.n
    x = seq[k]
    p = seq.index(y)
    if p == k + 1:
        return True  # case 1
    if k == 0 and p == n - 1:
        pair = mask_of((x, y))
        if w.legal(pair):  # case 2
            w.apply(pair)
            w.align(x)
            return True
        for d in w.diagonals:  # case 3: d lands between y and x
            side_x = d.side_mask(x)
            if not side_x >> (y - 1) & 1 and w.legal(side_x):
                w.apply(w.full ^ side_x)
                w.apply(side_x)
                w.align(x)
                return True
        # with a single fixed taxon the orientation is free: reflect the tail
        w.seq = (x,) + tuple(reversed(seq[1:]))
        return True
    chord = _segment_mask(seq, k + 1, p)
    if w.legal(chord):  # case 4
        w.apply(chord)
        w.align(seq[0])
        return True
    return False


def twist_sequence(polygon: PolygonRep, target: CircularOrdering | Iterable[int]) -> list[Twist] | None:
    """Twists carrying ``polygon`` to the representation with ordering ``target``.

    Returns ``None`` when ``target`` is not compatible with the polygon's
    split system.  Each iteration fixes one adjacency of ``target`` with at
    most two twists, for at most ``n - 2`` iterations.

    The case analysis depends on where the walk around ``target`` starts and
    in which direction it runs; from some starts the chord of case 4 crosses a
    diagonal.  All ``2n`` starts are tried in a fixed order and the first one
    whose every step is legal wins.
    """
    if not isinstance(target, CircularOrdering):
        target = CircularOrdering(tuple(target))
    if target.n != polygon.n or not all(is_arc(d.mask, target.seq) for d in polygon.diagonals):
        return None
    if target == polygon.ordering:
        return []
    n = polygon.n
    tseq = target.seq
    for orientation in (tseq, (tseq[0],) + tuple(reversed(tseq[1:]))):
        for shift in range(n):
            t = orientation[shift:] + orientation[:shift]
            w = _Walker(polygon)
            w.align(t[0])
            if all(_fix_adjacency(w, k, t[k + 1]) for k in range(n - 2)):
                if CircularOrdering(w.seq) != target:
                    continue
                return w.twists
    raise ConsistencyError(f"no twist walk found from {polygon.ordering} to compatible {target}")
