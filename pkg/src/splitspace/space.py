"""The fan of circular split networks and its link of the origin.

Coordinates live in ``R^delta``, one axis per nontrivial split, ordered by
the canonical block.  Chambers are canonical circular orderings; a cell of
the link is identified by its split set alone, so two chambers glue along a
cell exactly when both contain its splits.

Internally split sets are bitmasks over coordinate indices, which keeps the
n = 6, 7 enumerations within seconds.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial

from .errors import CapacityError, SplitIndexError
from .polygon import DEFAULT_ORDERING_BOUND, PolygonRep, compatible_orderings
from .splits import (
    CircularOrdering,
    Split,
    SplitSystem,
    all_orderings,
    circular_orderings,
    is_arc,
    pairwise_compatible,
)

DEFAULT_CELL_BOUND = 7


def delta(n: int) -> int:
    """Number of nontrivial splits of ``n`` taxa: ``2**(n-1) - n - 1``."""
    if n < 3:
        raise ValueError(f"delta needs n >= 3, got {n}")
    return 2 ** (n - 1) - n - 1


def max_diagonals(n: int) -> int:
    return n * (n - 3) // 2


@lru_cache(maxsize=None)
def nontrivial_splits(n: int) -> tuple[Split, ...]:
    """All nontrivial splits in coordinate order."""
    out = []
    for size in range(2, n - 1):
        for block in combinations(range(1, n), size):
            out.append(Split(block, n))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _index_table(n: int) -> dict[Split, int]:
    return {s: i for i, s in enumerate(nontrivial_splits(n))}


def split_index(s: Split) -> int:
    if s.is_trivial():
        raise SplitIndexError(f"trivial split {s} has no coordinate")
    return _index_table(s.n)[s]


def split_at(n: int, index: int) -> Split:
    return nontrivial_splits(n)[index]


def _check_bound(n: int, bound: int, what: str) -> None:
    if n > bound:
        raise CapacityError(n, bound, what)


class NetworkPoint:
    """A point of the fan: nonnegative rational weights on a circular support.

    ``ordering`` is an optional hint naming a chamber that contains the
    support; without it a compatible ordering is searched for.
    """

    __slots__ = ("n", "_coords")

    def __init__(self, n: int, coords: Mapping[Split, object], ordering: CircularOrdering | None = None):
        table = {}
        for s, v in coords.items():
            if s.n != n:
                raise ValueError(f"split {s} is not on {n} taxa")
            if s.is_trivial():
                raise SplitIndexError(f"trivial split {s} has no coordinate")
            v = Fraction(v)
            if v < 0:
                raise ValueError(f"negative coordinate {v} at {s}")
            if v:
                table[s] = v
        if len(table) > max_diagonals(n):
            raise ValueError(f"{len(table)} nonzero coordinates exceed {max_diagonals(n)}")
        if ordering is not None:
            if not all(is_arc(s.mask, ordering.seq) for s in table):
                raise ValueError(f"support is not circular for {ordering}")
        elif table and next(circular_orderings(table, n), None) is None:
            raise ValueError("support is not circular for any ordering")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_coords", dict(sorted(table.items())))

    def __setattr__(self, name, value):
        raise AttributeError("NetworkPoint is immutable")

    @classmethod
    def origin(cls, n: int) -> NetworkPoint:
        return cls(n, {})

    @property
    def coords(self) -> dict[Split, Fraction]:
        return dict(self._coords)

    @property
    def support(self) -> frozenset[Split]:
        return frozenset(self._coords)

    def __getitem__(self, s: Split) -> Fraction:
        return self._coords.get(s, Fraction(0))

    def total(self) -> Fraction:
        return sum(self._coords.values(), Fraction(0))

    def vector(self) -> list[Fraction]:
        return [self[s] for s in nontrivial_splits(self.n)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkPoint):
            return NotImplemented
        return self.n == other.n and self._coords == other._coords

    def __hash__(self) -> int:
        return hash((self.n, tuple(self._coords.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {v}" for s, v in self._coords.items())
        return f"NetworkPoint(n={self.n}, {{{body}}})"


def to_network_point(polygon: PolygonRep) -> NetworkPoint:
    """Weights of the polygon's diagonals as global coordinates."""
    return NetworkPoint(polygon.n, polygon.weight_map(), polygon.ordering)


def in_tree_subspace(x: NetworkPoint) -> bool:
    return all(pairwise_compatible(a, b) for a, b in combinations(x.support, 2))


# ---------------------------------------------------------------------------
# chambers and cells
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class LinkCell:
    """Simplex of the link spanned by a jointly circular set of splits."""

    splits: tuple[Split, ...]
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "splits", tuple(sorted(set(self.splits))))
        if not self.splits:
            raise ValueError("a cell needs at least one split")

    @property
    def dim(self) -> int:
        return len(self.splits) - 1

    @property
    def system(self) -> SplitSystem:
        return SplitSystem(self.n, frozenset(self.splits))


class _Chambers:
    """Per-n cache: chamber orderings and their diagonal sets as index masks."""

    def __init__(self, n: int):
        self.n = n
        self.splits = nontrivial_splits(n)
        index = _index_table(n)
        self.orderings = list(all_orderings(n))
        self.diag_indices = [
            tuple(sorted(index[s] for s in pi.circular_splits())) for pi in self.orderings
        ]
        self.masks = [sum(1 << i for i in idx) for idx in self.diag_indices]

    def cell(self, mask: int) -> LinkCell:
        return LinkCell(tuple(self.splits[i] for i in _bits(mask)), self.n)

    def cell_masks(self, size: int) -> set[int]:
        found: set[int] = set()
        for idx in self.diag_indices:
            for combo in combinations(idx, size):
                m = 0
                for i in combo:
                    m |= 1 << i
                found.add(m)
        return found


@lru_cache(maxsize=8)
def _chamber_table(n: int) -> _Chambers:
    return _Chambers(n)


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _mask_of_splits(splits: Iterable[Split]) -> int:
    m = 0
    for s in splits:
        m |= 1 << split_index(s)
    return m


def chambers(n: int, bound: int = DEFAULT_ORDERING_BOUND) -> list[CircularOrdering]:
    _check_bound(n, bound, "chamber enumeration")
    return list(all_orderings(n))


def link_cells(n: int, k: int, bound: int = DEFAULT_CELL_BOUND) -> list[LinkCell]:
    """All ``k``-cells: jointly circular systems of ``k + 1`` splits."""
    _check_bound(n, bound, "cell enumeration")
    if not 0 <= k < max_diagonals(n):
        raise ValueError(f"cell dimension {k} outside 0..{max_diagonals(n) - 1}")
    table = _chamber_table(n)
    return sorted(table.cell(m) for m in table.cell_masks(k + 1))


def count_cells(n: int, k: int, bound: int = DEFAULT_CELL_BOUND) -> int:
    _check_bound(n, bound, "cell enumeration")
    return len(_chamber_table(n).cell_masks(k + 1))


def chambers_containing(cell: LinkCell | Iterable[Split], bound: int = DEFAULT_ORDERING_BOUND) -> list[CircularOrdering]:
    splits = cell.splits if isinstance(cell, LinkCell) else tuple(cell)
    n = cell.n if isinstance(cell, LinkCell) else splits[0].n
    return compatible_orderings(splits, n, bound)


def is_cell(splits: Iterable[Split], n: int) -> bool:
    return next(circular_orderings(splits, n), None) is not None


@dataclass(frozen=True)
class Census:
    n: int
    chambers: int
    dimension: int
    ridges: int
    vertices: int
    edges: int
    cells_by_dim: tuple[int, ...]
    ridges_in_one_chamber: bool

    @staticmethod
    def formulas(n: int) -> dict[str, int]:
        c = factorial(n - 1) // 2
        d = max_diagonals(n) - 1
        return {
            "chambers": c,
            "dimension": d,
            "ridges": c * (d + 1),
            "vertices": delta(n),
            "edges": comb(delta(n), 2),
        }

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "chambers": self.chambers,
            "dimension": self.dimension,
            "ridges": self.ridges,
            "vertices": self.vertices,
            "edges": self.edges,
            "cells_by_dim": list(self.cells_by_dim),
            "ridges_in_one_chamber": self.ridges_in_one_chamber,
            "formulas": self.formulas(self.n),
        }

    def matches_formulas(self) -> bool:
        f = self.formulas(self.n)
        return all(getattr(self, key) == value for key, value in f.items())


def census(n: int, bound: int = DEFAULT_CELL_BOUND, full: bool = True) -> Census:
    """Count the cells of the link by enumeration.

    With ``full=False`` only vertices, edges, ridges and chambers are
    enumerated, which is what the n = 7 run can afford.
    """
    _check_bound(n, bound, "census")
    if n < 4:
        raise ValueError("the link is empty for n < 4")
    table = _chamber_table(n)
    top = max_diagonals(n)
    sizes = range(1, top + 1) if full else sorted({1, 2, top - 1, top} - {0})
    counts = {size: len(table.cell_masks(size)) for size in sizes}
    ridge_owner: dict[int, int] = {}
    for m in table.masks:
        for i in _bits(m):
            r = m & ~(1 << i)
            ridge_owner[r] = ridge_owner.get(r, 0) + 1
    by_dim = tuple(counts[s] for s in range(1, top + 1)) if full else ()
    return Census(
        n=n,
        chambers=counts[top],
        dimension=top - 1,
        ridges=counts[top - 1] if top > 1 else 0,
        vertices=counts[1],
        edges=counts[2] if top >= 2 else 0,
        cells_by_dim=by_dim,
        ridges_in_one_chamber=all(v == 1 for v in ridge_owner.values()),
    )


def shared_face_dims(n: int, bound: int = DEFAULT_CELL_BOUND) -> dict[tuple[CircularOrdering, CircularOrdering], int]:
    """Dimension of the common face of every pair of chambers (-1 if disjoint)."""
    _check_bound(n, bound, "shared-face enumeration")
    table = _chamber_table(n)
    out = {}
    for (a, ma), (b, mb) in combinations(zip(table.orderings, table.masks), 2):
        out[a, b] = bin(ma & mb).count("1") - 1
    return out


def max_shared_face_dim(n: int, bound: int = DEFAULT_CELL_BOUND) -> int:
    return max(shared_face_dims(n, bound).values())


def complete_one_skeleton(n: int, bound: int = DEFAULT_CELL_BOUND) -> bool:
    """True iff every pair of nontrivial splits has a common circular ordering."""
    _check_bound(n, bound, "edge enumeration")
    return count_cells(n, 1, bound) == comb(delta(n), 2)


def one_skeleton_connected(n: int, bound: int = DEFAULT_CELL_BOUND) -> bool:
    _check_bound(n, bound, "edge enumeration")
    table = _chamber_table(n)
    adj: dict[int, set[int]] = {i: set() for i in range(delta(n))}
    for m in table.cell_masks(2):
        a, b = _bits(m)
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v] - seen:
            seen.add(w)
            queue.append(w)
    return len(seen) == delta(n)


def empty_triangle_witness(n: int, bound: int = DEFAULT_CELL_BOUND) -> tuple[Split, Split, Split] | None:
    """Lexicographically least triple of splits that pairwise span edges of
    the link but jointly span no 2-cell; ``None`` if the link is flag.
    """
    _check_bound(n, bound, "empty-triangle search")
    table = _chamber_table(n)
    edges = table.cell_masks(2)
    faces = table.cell_masks(3)
    for a, b, c in combinations(range(delta(n)), 3):
        ab, ac, bc = 1 << a | 1 << b, 1 << a | 1 << c, 1 << b | 1 << c
        if ab in edges and ac in edges and bc in edges and (ab | 1 << c) not in faces:
            return table.splits[a], table.splits[b], table.splits[c]
    return None


# ---------------------------------------------------------------------------
# cell types
# ---------------------------------------------------------------------------


def _readings(seq: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    n = len(seq)
    for direction in (seq, tuple(reversed(seq))):
        for shift in range(n):
            yield direction[shift:] + direction[:shift]


def classify_cell(cell: LinkCell | Iterable[Split], bound: int = DEFAULT_ORDERING_BOUND) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Unlabeled type of a cell: its polygon with diagonals up to relabeling.

    Each diagonal is read as the set of edge positions on the side away from
    position 0; the type is the least such reading over every polygon
    carrying the cell and every rotation and reflection of it.
    """
    splits = cell.splits if isinstance(cell, LinkCell) else tuple(sorted(cell))
    n = splits[0].n
    best = None
    for pi in compatible_orderings(splits, n, bound):
        for reading in _readings(pi.seq):
            pos = {t: p for p, t in enumerate(reading)}
            shape = []
            for s in splits:
                side = s.complement if s.side_mask(reading[0]) == s.mask else s.block
                shape.append(tuple(sorted(pos[t] for t in side)))
            key = tuple(sorted(shape))
            if best is None or key < best:
                best = key
    return n, best


def cell_types(n: int, bound: int = DEFAULT_CELL_BOUND) -> dict[int, dict[tuple, int]]:
    """Number of cells of each type, by dimension."""
    out: dict[int, dict[tuple, int]] = {}
    for k in range(max_diagonals(n)):
        types: dict[tuple, int] = {}
        for c in link_cells(n, k, bound):
            t = classify_cell(c)
            types[t] = types.get(t, 0) + 1
        out[k] = types
    return out
