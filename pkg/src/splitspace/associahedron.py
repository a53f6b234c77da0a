"""Faces of the associahedron as labeled polygons with noncrossing diagonals.

The chamber of a circular ordering is the polygon whose edge ``p`` (from
vertex ``p`` to vertex ``p + 1``) carries taxon ``seq[p]``.  A face is a set
of pairwise noncrossing diagonals; the empty set is the whole polytope and
the triangulations are its vertices.  Codimension equals the number of
diagonals.

All enumeration happens once per ``n`` on unlabeled vertex pairs
(:class:`Geometry`); labeled faces are translated through the chamber's
ordering.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb

from .errors import CapacityError, RepresentationError
from .splits import CircularOrdering, Split, is_arc, mask_of, pairwise_compatible

DEFAULT_FLAG_BOUND = 8


def catalan(k: int) -> int:
    """``C_k = binom(2k, k) / (k + 1)``; ``C_{r-2}`` triangulates an r-gon."""
    if k < 0:
        raise ValueError(f"catalan index must be >= 0, got {k}")
    return comb(2 * k, k) // (k + 1)


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class Geometry:
    """Unlabeled n-gon: diagonals as vertex pairs, faces as index bitmasks."""

    def __init__(self, n: int):
        if n < 4:
            raise ValueError(f"polygon needs n >= 4 for diagonals, got {n}")
        self.n = n
        self.diagonals: list[tuple[int, int]] = [
            (a, b) for a in range(n) for b in range(a + 2, n) if not (a == 0 and b == n - 1)
        ]
        self.index = {d: i for i, d in enumerate(self.diagonals)}
        self.cross = [0] * len(self.diagonals)
        for i, (a, b) in enumerate(self.diagonals):
            for j, (c, d) in enumerate(self.diagonals):
                if a < c < b < d or c < a < d < b:
                    self.cross[i] |= 1 << j
        self.faces = self._noncrossing_sets()
        self.face_set = frozenset(self.faces)
        self.triangulations = [f for f in self.faces if bin(f).count("1") == n - 3]
        self._regions: dict[int, tuple[tuple[int, ...], ...]] = {}

    def _noncrossing_sets(self) -> list[int]:
        out = []
        m = len(self.diagonals)

        def grow(start: int, mask: int, blocked: int) -> None:
            out.append(mask)
            for i in range(start, m):
                if not blocked >> i & 1:
                    grow(i + 1, mask | 1 << i, blocked | self.cross[i])

        grow(0, 0, 0)
        return sorted(out, key=lambda f: (bin(f).count("1"), _bits(f)))

    def is_noncrossing(self, mask: int) -> bool:
        return mask in self.face_set

    def regions(self, face: int) -> tuple[tuple[int, ...], ...]:
        """Subpolygons cut out by the face, each as its ascending vertex list."""
        cached = self._regions.get(face)
        if cached is not None:
            return cached
        regions = [tuple(range(self.n))]
        for i in _bits(face):
            a, b = self.diagonals[i]
            for k, region in enumerate(regions):
                if a in region and b in region:
                    inner = tuple(v for v in region if a <= v <= b)
                    outer = tuple(v for v in region if v <= a or v >= b)
                    regions[k:k + 1] = [inner, outer]
                    break
        result = tuple(sorted(regions))
        self._regions[face] = result
        return result

    def region_of(self, face: int, diag: int) -> tuple[int, ...] | None:
        a, b = self.diagonals[diag]
        for region in self.regions(face):
            if a in region and b in region:
                return region
        return None

    def ears(self, region: tuple[int, ...]) -> list[int]:
        """Diagonals of a subpolygon cutting off one triangle."""
        r = len(region)
        if r < 4:
            return []
        out = set()
        for i in range(r):
            a, b = sorted((region[i - 1], region[(i + 1) % r]))
            out.add(self.index[a, b])
        return sorted(out)

    def vertices_of(self, face: int) -> list[int]:
        return [t for t in self.triangulations if t & face == face]


@lru_cache(maxsize=None)
def geometry(n: int) -> Geometry:
    return Geometry(n)


@lru_cache(maxsize=4096)
def _chart(ordering: CircularOrdering) -> tuple[tuple[Split, ...], dict[Split, int], tuple[int, ...]]:
    """Splits of the diagonals of ``ordering``'s polygon in geometry order,
    the inverse table, and the geometry indices sorted by split.
    """
    seq, n = ordering.seq, ordering.n
    splits = tuple(Split.from_mask(mask_of(seq[a:b]), n) for a, b in geometry(n).diagonals)
    order = tuple(sorted(range(len(splits)), key=splits.__getitem__))
    return splits, {s: i for i, s in enumerate(splits)}, order


def chart(ordering: CircularOrdering) -> tuple[tuple[Split, ...], dict[Split, int], tuple[int, ...]]:
    return _chart(ordering)


def diagonal_splits(ordering: CircularOrdering) -> tuple[Split, ...]:
    return _chart(ordering)[0]


def face_mask(ordering: CircularOrdering, splits: Iterable[Split]) -> int:
    index = _chart(ordering)[1]
    m = 0
    for s in splits:
        try:
            m |= 1 << index[s]
        except KeyError:
            raise RepresentationError(s, ordering) from None
    return m


def splits_of_mask(ordering: CircularOrdering, mask: int) -> frozenset[Split]:
    splits = _chart(ordering)[0]
    return frozenset(splits[i] for i in _bits(mask))


@dataclass(frozen=True)
class AssocFace:
    """A face of the associahedron of one chamber: noncrossing diagonals."""

    labeling: CircularOrdering
    diagonals: frozenset[Split]
    mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        diagonals = frozenset(self.diagonals)
        object.__setattr__(self, "diagonals", diagonals)
        for s in diagonals:
            if s.n != self.labeling.n or s.is_trivial() or not is_arc(s.mask, self.labeling.seq):
                raise RepresentationError(s, self.labeling)
        for a, b in combinations(diagonals, 2):
            if not pairwise_compatible(a, b):
                raise ValueError(f"diagonals {a} and {b} cross")
        object.__setattr__(self, "mask", face_mask(self.labeling, diagonals))

    @classmethod
    def from_mask(cls, labeling: CircularOrdering, mask: int) -> AssocFace:
        return _cached_face(labeling, mask)

    @property
    def n(self) -> int:
        return self.labeling.n

    @property
    def codim(self) -> int:
        return len(self.diagonals)

    def is_triangulation(self) -> bool:
        return len(self.diagonals) == self.n - 3

    def __le__(self, other: AssocFace) -> bool:
        return self.labeling == other.labeling and self.diagonals <= other.diagonals

    def __lt__(self, other: AssocFace) -> bool:
        return self.labeling == other.labeling and self.diagonals < other.diagonals

    def sort_key(self) -> tuple:
        return len(self.diagonals), sorted(self.diagonals)


@lru_cache(maxsize=65536)
def _cached_face(labeling: CircularOrdering, mask: int) -> AssocFace:
    return AssocFace(labeling, splits_of_mask(labeling, mask))


def faces(labeling: CircularOrdering, k: int | None = None) -> list[AssocFace]:
    """Faces with ``k`` diagonals (all faces when ``k`` is None), canonically sorted."""
    g = geometry(labeling.n)
    if k is not None and not 0 <= k <= labeling.n - 3:
        raise ValueError(f"codimension {k} outside 0..{labeling.n - 3}")
    out = [
        AssocFace.from_mask(labeling, f)
        for f in g.faces
        if k is None or bin(f).count("1") == k
    ]
    return sorted(out, key=AssocFace.sort_key)


def face_vertices(face: AssocFace) -> list[AssocFace]:
    """Triangulations containing the face."""
    g = geometry(face.n)
    return sorted(
        (AssocFace.from_mask(face.labeling, t) for t in g.vertices_of(face.mask)),
        key=AssocFace.sort_key,
    )


def subpolygon_sizes(face: AssocFace) -> list[int]:
    return [len(r) for r in geometry(face.n).regions(face.mask)]


def vertex_count_formula(face: AssocFace) -> int:
    """Triangulations through a face: product of ``C_{r-2}`` over its subpolygons."""
    out = 1
    for r in subpolygon_sizes(face):
        out *= catalan(r - 2)
    return out


# ---------------------------------------------------------------------------
# flags
# ---------------------------------------------------------------------------

Subflag = tuple[AssocFace, ...]


def _check_flag_bound(n: int, bound: int) -> None:
    if n > bound:
        raise CapacityError(n, bound, "flag enumeration")


def full_flag_masks(n: int) -> Iterator[tuple[int, ...]]:
    """Chains ``0 = f_0 < f_1 < ... < f_{n-3}`` with ``|f_i| = i``."""
    g = geometry(n)
    for t in g.triangulations:
        idx = _bits(t)
        seen = set()
        for order in permutations(idx):
            chain = [0]
            for i in order:
                chain.append(chain[-1] | 1 << i)
            chain = tuple(chain)
            if chain not in seen:
                seen.add(chain)
                yield chain


def flags(labeling: CircularOrdering, bound: int = DEFAULT_FLAG_BOUND) -> list[Subflag]:
    """Full flags of the chamber's associahedron, increasing diagonal sets."""
    _check_flag_bound(labeling.n, bound)
    out = [
        tuple(AssocFace.from_mask(labeling, f) for f in chain)
        for chain in full_flag_masks(labeling.n)
    ]
    return sorted(out, key=lambda fl: [f.sort_key() for f in fl])


def subflags(flag: Subflag) -> list[Subflag]:
    """Every nonempty subchain of a chain of faces."""
    out = []
    for size in range(1, len(flag) + 1):
        out.extend(combinations(flag, size))
    return out


def chain_masks(n: int) -> list[tuple[int, ...]]:
    """Every nonempty strictly increasing chain of faces of the n-gon."""
    g = geometry(n)
    by_face = g.faces
    up: dict[int, list[int]] = {f: [h for h in by_face if h != f and h & f == f] for f in by_face}
    out: list[tuple[int, ...]] = []

    def extend(chain: tuple[int, ...]) -> None:
        out.append(chain)
        for h in up[chain[-1]]:
            extend(chain + (h,))

    for f in by_face:
        extend((f,))
    return out


def all_subflags(labeling: CircularOrdering, bound: int = DEFAULT_FLAG_BOUND) -> list[Subflag]:
    _check_flag_bound(labeling.n, bound)
    return [tuple(AssocFace.from_mask(labeling, f) for f in chain) for chain in chain_masks(labeling.n)]


def bracketing(face: AssocFace) -> str:
    """Display the face as a bracketing of the taxa on edges ``0..n-2``;
    the last edge of the labeling plays the root.
    """
    seq, n = face.labeling.seq, face.n
    g = geometry(n)
    opens = [0] * n
    closes = [0] * n
    for i in _bits(face.mask):
        a, b = g.diagonals[i]
        # edges a..b-1 never reach the root edge n-1
        opens[a] += 1
        closes[b - 1] += 1
    parts = []
    for p in range(n - 1):
        parts.append("(" * opens[p] + str(seq[p]) + ")" * closes[p])
    return " ".join(parts) + f" | {seq[-1]}"
