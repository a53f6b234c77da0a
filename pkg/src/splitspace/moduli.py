"""Coordinates of associahedron barycenters inside the network fan, and the
exact inverse map.

A triangulation ``v`` of the chamber's polygon goes to the point with
``1/(n-3)`` on each of its diagonals.  A face goes to the centroid of its
triangulations, which has a closed form: a diagonal ``d`` of a face gets
``1/(n-3)``, one crossing the face gets 0, and one splitting an ``r``-sided
subpolygon into an ``s``-gon and a ``t``-gon gets
``C_{s-2} C_{t-2} / C_{s+t-4} / (n-3)``.  A point of the barycentric
subdivision, a convex combination along a chain of faces, maps linearly.

Arithmetic runs on ``gmpy2.mpq`` over unlabeled polygon positions; the
public types carry ``Fraction`` values keyed by splits.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .associahedron import (
    AssocFace,
    Geometry,
    Subflag,
    catalan,
    chart,
    geometry,
)
from .errors import CapacityError, ConsistencyError, DecodeError, RepresentationError
from .polygon import PolygonRep, twist
from .space import NetworkPoint, chambers
from .splits import CircularOrdering, Split, is_arc

DEFAULT_ATLAS_BOUND = 6

_ZERO = mpq(0)
_ONE = mpq(1)


def _frac(q: mpq) -> Fraction:
    # mpq is already in lowest terms with a positive denominator, so skip
    # Fraction's normalization (it dominates decode round trips otherwise)
    f = object.__new__(Fraction)
    f._numerator = int(q.numerator)
    f._denominator = int(q.denominator)
    return f


def ear_ratio(r: int) -> Fraction:
    """Closed-form share of a diagonal cutting a triangle off an r-gon,
    relative to ``1/(n-3)``: ``C_{r-3} / C_{r-2}``.
    """
    if r < 4:
        raise ValueError(f"an ear needs a subpolygon with r >= 4, got {r}")
    return Fraction(catalan(r - 3), catalan(r - 2))


class _Embedding:
    """Per-n cache of barycenter vectors and decoding tests over positions."""

    def __init__(self, n: int):
        if n < 4:
            raise ValueError(f"the embedding needs n >= 4, got {n}")
        self.n = n
        self.g: Geometry = geometry(n)
        self.dim = len(self.g.diagonals)
        self.u = mpq(1, n - 3)
        self._phi: dict[int, tuple[mpq, ...]] = {}
        self._tests: dict[int, list[tuple[mpq, tuple[int, ...]]]] = {}
        self._sparse: dict[int, tuple[tuple[int, mpq], ...]] = {}

    def phi(self, face: int) -> tuple[mpq, ...]:
        vec = self._phi.get(face)
        if vec is not None:
            return vec
        g, u = self.g, self.u
        out = []
        for d, (a, b) in enumerate(g.diagonals):
            if face >> d & 1:
                out.append(u)
            elif g.cross[d] & face:
                out.append(_ZERO)
            else:
                region = g.region_of(face, d)
                r = len(region)
                s = sum(1 for v in region if a <= v <= b)
                t = r - s + 2
                out.append(u * catalan(s - 2) * catalan(t - 2) / catalan(s + t - 4))
        vec = tuple(out)
        self._phi[face] = vec
        return vec

    def centroid(self, face: int) -> tuple[mpq, ...]:
        verts = self.g.vertices_of(face)
        counts = [0] * self.dim
        for t in verts:
            for d in range(self.dim):
                if t >> d & 1:
                    counts[d] += 1
        scale = self.u / len(verts)
        return tuple(c * scale for c in counts)

    def tests(self, face: int) -> list[tuple[mpq, tuple[int, ...]]]:
        """For each subpolygon with at least four sides: its ear ratio and ears."""
        cached = self._tests.get(face)
        if cached is not None:
            return cached
        out = []
        for region in self.g.regions(face):
            if len(region) >= 4:
                rho = self.u * mpq(ear_ratio(len(region)))
                out.append((rho, tuple(self.g.ears(region))))
        self._tests[face] = out
        return out

    def sparse(self, face: int) -> tuple[tuple[int, mpq], ...]:
        cached = self._sparse.get(face)
        if cached is None:
            cached = tuple((d, v) for d, v in enumerate(self.phi(face)) if v)
            self._sparse[face] = cached
        return cached

    def combine(self, faces: Sequence[int], coeffs: Sequence[mpq]) -> list[mpq]:
        acc = [_ZERO] * self.dim
        for f, a in zip(faces, coeffs):
            for d, v in self.sparse(f):
                acc[d] += a * v
        return acc

    def decode(self, x: Sequence[mpq]) -> tuple[list[int], list[mpq]]:
        """Recover the chain of faces and its coefficients from a position vector.

        The deepest face ``f_0`` is read off the coordinates equal to
        ``1/(n-3)``.  While some subpolygon of the current face carries a
        coordinate pattern that differs from ``rho * (remaining mass)`` on
        its ears, the next coefficient is the least ear ratio over the
        failing subpolygons, and the next face collects the diagonals whose
        coordinate already equals what it would be if they belonged to every
        remaining face.
        """
        g, u, dim = self.g, self.u, self.dim
        total = sum(x, _ZERO)
        if total != _ONE:
            raise DecodeError(f"coordinates sum to {_frac(total)}, not 1")
        face = 0
        for d in range(dim):
            if x[d] > u:
                raise DecodeError(f"coordinate {_frac(x[d])} at position {d} exceeds 1/{self.n - 3}")
            if x[d] == u:
                face |= 1 << d
        if face not in g.face_set:
            raise DecodeError("coordinates equal to 1/(n-3) sit on crossing diagonals")
        # residual[d] = x_d minus the part explained by faces fixed so far
        residual = list(x)
        mass = _ZERO
        faces: list[int] = []
        coeffs: list[mpq] = []
        while True:
            remaining = _ONE - mass
            best = None
            for rho, ears in self.tests(face):
                target = rho * remaining
                low = min(residual[e] for e in ears)
                if low == target and all(residual[e] == target for e in ears):
                    continue
                m = low / rho
                if best is None or m < best:
                    best = m
            faces.append(face)
            if best is None:
                coeffs.append(remaining)
                break
            if not _ZERO < best < remaining:
                raise DecodeError(
                    f"ear test on face {len(faces) - 1} gives coefficient {_frac(best)} outside (0, {_frac(remaining)})"
                )
            coeffs.append(best)
            mass += best
            for d, v in self.sparse(face):
                residual[d] -= best * v
            rest = u * (_ONE - mass)
            grown = face
            for d in range(dim):
                if residual[d] == rest and not face >> d & 1:
                    grown |= 1 << d
            if grown == face or grown not in g.face_set:
                raise DecodeError(f"membership test after face {len(faces) - 1} yields no larger face")
            face = grown
        # what is left must be exactly the last coefficient times the last image
        last = coeffs[-1]
        for d, v in enumerate(self.phi(face)):
            if residual[d] != last * v:
                raise DecodeError("decoded chain does not reproduce the coordinates")
        return faces, coeffs


@lru_cache(maxsize=None)
def _embedding(n: int) -> _Embedding:
    return _Embedding(n)


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------


class EmbeddedPoint(NetworkPoint):
    """Point of the fan with coordinates summing to 1, tagged with a chamber
    whose ordering makes its support circular.
    """

    # _vec keeps the exact position vector over the chamber's diagonals
    # when the point was computed rather than parsed
    __slots__ = ("chamber", "_vec")

    def __init__(self, n: int, coords: Mapping[Split, object], chamber: CircularOrdering | None = None):
        super().__init__(n, coords, chamber)
        if self.total() != 1:
            raise ValueError(f"coordinates sum to {self.total()}, not 1")
        object.__setattr__(self, "chamber", chamber)
        object.__setattr__(self, "_vec", None)

    @classmethod
    def _from_positions(cls, chamber: CircularOrdering, vec: Sequence[mpq]) -> EmbeddedPoint:
        splits, _, order = chart(chamber)
        pt = object.__new__(cls)
        coords = {splits[i]: _frac(vec[i]) for i in order if vec[i]}
        object.__setattr__(pt, "n", chamber.n)
        object.__setattr__(pt, "_coords", coords)
        object.__setattr__(pt, "chamber", chamber)
        object.__setattr__(pt, "_vec", tuple(vec))
        return pt

    def positions(self, chamber: CircularOrdering) -> list[mpq]:
        """Coordinates on the diagonals of ``chamber``, in polygon position order."""
        splits, index, _ = chart(chamber)
        for s in self._coords:
            if s not in index:
                raise RepresentationError(s, chamber)
        return [mpq(self._coords[s]) if s in self._coords else _ZERO for s in splits]

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {v}" for s, v in self._coords.items())
        return f"EmbeddedPoint(n={self.n}, {{{body}}})"


@dataclass(frozen=True)
class ModuliPoint:
    """Convex combination of face barycenters along a chain of faces."""

    labeling: CircularOrdering
    subflag: Subflag
    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        subflag = tuple(self.subflag)
        coeffs = tuple(a if type(a) is Fraction else Fraction(a) for a in self.coefficients)
        object.__setattr__(self, "subflag", subflag)
        object.__setattr__(self, "coefficients", coeffs)
        if not subflag:
            raise ValueError("a subflag needs at least one face")
        if len(coeffs) != len(subflag):
            raise ValueError(f"{len(coeffs)} coefficients for {len(subflag)} faces")
        for f in subflag:
            if f.labeling is not self.labeling and f.labeling != self.labeling:
                raise ValueError(f"face labeled {f.labeling} in chamber {self.labeling}")
        for lo, hi in zip(subflag, subflag[1:]):
            if not (lo.mask & hi.mask == lo.mask and lo.mask != hi.mask):
                raise ValueError("subflag faces must strictly increase")
        if any(a.numerator <= 0 for a in coeffs):
            raise ValueError("coefficients must be positive")
        total = sum(map(mpq, coeffs), _ZERO)
        if total != 1:
            raise ValueError(f"coefficients sum to {_frac(total)}, not 1")

    @classmethod
    def _trusted(cls, labeling: CircularOrdering, subflag: Subflag, coefficients: tuple[Fraction, ...]) -> ModuliPoint:
        p = object.__new__(cls)
        object.__setattr__(p, "labeling", labeling)
        object.__setattr__(p, "subflag", subflag)
        object.__setattr__(p, "coefficients", coefficients)
        return p

    @property
    def n(self) -> int:
        return self.labeling.n


def _require_face(f: AssocFace) -> None:
    if f.n < 4:
        raise ValueError(f"the embedding needs n >= 4, got {f.n}")


def phi_vertex(v: AssocFace) -> EmbeddedPoint:
    _require_face(v)
    if not v.is_triangulation():
        raise ValueError(f"{len(v.diagonals)} diagonals is not a triangulation of the {v.n}-gon")
    return phi_face(v)


def phi_face(f: AssocFace) -> EmbeddedPoint:
    """Barycenter of a face, by the closed form."""
    _require_face(f)
    return EmbeddedPoint._from_positions(f.labeling, _embedding(f.n).phi(f.mask))


def phi_face_centroid(f: AssocFace) -> EmbeddedPoint:
    """Barycenter of a face as the average of its triangulations' images."""
    _require_face(f)
    return EmbeddedPoint._from_positions(f.labeling, _embedding(f.n).centroid(f.mask))


def phi_point(p: ModuliPoint) -> EmbeddedPoint:
    emb = _embedding(p.n)
    vec = emb.combine([f.mask for f in p.subflag], [mpq(a) for a in p.coefficients])
    return EmbeddedPoint._from_positions(p.labeling, vec)


def decode(x: NetworkPoint, chamber: CircularOrdering | None = None) -> ModuliPoint:
    """The unique chain of faces and coefficients whose image is ``x``.

    The chamber defaults to the one ``x`` carries; failing that, every
    chamber containing the support is tried in canonical order.
    """
    if x.n < 4:
        raise DecodeError(f"the embedding needs n >= 4, got {x.n}")
    if chamber is None:
        chamber = getattr(x, "chamber", None)
    if chamber is not None:
        return _decode_in(x, chamber)
    candidates = [pi for pi in chambers(x.n, bound=max(x.n, 9)) if all(is_arc(s.mask, pi.seq) for s in x.support)]
    if not candidates:
        raise DecodeError("support is circular for no ordering")
    first_error = None
    for pi in candidates:
        try:
            return _decode_in(x, pi)
        except DecodeError as exc:
            first_error = first_error or exc
    raise first_error


def _decode_in(x: NetworkPoint, chamber: CircularOrdering) -> ModuliPoint:
    if chamber.n != x.n:
        raise DecodeError(f"chamber on {chamber.n} taxa for a point on {x.n}")
    vec = getattr(x, "_vec", None)
    if vec is None or x.chamber != chamber:
        splits, index, _ = chart(chamber)
        vec = [_ZERO] * len(splits)
        for s, v in x._coords.items():
            i = index.get(s)
            if i is None:
                raise DecodeError(f"split {s} is not a diagonal of chamber {chamber}")
            vec[i] = mpq(v)
    masks, coeffs = _embedding(x.n).decode(vec)
    if any(a <= 0 for a in coeffs) or sum(coeffs, _ZERO) != 1:
        raise ConsistencyError(f"decoded coefficients {coeffs} are not a convex combination")
    # decode guarantees a strictly increasing chain, so skip revalidation
    return ModuliPoint._trusted(
        chamber,
        tuple(AssocFace.from_mask(chamber, m) for m in masks),
        tuple(_frac(a) for a in coeffs),
    )


def affine_rank(vectors: Sequence[Sequence[object]]) -> int:
    """Affine dimension of a point set, by exact elimination on differences."""
    if not vectors:
        return -1
    base = [mpq(v) for v in vectors[0]]
    rows = [[mpq(v) - b for v, b in zip(vec, base)] for vec in vectors[1:]]
    rank = 0
    cols = len(base)
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                factor = rows[r][c] / p[c]
                rows[r] = [a - factor * b for a, b in zip(rows[r], p)]
        rank += 1
    return rank


def flag_simplex_dim(subflag: Subflag) -> int:
    """Affine dimension spanned by the barycenters of a chain of faces."""
    if not subflag:
        raise ValueError("empty subflag")
    emb = _embedding(subflag[0].n)
    return affine_rank([emb.phi(f.mask) for f in subflag])


# ---------------------------------------------------------------------------
# gluing chambers into the moduli space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GluedFace:
    """One face of the moduli space: a diagonal set and the chambers whose
    copies of it are identified by twisting along those diagonals.
    """

    diagonals: tuple[Split, ...]
    chambers: tuple[CircularOrdering, ...]

    @property
    def codim(self) -> int:
        return len(self.diagonals)


@dataclass(frozen=True)
class ModuliAtlas:
    n: int
    chambers: tuple[CircularOrdering, ...]
    faces: tuple[GluedFace, ...]
    images_agree: bool

    def by_codim(self, k: int) -> list[GluedFace]:
        return [f for f in self.faces if f.codim == k]

    def facet_partners(self) -> dict[tuple[CircularOrdering, Split], list[CircularOrdering]]:
        """For each codim-1 face of each chamber, the other chambers sharing it."""
        out = {}
        for f in self.by_codim(1):
            for pi in f.chambers:
                out[pi, f.diagonals[0]] = [q for q in f.chambers if q != pi]
        return out


def glue_moduli(n: int, bound: int = DEFAULT_ATLAS_BOUND) -> ModuliAtlas:
    """Identify faces of the ``(n-1)!/2`` chamber associahedra.

    A face of one chamber and a face of another are the same face of the
    moduli space when a sequence of twists along diagonals of the face
    carries one labeled polygon to the other.  Every identified pair is
    checked to have one and the same image in global coordinates.
    """
    if n > bound:
        raise CapacityError(n, bound, "moduli atlas")
    if n < 4:
        raise ValueError(f"the moduli atlas needs n >= 4, got {n}")
    chamber_list = chambers(n)
    g = geometry(n)
    parent: dict[tuple[CircularOrdering, frozenset[Split]], tuple] = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    nodes = []
    for pi in chamber_list:
        for m in g.faces:
            face = AssocFace.from_mask(pi, m)
            key = (pi, face.diagonals)
            parent[key] = key
            nodes.append(key)
    for pi, diagonals in nodes:
        poly = PolygonRep(pi, diagonals)
        for d in diagonals:
            other = (twist(poly, d).ordering, diagonals)
            ra, rb = find((pi, diagonals)), find(other)
            if ra != rb:
                parent[ra] = rb
    classes: dict[tuple, list] = {}
    for key in nodes:
        classes.setdefault(find(key), []).append(key)
    glued = []
    agree = True
    for members in classes.values():
        diagonals = members[0][1]
        images = {phi_face(AssocFace(pi, diagonals)) for pi, _ in members}
        agree = agree and len(images) == 1
        glued.append(GluedFace(tuple(sorted(diagonals)), tuple(sorted(pi for pi, _ in members))))
    glued.sort(key=lambda f: (f.codim, f.diagonals, f.chambers))
    return ModuliAtlas(n, tuple(chamber_list), tuple(glued), agree)


def is_cycle_of_segments(atlas: ModuliAtlas) -> bool:
    """True when the top faces and codim-1 faces form one cycle: every top
    face has two endpoints and every endpoint joins two top faces.
    """
    tops = atlas.by_codim(0)
    ends = atlas.by_codim(1)
    if any(len(e.chambers) != 2 for e in ends):
        return False
    adj: dict[CircularOrdering, set] = {t.chambers[0]: set() for t in tops}
    for e in ends:
        a, b = e.chambers
        adj[a].add(b)
        adj[b].add(a)
    if any(len(v) != 2 for v in adj.values()):
        return False
    start = next(iter(adj))
    seen, prev, cur = {start}, None, start
    while True:
        nxt = next(w for w in adj[cur] if w != prev)
        if nxt == start:
            break
        if nxt in seen:
            return False
        seen.add(nxt)
        prev, cur = cur, nxt
    return len(seen) == len(adj)
