"""Reading and writing the package's objects as JSON and matrix files.

Rationals are written as ``"p/q"`` strings (plain integers as ``"p"``) so
nothing is lost in transit; decimals in input are read exactly unless a
matrix is loaded in tolerance mode.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from fractions import Fraction

from .associahedron import AssocFace
from .errors import MalformedMatrix, MalformedPartition
from .metrics import DEFAULT_TOL, DissimilarityMatrix
from .moduli import EmbeddedPoint, ModuliPoint
from .polygon import PolygonRep
from .space import NetworkPoint
from .splits import CircularOrdering, Split, WeightedSplitSystem, split_from_block


def parse_rational(value: object) -> Fraction:
    """Exact value of an int, a ``"p/q"`` string, or a decimal string or number."""
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        # floats reach here only from callers that bypassed loads(); keep
        # the shortest decimal that round-trips rather than the binary value
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a number: {value!r}")


def format_rational(q: Fraction, decimal: bool = False) -> str | float:
    if decimal:
        return float(q)
    return str(q)


def loads(text: str) -> object:
    """``json.loads`` with decimal literals kept exact."""
    return json.loads(text, parse_float=Fraction)


def dumps(obj: object) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _ints(values: Iterable[object], what: str) -> list[int]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValueError(f"{what} must hold integers, got {v!r}")
        out.append(v)
    return out


def _ordering(doc: object) -> CircularOrdering:
    if not isinstance(doc, list):
        raise ValueError(f"an ordering must be a list of taxa, got {doc!r}")
    return CircularOrdering(tuple(_ints(doc, "ordering")))


def _block_key(s: Split) -> str:
    return ",".join(map(str, s.block))


def _split_from_key(key: str, n: int) -> Split:
    try:
        block = [int(t) for t in key.split(",")]
    except ValueError as exc:
        raise ValueError(f"bad split key {key!r}") from exc
    return split_from_block(block, n)


# ---------------------------------------------------------------------------
# split systems
# ---------------------------------------------------------------------------


def split_system_from_doc(doc: dict) -> WeightedSplitSystem:
    """``{"n": int, "splits": [{"block": [...], "weight": w}]}``; weight defaults to 1."""
    try:
        n = doc["n"]
        entries = doc["splits"]
    except (KeyError, TypeError) as exc:
        raise ValueError("split system needs keys 'n' and 'splits'") from exc
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValueError(f"n must be an integer, got {n!r}")
    pairs = []
    seen = set()
    for entry in entries:
        s = split_from_block(_ints(entry["block"], "block"), n)
        if s in seen:
            raise MalformedPartition(f"duplicate split {s}")
        seen.add(s)
        pairs.append((s, parse_rational(entry.get("weight", 1))))
    return WeightedSplitSystem(n, pairs)


def split_system_to_doc(W: WeightedSplitSystem, decimal: bool = False) -> dict:
    return {
        "n": W.n,
        "splits": [{"block": list(s.block), "weight": format_rational(w, decimal)} for s, w in W.items()],
    }


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


def read_matrix(text: str, exact: bool = False, tol: float = DEFAULT_TOL) -> DissimilarityMatrix:
    """First line ``n``, then ``n`` rows, optionally each led by a label.

    Integers and ``p/q`` entries are always exact.  Decimal entries are
    floats (compared with the tolerance) unless ``exact`` is set.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MalformedMatrix("empty matrix file")
    try:
        n = int(lines[0][0])
    except ValueError as exc:
        raise MalformedMatrix(f"first line must be the taxon count, got {lines[0][0]!r}") from exc
    rows = lines[1:]
    if len(rows) != n:
        raise MalformedMatrix(f"expected {n} rows, found {len(rows)}")
    out = []
    for k, tokens in enumerate(rows, start=1):
        if len(tokens) == n + 1:
            tokens = tokens[1:]
        if len(tokens) != n:
            raise MalformedMatrix(f"row {k} has {len(tokens)} entries, expected {n}")
        out.append([_entry(t, exact, k) for t in tokens])
    return DissimilarityMatrix(out, tol)


def _entry(token: str, exact: bool, row: int):
    try:
        if exact or "/" in token or token.lstrip("+-").isdigit():
            return Fraction(token)
        return float(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedMatrix(f"row {row}: bad entry {token!r}") from exc


def write_matrix(D: DissimilarityMatrix) -> str:
    rows = [str(D.n)]
    for r in D.rows:
        rows.append(" ".join(str(v) for v in r))
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# polygons, faces, embedded points
# ---------------------------------------------------------------------------


def polygon_to_doc(P: PolygonRep, decimal: bool = False) -> dict:
    weights = P.weight_map()
    diagonals = []
    for s in P.sorted_diagonals():
        entry: dict = {"block": list(s.block)}
        if s in weights:
            entry["weight"] = format_rational(weights[s], decimal)
        diagonals.append(entry)
    return {"ordering": list(P.ordering.seq), "diagonals": diagonals}


def polygon_from_doc(doc: dict) -> PolygonRep:
    ordering = _ordering(doc["ordering"])
    n = ordering.n
    splits = []
    weights = []
    for entry in doc.get("diagonals", []):
        s = split_from_block(_ints(entry["block"], "block"), n)
        if s in splits:
            raise MalformedPartition(f"duplicate diagonal {s}")
        splits.append(s)
        if "weight" in entry:
            weights.append((s, parse_rational(entry["weight"])))
    return PolygonRep(ordering, frozenset(splits), tuple(weights))


def face_to_doc(f: AssocFace) -> dict:
    return {"ordering": list(f.labeling.seq), "diagonals": [{"block": list(s.block)} for s in sorted(f.diagonals)]}


def face_from_doc(doc: dict, labeling: CircularOrdering | None = None) -> AssocFace:
    P = polygon_from_doc(doc)
    if labeling is not None and P.ordering != labeling:
        raise ValueError(f"face drawn on {P.ordering}, expected {labeling}")
    return AssocFace(P.ordering, P.diagonals)


def moduli_point_to_doc(p: ModuliPoint) -> dict:
    return {
        "labeling": list(p.labeling.seq),
        "subflag": [face_to_doc(f) for f in p.subflag],
        "coefficients": [str(a) for a in p.coefficients],
    }


def moduli_point_from_doc(doc: dict) -> ModuliPoint:
    labeling = _ordering(doc["labeling"])
    subflag = tuple(face_from_doc(f, labeling) for f in doc["subflag"])
    coeffs = tuple(parse_rational(a) for a in doc["coefficients"])
    return ModuliPoint(labeling, subflag, coeffs)


def point_to_doc(x: NetworkPoint, decimal: bool = False) -> dict:
    doc: dict = {
        "n": x.n,
        "coordinates": {_block_key(s): format_rational(v, decimal) for s, v in x.coords.items()},
    }
    chamber = getattr(x, "chamber", None)
    if chamber is not None:
        doc["chamber"] = list(chamber.seq)
    return doc


def point_from_doc(doc: dict) -> EmbeddedPoint:
    n = doc["n"]
    coords = {_split_from_key(k, n): parse_rational(v) for k, v in doc["coordinates"].items()}
    chamber = _ordering(doc["chamber"]) if "chamber" in doc else None
    return EmbeddedPoint(n, coords, chamber)
