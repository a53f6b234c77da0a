"""Command-line interface.

Exit status: 0 success, 1 well-formed input with a negative verdict, 2 input
error, 3 exhaustive bound exceeded.  Errors are reported as one JSON object
on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import formats
from .associahedron import DEFAULT_FLAG_BOUND
from .errors import CapacityError, DecodeError, InfeasibleFit, SplitSpaceError
from .metrics import (
    DEFAULT_SEARCH_BOUND,
    DEFAULT_TOL,
    find_kalmanson_ordering,
    four_point_check,
    kalmanson_check,
    metric_from_network,
    recover_split_weights,
)
from .moduli import DEFAULT_ATLAS_BOUND, decode, glue_moduli, phi_point
from .polygon import DEFAULT_ORDERING_BOUND, apply_twists, compatible_orderings, twist_sequence
from .render import polygon_svg
from .space import DEFAULT_CELL_BOUND, census, empty_triangle_witness, link_cells, max_diagonals
from .splits import CircularOrdering

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    n_max: int | None
    tol: float
    exact: bool
    fmt: str
    decimal: bool

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError(f"--tol must be positive, got {self.tol}")
        if self.n_max is not None and self.n_max < 4:
            raise ValueError(f"--n-max must be at least 4, got {self.n_max}")

    def bound(self, default: int) -> int:
        return default if self.n_max is None else self.n_max


class _Negative(Exception):
    """Carries a report for a negative verdict (exit status 1)."""

    def __init__(self, report: object):
        self.report = report


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _json_input(path: str) -> object:
    return formats.loads(_read(path))


def _ordering_arg(text: str) -> CircularOrdering:
    try:
        return CircularOrdering(tuple(int(t) for t in text.replace(" ", "").split(",")))
    except ValueError as exc:
        raise ValueError(f"bad ordering {text!r}: {exc}") from exc


def _num(v: object, cfg: RunConfig):
    if isinstance(v, Fraction):
        return float(v) if cfg.decimal else str(v)
    return v


def _matrix(cfg: RunConfig):
    return formats.read_matrix(_read(cfg.inputs[0]), exact=cfg.exact, tol=cfg.tol)


def _check_report(result, cfg: RunConfig) -> dict:
    witness = None
    if result.witness is not None:
        witness = {k: ([_num(x, cfg) for x in v] if isinstance(v, list) else _num(v, cfg)) for k, v in result.witness.items()}
    return {
        "verdict": "pass" if result.passed else "fail",
        "witness": witness,
        "ordering": list(result.ordering.seq) if result.ordering is not None else None,
    }


def _verdict(report: dict) -> dict:
    if report["verdict"] != "pass":
        raise _Negative(report)
    return report


# ---------------------------------------------------------------------------
# subcommands; each returns a payload (dict, list of JSON lines, or text)
# ---------------------------------------------------------------------------


def cmd_check_tree_metric(cfg: RunConfig, args) -> dict:
    return _verdict(_check_report(four_point_check(_matrix(cfg)), cfg))


def cmd_check_kalmanson(cfg: RunConfig, args) -> dict:
    D = _matrix(cfg)
    if args.ordering:
        return _verdict(_check_report(kalmanson_check(D, _ordering_arg(args.ordering)), cfg))
    pi = find_kalmanson_ordering(D, bound=cfg.bound(DEFAULT_SEARCH_BOUND))
    if pi is None:
        raise _Negative({"verdict": "fail", "witness": None, "ordering": None})
    return _check_report(kalmanson_check(D, pi), cfg)


def cmd_fit_network(cfg: RunConfig, args) -> dict:
    D = _matrix(cfg)
    if args.ordering:
        pi = _ordering_arg(args.ordering)
    else:
        pi = find_kalmanson_ordering(D, bound=cfg.bound(DEFAULT_SEARCH_BOUND))
        if pi is None:
            raise _Negative({"verdict": "fail", "reason": "no Kalmanson ordering", "ordering": None})
    try:
        fit = recover_split_weights(D, pi)
    except InfeasibleFit as exc:
        raise _Negative({
            "verdict": "fail",
            "ordering": list(pi.seq),
            "residual": _num(exc.residual, cfg) if D.exact else float(exc.residual),
            "offending": [list(s.block) for s in exc.offending],
        }) from None
    # float input has no exact weights worth printing as p/q
    decimal = cfg.decimal or not D.exact
    doc = formats.split_system_to_doc(fit.system, decimal)
    residual = _num(fit.residual, cfg) if D.exact else float(fit.residual)
    doc.update({"ordering": list(pi.seq), "residual": residual, "verdict": "pass"})
    return doc


def cmd_network_metric(cfg: RunConfig, args):
    W = formats.split_system_from_doc(_json_input(cfg.inputs[0]))
    D = metric_from_network(W)
    if cfg.fmt == "text":
        return formats.write_matrix(D)
    return {"n": D.n, "rows": [[_num(v, cfg) for v in r] for r in D.rows]}


def cmd_orderings(cfg: RunConfig, args):
    W = formats.split_system_from_doc(_json_input(cfg.inputs[0]))
    found = compatible_orderings(W.system, bound=cfg.bound(DEFAULT_ORDERING_BOUND))
    if not found:
        raise _Negative({"n": W.n, "orderings": []})
    if cfg.fmt == "text":
        return "".join(str(pi) + "\n" for pi in found)
    return {"n": W.n, "orderings": [list(pi.seq) for pi in found]}


def cmd_twist_path(cfg: RunConfig, args) -> dict:
    P = formats.polygon_from_doc(_json_input(cfg.inputs[0]))
    target = _ordering_arg(args.target)
    twists = twist_sequence(P, target)
    if twists is None:
        raise _Negative({"verdict": "incompatible", "target": list(target.seq), "twists": None})
    end = apply_twists(P, twists)
    return {
        "verdict": "pass",
        "source": list(P.ordering.seq),
        "target": list(target.seq),
        "twists": [{"chord": list(t.chord.block), "side": list(t.side)} for t in twists],
        "result": formats.polygon_to_doc(end, cfg.decimal),
    }


def cmd_census(cfg: RunConfig, args):
    c = census(args.n, bound=cfg.bound(DEFAULT_CELL_BOUND), full=not args.quick)
    if cfg.fmt == "text":
        f = c.formulas(args.n)
        rows = [("quantity", "enumerated", "formula")]
        for key in ("chambers", "dimension", "ridges", "vertices", "edges"):
            rows.append((key, str(getattr(c, key)), str(f[key])))
        width = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, width)).rstrip() for r in rows]
        if c.cells_by_dim:
            lines.append("cells by dimension: " + " ".join(map(str, c.cells_by_dim)))
        return "\n".join(lines) + "\n"
    return c.as_dict()


def cmd_cells(cfg: RunConfig, args) -> list:
    dims = [args.dim] if args.dim is not None else range(max_diagonals(args.n))
    out = []
    for k in dims:
        for cell in link_cells(args.n, k, bound=cfg.bound(DEFAULT_CELL_BOUND)):
            out.append({"dim": cell.dim, "splits": [list(s.block) for s in cell.splits]})
    return out


def cmd_empty_triangle(cfg: RunConfig, args) -> dict:
    w = empty_triangle_witness(args.n, bound=cfg.bound(DEFAULT_CELL_BOUND))
    if w is None:
        raise _Negative({"n": args.n, "witness": None})
    return {"n": args.n, "witness": [list(s.block) for s in w]}


def cmd_embed(cfg: RunConfig, args) -> dict:
    p = formats.moduli_point_from_doc(_json_input(cfg.inputs[0]))
    if p.n > cfg.bound(DEFAULT_FLAG_BOUND):
        raise CapacityError(p.n, cfg.bound(DEFAULT_FLAG_BOUND), "embedding")
    return formats.point_to_doc(phi_point(p), cfg.decimal)


def cmd_decode(cfg: RunConfig, args) -> dict:
    x = formats.point_from_doc(_json_input(cfg.inputs[0]))
    chamber = _ordering_arg(args.chamber) if args.chamber else None
    try:
        p = decode(x, chamber)
    except DecodeError as exc:
        raise _Negative({"verdict": "not-in-image", "reason": str(exc)}) from None
    return formats.moduli_point_to_doc(p)


def cmd_moduli_atlas(cfg: RunConfig, args) -> list:
    atlas = glue_moduli(args.n, bound=cfg.bound(DEFAULT_ATLAS_BOUND))
    out = [
        {
            "codim": f.codim,
            "diagonals": [list(s.block) for s in f.diagonals],
            "chambers": [list(pi.seq) for pi in f.chambers],
        }
        for f in atlas.faces
    ]
    out.append({"summary": {"n": atlas.n, "chambers": len(atlas.chambers), "faces": len(atlas.faces), "images_agree": atlas.images_agree}})
    if not atlas.images_agree:
        raise _Negative(out)
    return out


def cmd_render(cfg: RunConfig, args) -> str:
    P = formats.polygon_from_doc(_json_input(cfg.inputs[0]))
    return polygon_svg(P)


COMMANDS = {
    "check-tree-metric": (cmd_check_tree_metric, "four-point test of a distance matrix"),
    "check-kalmanson": (cmd_check_kalmanson, "Kalmanson test for a given or searched ordering"),
    "fit-network": (cmd_fit_network, "recover circular split weights from a matrix"),
    "network-metric": (cmd_network_metric, "distance matrix of a weighted split system"),
    "orderings": (cmd_orderings, "circular orderings compatible with a split system"),
    "twist-path": (cmd_twist_path, "twists carrying a polygon to another ordering"),
    "census": (cmd_census, "cell counts of the link complex against the closed formulas"),
    "cells": (cmd_cells, "stream the cells of the link complex as JSON lines"),
    "empty-triangle": (cmd_empty_triangle, "least triangle of the link spanning no 2-cell"),
    "embed": (cmd_embed, "coordinates of a point of the moduli space"),
    "decode": (cmd_decode, "recover the chain of faces and coefficients of a point"),
    "moduli-atlas": (cmd_moduli_atlas, "face identifications between chamber associahedra"),
    "render": (cmd_render, "SVG drawing of a polygon with its diagonals"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=int, default=None, help="exhaustive enumeration bound")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative tolerance for float matrices")
    common.add_argument("--exact", action="store_true", help="read decimal matrix entries as exact rationals")
    common.add_argument("--format", dest="fmt", choices=("json", "text", "svg"), default=None)
    common.add_argument("--decimal", action="store_true", help="write rationals as decimals")

    parser = argparse.ArgumentParser(prog="splitspace", description="Circular split networks and their moduli.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("check-tree-metric", "check-kalmanson", "fit-network"):
            p.add_argument("matrix", help="matrix file, or - for stdin")
        if name in ("check-kalmanson", "fit-network"):
            p.add_argument("--ordering", help="comma-separated circular ordering")
        if name in ("network-metric", "orderings"):
            p.add_argument("splits", help="split-system JSON file")
        if name in ("twist-path", "render"):
            p.add_argument("polygon", help="polygon JSON file")
        if name == "twist-path":
            p.add_argument("--target", required=True, help="comma-separated target ordering")
        if name in ("census", "cells", "empty-triangle", "moduli-atlas"):
            p.add_argument("--n", type=int, required=True)
        if name == "census":
            p.add_argument("--quick", action="store_true", help="skip the full per-dimension count")
        if name == "cells":
            p.add_argument("--dim", type=int, default=None)
        if name == "embed":
            p.add_argument("point", help="moduli point JSON file")
        if name == "decode":
            p.add_argument("point", help="embedded point JSON file")
            p.add_argument("--chamber", help="comma-separated chamber ordering")
    return parser


def _emit(payload: object, cfg: RunConfig, stream) -> None:
    if isinstance(payload, str):
        stream.write(payload)
    elif isinstance(payload, list):
        for item in payload:
            stream.write(json.dumps(item, sort_keys=True) + "\n")
    else:
        stream.write(formats.dumps(payload))


def _error(kind: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return status


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    inputs = tuple(getattr(args, k) for k in ("matrix", "splits", "polygon", "point") if getattr(args, k, None))
    default_fmt = "svg" if args.command == "render" else "json"
    try:
        cfg = RunConfig(args.command, inputs, args.n_max, args.tol, args.exact, args.fmt or default_fmt, args.decimal)
        handler = COMMANDS[args.command][0]
        payload = handler(cfg, args)
    except _Negative as neg:
        _emit(neg.report, cfg, sys.stdout)
        return EXIT_NEGATIVE
    except CapacityError as exc:
        return _error("CapacityError", str(exc), EXIT_CAPACITY)
    except (SplitSpaceError, ValueError, KeyError, TypeError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INPUT)
    _emit(payload, cfg, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
