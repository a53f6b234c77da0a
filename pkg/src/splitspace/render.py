"""Static SVG drawing of a labeled polygon and its diagonals."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

from .polygon import PolygonRep


def _chord_vertices(seq: tuple[int, ...], block_mask: int) -> tuple[int, int]:
    """Vertices bounding the run of edges whose taxa form ``block_mask``
    (or its complement); edge ``p`` joins vertex ``p`` to ``p + 1``.
    """
    n = len(seq)
    inside = [bool(block_mask >> (t - 1) & 1) for t in seq]
    start = next(p for p in range(n) if inside[p] and not inside[p - 1])
    length = sum(inside)
    return start, (start + length) % n


def polygon_svg(P: PolygonRep, size: int = 320) -> str:
    n = P.n
    seq = P.ordering.seq
    c = size / 2
    radius = size * 0.38
    pts = [
        (c + radius * math.cos(2 * math.pi * k / n - math.pi / 2), c + radius * math.sin(2 * math.pi * k / n - math.pi / 2))
        for k in range(n)
    ]
    svg = ET.Element(
        "svg",
        {"xmlns": "http://www.w3.org/2000/svg", "width": str(size), "height": str(size), "viewBox": f"0 0 {size} {size}"},
    )
    ET.SubElement(svg, "polygon", {
        "class": "boundary",
        "points": " ".join(f"{x:.2f},{y:.2f}" for x, y in pts),
        "fill": "none",
        "stroke": "black",
    })
    for p, taxon in enumerate(seq):
        (x1, y1), (x2, y2) = pts[p], pts[(p + 1) % n]
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        # push the label outward from the centre
        lx, ly = c + (mx - c) * 1.15, c + (my - c) * 1.15
        label = ET.SubElement(svg, "text", {
            "class": "taxon",
            "x": f"{lx:.2f}",
            "y": f"{ly:.2f}",
            "text-anchor": "middle",
            "dominant-baseline": "middle",
        })
        label.text = str(taxon)
    weights = P.weight_map()
    for s in P.sorted_diagonals():
        a, b = _chord_vertices(seq, s.mask)
        (x1, y1), (x2, y2) = pts[a], pts[b]
        line = ET.SubElement(svg, "line", {
            "class": "chord",
            "x1": f"{x1:.2f}",
            "y1": f"{y1:.2f}",
            "x2": f"{x2:.2f}",
            "y2": f"{y2:.2f}",
            "stroke": "steelblue",
        })
        title = ET.SubElement(line, "title")
        title.text = str(s) if s not in weights else f"{s} weight {weights[s]}"
        if s in weights:
            wl = ET.SubElement(svg, "text", {
                "class": "weight",
                "x": f"{(x1 + x2) / 2:.2f}",
                "y": f"{(y1 + y2) / 2:.2f}",
                "font-size": "10",
                "fill": "steelblue",
            })
            wl.text = str(weights[s])
    return ET.tostring(svg, encoding="unicode") + "\n"
