"""JSON-ready summaries and the schematic cusp SVG."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .cusp import NormalCurve, heights
from .holonomy import HolonomyResult
from .rescue import BoundReport, RescueResult
from .triangulation import AngleVector, Triangulation
from .veering import VeeringData

SCHEMA = "veerangle-report/1"


def frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def angles(theta: AngleVector) -> list[str]:
    return [frac(x) for x in theta.entries]


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def envelope(command: str, source: str | None, body: dict) -> dict:
    doc = {"schema": SCHEMA, "command": command}
    if source is not None:
        doc["input"] = digest(source)
    doc.update(body)
    return doc


def triangulation_summary(tri: Triangulation) -> dict:
    return {
        "name": tri.name,
        "tetrahedra": tri.n,
        "edge_degrees": [e.degree for e in tri.edge_classes],
        "cusps": len(tri.vertex_classes),
    }


def curve_json(curve: NormalCurve) -> dict:
    return {"torus": curve.torus, "segments": [list(s) for s in curve.segments]}


def veering_json(V: VeeringData) -> dict:
    return {
        "taut": list(V.taut.pi_pair),
        "colors": list(V.coloring.colors),
        "hinges": list(V.hinge),
        "transverse": V.transverse is not None,
        "d_max": V.d_max,
        "e_max": V.tri.e_max,
    }


def ladders_json(V: VeeringData) -> dict:
    cusp, system = V.cusp, V.ladders
    tori = []
    for cid in range(len(cusp.components)):
        rows = []
        for L in system.by_torus(cid):
            row: dict[str, Any] = {
                "id": L.id,
                "triangles": list(L.triangles),
                "rungs": list(L.rungs),
                "poles": list(L.poles),
                "ascending": L.ascending,
                "slope": list(cusp.curve_class(L.core(cusp, system.roles))),
            }
            if L.ascending:
                H = heights(cusp, system, L)
                row["heights"] = [H[T] for T in L.triangles]
            rows.append(row)
        basis = cusp.homology_basis(cid)
        tori.append({
            "torus": cid,
            "ladders": rows,
            "k": len(rows) // 2,
            "basis": [curve_json(c) for c in basis.curves],
            "basis_form": basis.form,
        })
    poles = [{"id": p.id, "torus": p.torus, "color": p.color, "vertices": list(p.vertices)}
             for p in system.poles]
    return {"tori": tori, "poles": poles}


def rescue_json(res: RescueResult) -> dict:
    return {
        "angles": angles(res.theta),
        "min_angle": frac(res.theta.min()),
        "iterations": res.iterations,
        "initial_flat_slots": res.initial_flat,
        "flat_counts": list(res.flat_counts),
    }


def bound_json(theta: AngleVector, report: BoundReport, averaged: bool) -> dict:
    return {
        "angles": angles(theta),
        "min_angle": frac(report.min_angle),
        "certified_bound": frac(report.certified_bound),
        "d": report.d,
        "d_max": report.d_max,
        "e_max": report.e_max,
        "kappa": frac(report.kappa),
        "satisfied": report.satisfied,
        "averaged_over_double_cover": averaged,
    }


def holonomy_json(res: HolonomyResult) -> dict:
    doc = {
        "angles": angles(res.theta),
        "classes": [list(c) for c in res.classes],
        "values": [frac(v) for v in res.values],
        "targets": [frac(v) for v in res.targets],
        "match": res.matches,
        "k": list(res.ladder_pairs),
        "curves": [curve_json(c) for c in res.curves],
    }
    if res.multiplicities:
        doc["m"] = list(res.multiplicities)
        doc["m_greater_than_one"] = list(res.multiple_crossings)
    return doc


# -- SVG --------------------------------------------------------------------

_COLORS = {"red": "#c0392b", "blue": "#2e6fbd"}


def cusp_svg(V: VeeringData, torus: int = 0, cell: int = 40) -> str:
    """Ladders as vertical zigzag strips, left to right; hinge triangles shaded."""
    cusp, system = V.cusp, V.ladders
    ladders = system.by_torus(torus)
    height = max(len(L.triangles) for L in ladders) + 1
    width = len(ladders)
    W, H = (width + 1) * cell * 2, (height + 1) * cell
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}">']
    pole_color = {p.id: p.color for p in system.poles}
    for col, L in enumerate(ladders):
        x0 = cell + col * 2 * cell
        x1 = x0 + cell
        tag = {True: "ascending", False: "descending", None: "unoriented"}[L.ascending]
        out.append(f'<g id="ladder-{L.id}" class="{tag}">')
        pts = [((x0 if k % 2 == 0 else x1), cell // 2 + k * cell // 2 + cell // 2)
               for k in range(len(L.triangles) + 2)]
        for j, T in enumerate(L.triangles):
            poly = " ".join(f"{x},{y}" for x, y in pts[j:j + 3])
            fill = "#d9d9d9" if system.hinge_triangle[T] else "#ffffff"
            out.append(f'<polygon points="{poly}" fill="{fill}" stroke="#555" stroke-width="1">'
                       f'<title>triangle {T} (tet {T // 4}, vertex {T % 4})</title></polygon>')
        ybot = pts[-1][1]
        for x, pid in zip((x0, x1), L.poles):
            out.append(f'<line x1="{x}" y1="{cell // 2}" x2="{x}" y2="{ybot}" '
                       f'stroke="{_COLORS[pole_color[pid]]}" stroke-width="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
