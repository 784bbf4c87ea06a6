"""Whole-pipeline invariant checks on one triangulation, as used by corpus runs."""

from __future__ import annotations

from fractions import Fraction

from .cusp import down_neighbor
from .holonomy import (
    exotic_taut,
    holonomy_functional,
    ladderpole_holonomy,
    ladderpole_holonomy_transverse,
    rung_holonomy,
    rung_holonomy_transverse,
    turning_angle,
)
from .rescue import all_heights, bounded_rescue, cover_and_average, rescue_all, sigma_map
from .triangulation import TautStructure, Triangulation
from .veering import VeeringData, check_square_model, square_model_coloring, veering_data


def fans_nonempty(V: VeeringData) -> bool:
    return all(len(f) > 0 for v in V.cusp.vertices for f in V.cusp.fans_at(v.id, V.taut))


def hinge_fan_rule(V: VeeringData) -> bool:
    """Long fans have hinges exactly at their ends; a short fan's triangle is not a hinge."""
    for v in V.cusp.vertices:
        for fan in V.cusp.fans_at(v.id, V.taut):
            flags = [V.hinge[T // 4] for T, _ in fan.triangles]
            if len(flags) == 1:
                if flags[0]:
                    return False
            elif not (flags[0] and flags[-1] and not any(flags[1:-1])):
                return False
    return True


def ladder_counts_even(V: VeeringData) -> bool:
    return all(len(order) % 2 == 0 for order in V.ladders.order)


def tips_split(V: VeeringData) -> bool:
    """Each tetrahedron has two tips in ascending ladders and two in descending ones."""
    system = V.ladders
    for t in range(V.tri.n):
        asc = sum(1 for v in range(4) if system.ladders[system.ladder_of[4 * t + v]].ascending)
        if asc != 2:
            return False
    return True


def height_relation(V: VeeringData) -> bool:
    """Across a ladderpole, heights drop by one relative to the tips of the same tetrahedron."""
    cusp, system = V.cusp, V.ladders
    H, sigma = all_heights(V), sigma_map(V)
    for t in range(V.tri.n):
        if V.hinge[t]:
            continue
        tips = [4 * t + v for v in range(4)]
        asc = [T for T in tips if T in H]
        desc = [T for T in tips if T not in H]
        across = [cusp.across(T, system.roles[T].flat)[0] for T in desc]
        if any(X not in H for X in across):
            return False
        partners = sorted(sigma[X] for X in across)
        if partners != sorted(down_neighbor(cusp, system, T) for T in asc):
            return False
        if sorted(H[X] for X in partners) != sorted(H[T] - 1 for T in asc):
            return False
    return True


def taut_holonomy_zero(V: VeeringData) -> bool:
    h = holonomy_functional(V.cusp, V.taut.angles())
    return all(v == 0 for pair in h.values for v in pair)


def vertex_loops_turn_once(V: VeeringData) -> bool:
    theta = V.taut.angles()
    return all(turning_angle(V.cusp, theta, V.cusp.vertex_loop(v.id)).value == 2
               for v in V.cusp.vertices)


def _bound(V: VeeringData) -> bool:
    theta, report = bounded_rescue(V) if V.transverse is not None else cover_and_average(V)
    return (report.satisfied and theta.min() > 0
            and report.certified_bound == Fraction(1, 12 * report.d_max ** 2)
            and report.d + 2 == report.d_max and report.e_max >= report.d_max + 3)


def _rescue(V: VeeringData) -> bool:
    res = rescue_all(V)
    steps = list(res.flat_counts)
    return (res.iterations <= res.initial_flat and res.theta.min() > 0
            and all(a > b for a, b in zip(steps, steps[1:])))


def _holonomy(V: VeeringData) -> bool:
    ntori = len(V.cusp.components)
    ok = all(rung_holonomy(V, [s] * ntori).matches for s in (1, -1))
    ok &= all(ladderpole_holonomy(V, [o] * ntori).matches for o in (1, -1))
    if V.transverse is not None:
        ok &= all(rung_holonomy_transverse(V, range(ntori), s).matches for s in (1, -1))
        ok &= ladderpole_holonomy_transverse(V, range(ntori)).matches
        a, b = exotic_taut(V)
        ok &= a != V.taut and b != V.taut
    return bool(ok)


CHECKS = {
    "square_model": lambda V: check_square_model(V.tri, V.taut, V.coloring)
    and square_model_coloring(V.tri, V.taut) == V.coloring,
    "fans_nonempty": fans_nonempty,
    "hinge_fans": hinge_fan_rule,
    "ladders_even": ladder_counts_even,
    "tips_2_2": lambda V: V.transverse is None or tips_split(V),
    "heights": lambda V: V.transverse is None or height_relation(V),
    "bound": _bound,
    "rescue": _rescue,
    "taut_holonomy": taut_holonomy_zero,
    "vertex_loops": vertex_loops_turn_once,
    "holonomy_constructions": _holonomy,
}


def check_triangulation(tri: Triangulation, taut: TautStructure) -> dict[str, bool | str]:
    """Run every check; a failing or raising check is reported, never propagated."""
    try:
        V = veering_data(tri, taut)
    except Exception as exc:  # reported, not raised
        return {"veering": f"error: {exc}"}
    out: dict[str, bool | str] = {"veering": True, "transverse": V.transverse is not None}
    for name, fn in CHECKS.items():
        try:
            out[name] = bool(fn(V))
        except Exception as exc:
            out[name] = f"error: {exc}"
    return out


def passed(row: dict) -> bool:
    return all(v is True for k, v in row.items() if k != "transverse")
