"""From a veering taut structure to positive angle structures, with and without a bound."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cusp import CuspError, NormalCurve, heights
from .deform import DeformationVector, apply, edge_loop_deformation, leading_trailing
from .triangulation import PAIR_EDGES, AngleVector, check_angle_vector
from .veering import BLUE, CoveringMap, VeeringData, VeeringError, transverse_double_cover, veering_data

KAPPA = Fraction(1, 24)
HINGE_STEP = Fraction(1, 6)


class RescueError(ValueError):
    pass


@dataclass(frozen=True)
class RescueState:
    theta: AngleVector
    log: tuple = ()

    @property
    def flat_slots(self) -> frozenset[int]:
        return frozenset(self.theta.zero_slots())


@dataclass(frozen=True)
class BoundReport:
    d: int
    d_max: int
    e_max: int
    kappa: Fraction
    min_angle: Fraction
    certified_bound: Fraction

    @property
    def satisfied(self) -> bool:
        return self.min_angle >= self.certified_bound


@dataclass(frozen=True)
class RescueResult:
    theta: AngleVector
    iterations: int
    initial_flat: int
    flat_counts: tuple[int, ...] = field(default=())


def hinge_deformation(V: VeeringData) -> DeformationVector:
    """Sum of blue edge deformations minus the red ones."""
    D = DeformationVector.zero(V.tri)
    for e in V.tri.edge_classes:
        De = edge_loop_deformation(V.cusp, e.id)
        D = D + De if V.coloring[e.id] == BLUE else D - De
    return D


def check_rescue_properties(V: VeeringData, theta: AngleVector) -> None:
    """Hinges positive, non-hinges nonnegative, zeros only opposite ladderpole sides."""
    for t in range(V.tri.n):
        vals = theta.tet(t)
        if V.hinge[t] and min(vals) <= 0:
            raise AssertionError(f"hinge tetrahedron {t} has a non-positive angle")
        if min(vals) < 0:
            raise AssertionError(f"tetrahedron {t} has a negative angle")
    roles = V.ladders.roles
    for T in range(V.cusp.num_triangles):
        for a in V.cusp.corners(T):
            if theta[V.cusp.slot(T, a)] == 0 and roles[T].flat != a:
                raise AssertionError(f"zero angle at corner {a} of triangle {T} is not opposite a ladderpole")


def hinge_rescue(V: VeeringData, t, *, allow_limit: bool = False) -> AngleVector:
    t = Fraction(t)
    upper_ok = t < Fraction(1, 4) or (allow_limit and t == Fraction(1, 4))
    if not (0 < t and upper_ok):
        raise RescueError(f"t must lie in (0, 1/4) (times pi), got {t}")
    theta = apply(V.tri, V.taut.angles(), [(t, hinge_deformation(V))])
    for i in range(V.tri.n):
        p = V.taut.pi_pair[i]
        blue, red = (p + 1) % 3, (p + 2) % 3
        vals = theta.tet(i)
        if V.hinge[i]:
            expected = {p: 1 - 4 * t, blue: 2 * t, red: 2 * t}
        else:
            (a, b), _ = PAIR_EDGES[p]
            diag = V.coloring[V.tri.edge_of(i, a, b)]
            # the zero lands on the thin pair of the color opposite the diagonals
            expected = ({p: 1 - 4 * t, red: 4 * t, blue: 0} if diag != BLUE
                        else {p: 1 - 4 * t, blue: 4 * t, red: 0})
        if any(vals[q] != expected[q] for q in range(3)):
            raise AssertionError(f"tetrahedron {i}: hinge rescue gave {vals}, expected {expected}")
    if t < Fraction(1, 4):
        check_rescue_properties(V, theta)
    return theta


def rescue_curve(V: VeeringData, T: int, *, toward_null: bool = True) -> NormalCurve:
    """Closed curve entering ``T`` through its ladderpole side and returning through it.

    It descends the ladder of ``T`` across bases to the first hinge, crosses the
    ladderpole there and walks the neighbouring ladder back.
    """
    cusp, system = V.cusp, V.ladders
    roles = system.roles
    if system.hinge_triangle[T]:
        return NormalCurve(cusp.component_of[T], ())
    back, _ = cusp.across(T, roles[T].flat)
    segs = []
    X, entry = T, roles[T].flat
    for _ in range(cusp.num_triangles + 1):
        if system.hinge_triangle[X]:
            segs.append((X, entry, roles[X].flat))
            break
        segs.append((X, entry, roles[X].wide))
        X, entry = cusp.across(X, roles[X].wide)
    else:
        raise CuspError("no hinge in ladder", system.ladder_of[T])
    hinge = X
    start, start_entry = cusp.across(hinge, roles[hinge].flat)
    if system.ladder_of[start] != system.ladder_of[back]:
        raise AssertionError("hinge crossing does not land in the neighbouring ladder")
    if start_entry != roles[start].flat:
        raise AssertionError("hinge crossing does not land on a ladderpole side")
    candidates = []
    for downward in (True, False):
        walk = []
        Y, en = start, start_entry
        while Y != back:
            ex = roles[Y].wide if downward else roles[Y].pole_thin
            walk.append((Y, en, ex))
            Y, en = cusp.across(Y, ex)
            if len(walk) > cusp.num_triangles:
                raise AssertionError("return walk does not reach the starting triangle")
        walk.append((back, en, roles[back].flat))
        curve = cusp.make_curve(segs + walk)
        if not toward_null:
            candidates.append(curve)
        elif cusp.curve_class(curve) == (0, 0):
            return curve
    if candidates:
        return candidates[0]
    raise AssertionError("no null-homologous rescue curve")


def build_rescue_curve(V: VeeringData, state: RescueState, slot: int) -> tuple[NormalCurve, int]:
    """Rescue curve for a flat slot; returns the curve and the flat triangle it starts in."""
    theta = state.theta
    if theta[slot] != 0:
        raise RescueError(f"slot {slot} is not flat")
    cusp, roles = V.cusp, V.ladders.roles
    t, p = divmod(slot, 3)
    for v in range(4):
        T = 4 * t + v
        a = roles[T].flat
        if cusp.slot(T, a) != slot:
            continue
        back, _ = cusp.across(T, a)
        if min(theta.tet(back // 4)) > 0:
            return rescue_curve(V, T), T
    raise RescueError("no adjacent non-degenerate tetrahedron", slot)


def _max_safe_step(theta: AngleVector, D: DeformationVector) -> Optional[Fraction]:
    limits = [theta[i] / -d for i, d in enumerate(D.entries) if d < 0]
    return min(limits) if limits else None


def rescue_all(V: VeeringData, t=HINGE_STEP) -> RescueResult:
    theta = hinge_rescue(V, t)
    initial = len(theta.zero_slots())
    state = RescueState(theta)
    counts = [initial]
    for _ in range(initial):
        zeros = state.theta.zero_slots()
        if not zeros:
            break
        degenerate = {i // 3 for i in zeros}
        choice = None
        for slot in zeros:
            try:
                choice = build_rescue_curve(V, state, slot)
                break
            except RescueError:
                continue
        if choice is None:
            raise AssertionError(f"no rescuable flat slot among {sorted(degenerate)}")
        curve, _ = choice
        D = leading_trailing(V.cusp, curve)
        for i, d in enumerate(D.entries):
            if d < 0 and state.theta[i] <= 0:
                raise AssertionError("rescue curve decreases a non-positive angle")
        step = _max_safe_step(state.theta, D)
        coef = step / 2 if step is not None else Fraction(1, 2)
        theta = apply(V.tri, state.theta, [(coef, D)])
        check_rescue_properties(V, theta)
        if len(theta.zero_slots()) >= len(zeros):
            raise AssertionError("rescue step did not reduce the number of flat slots")
        state = RescueState(theta, state.log + ((curve, coef),))
        counts.append(len(theta.zero_slots()))
    if check_angle_vector(V.tri, state.theta).classification != "positive":
        raise AssertionError("rescue did not reach a positive angle structure")
    return RescueResult(state.theta, len(state.log), initial, tuple(counts))


# -- bounded rescue ---------------------------------------------------------


def ascending_triangles(V: VeeringData) -> list[int]:
    system = V.ladders
    return [T for T in range(V.cusp.num_triangles) if system.ladders[system.ladder_of[T]].ascending]


def sigma_map(V: VeeringData) -> dict[int, int]:
    asc = ascending_triangles(V)
    by_tet: dict[int, list[int]] = {}
    for T in asc:
        by_tet.setdefault(T // 4, []).append(T)
    sigma = {}
    for t, pair in by_tet.items():
        if len(pair) != 2:
            raise AssertionError(f"tetrahedron {t} has {len(pair)} ascending tips")
        sigma[pair[0]], sigma[pair[1]] = pair[1], pair[0]
    return sigma


def all_heights(V: VeeringData) -> dict[int, int]:
    H: dict[int, int] = {}
    for L in V.ladders.ladders:
        if L.ascending:
            H.update(heights(V.cusp, V.ladders, L))
    return H


def bounded_rescue(V: VeeringData) -> tuple[AngleVector, BoundReport]:
    if V.transverse is None:
        raise VeeringError("not transverse-taut")
    theta = hinge_rescue(V, HINGE_STEP)
    H = all_heights(V)
    sigma = sigma_map(V)
    d = max(H.values())
    d_max = V.d_max
    if d + 2 != d_max:
        raise AssertionError(f"d + 2 = {d + 2} differs from d_max = {d_max}")
    e_max = V.tri.e_max
    if e_max < d_max + 3:
        raise AssertionError(f"e_max = {e_max} < d_max + 3 = {d_max + 3}")
    weight = KAPPA / d_max ** 2
    terms = []
    for T in sorted(H):
        h = H[sigma[T]]
        if H[T] == 0 or h == 0:
            continue
        terms.append((weight * h, leading_trailing(V.cusp, rescue_curve(V, T))))
    if terms:
        theta = apply(V.tri, theta, terms)
    report = BoundReport(d, d_max, e_max, KAPPA, theta.min(), 2 * KAPPA / d_max ** 2)
    if not report.satisfied:
        raise AssertionError(f"minimum angle {report.min_angle} below {report.certified_bound}")
    return theta, report


def deck_pullback(theta: AngleVector, cmap: CoveringMap) -> AngleVector:
    return AngleVector(tuple(theta[3 * cmap.deck[i] + q] for i in range(len(cmap.deck)) for q in range(3)))


def average_with_deck(theta: AngleVector, cmap: CoveringMap) -> AngleVector:
    other = deck_pullback(theta, cmap)
    return AngleVector(tuple((a + b) / 2 for a, b in zip(theta.entries, other.entries)))


def project(theta: AngleVector, cmap: CoveringMap) -> AngleVector:
    if deck_pullback(theta, cmap) != theta:
        raise AssertionError("angle vector is not deck-invariant")
    return AngleVector(tuple(theta[3 * cmap.fibers[t][0] + q] for t in range(len(cmap.fibers)) for q in range(3)))


def cover_and_average(V: VeeringData) -> tuple[AngleVector, BoundReport]:
    """Bounded rescue on the transverse double cover, averaged and pushed down."""
    if V.transverse is not None:
        raise VeeringError("already transverse-taut")
    cover, ctaut, cmap = transverse_double_cover(V.tri, V.taut)
    W = veering_data(cover, ctaut)
    if W.d_max != V.d_max or cover.e_max != V.tri.e_max:
        raise AssertionError("fan or edge degrees changed in the double cover")
    theta_n, report = bounded_rescue(W)
    theta = project(average_with_deck(theta_n, cmap), cmap)
    if check_angle_vector(V.tri, theta).classification != "positive":
        raise AssertionError("projected structure is not positive")
    report = BoundReport(report.d, report.d_max, report.e_max, report.kappa, theta.min(), report.certified_bound)
    if not report.satisfied:
        raise AssertionError("averaging broke the angle bound")
    return theta, report
