"""Turning angles, angular holonomy, and holonomy-changing deformations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cusp import CuspComplex, NormalCurve
from .deform import apply, leading_trailing
from .rescue import hinge_rescue
from .triangulation import AngleVector, TautStructure, check_angle_vector
from .veering import VeeringData, VeeringError


@dataclass(frozen=True)
class TurningAngle:
    left: Fraction
    right: Fraction

    @property
    def value(self) -> Fraction:
        return self.left - self.right


@dataclass(frozen=True)
class HolonomyFunctional:
    """Values (times pi) on the two basis classes of each torus."""

    values: tuple[tuple[Fraction, Fraction], ...]

    def __call__(self, torus: int, cls: Sequence[int]) -> Fraction:
        h1, h2 = self.values[torus]
        return cls[0] * h1 + cls[1] * h2


def turning_angle(cusp: CuspComplex, theta: AngleVector, curve: NormalCurve) -> TurningAngle:
    left, right = cusp.turning_terms(curve)
    return TurningAngle(sum((theta[i] for i in left), Fraction(0)), sum((theta[i] for i in right), Fraction(0)))


def holonomy_functional(cusp: CuspComplex, theta: AngleVector) -> HolonomyFunctional:
    vals = []
    for cid in range(len(cusp.components)):
        b = cusp.homology_basis(cid)
        vals.append(tuple(turning_angle(cusp, theta, c).value for c in b.curves))
    return HolonomyFunctional(tuple(vals))


def holonomy(cusp: CuspComplex, theta: AngleVector, torus: int, cls: Sequence[int]) -> Fraction:
    return holonomy_functional(cusp, theta)(torus, cls)


# -- constructions ----------------------------------------------------------


class HolonomyError(ValueError):
    pass


@dataclass(frozen=True)
class HolonomyResult:
    theta: AngleVector
    classes: tuple[tuple[int, int], ...]   # per torus: the class whose holonomy is prescribed
    values: tuple[Fraction, ...]           # achieved holonomy, times pi
    targets: tuple[Fraction, ...]          # value predicted by the construction
    ladder_pairs: tuple[int, ...]          # k per torus
    multiplicities: tuple[int, ...] = ()   # signed intersection of the horizontal curve with the pole class
    curves: tuple[NormalCurve, ...] = ()

    @property
    def matches(self) -> bool:
        return self.values == self.targets

    @property
    def multiple_crossings(self) -> tuple[int, ...]:
        """Cusps where the horizontal curve meets the pole class more than once."""
        return tuple(i for i, m in enumerate(self.multiplicities) if abs(m) > 1)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def complement_class(cusp: CuspComplex, cid: int, cls: Sequence[int]) -> tuple[int, int]:
    """A class whose intersection with the primitive class ``cls`` is +1."""
    c1, c2 = cls
    g, x, y = _xgcd(c1, -c2)   # c1 * x - c2 * y = g
    if g != 1:
        raise HolonomyError(f"class {tuple(cls)} is not primitive")
    out = (y, x)               # intersection with (y, x) is (c1 x - c2 y) * form
    if cusp.class_intersection(cid, cls, out) < 0:
        out = (-y, -x)
    assert cusp.class_intersection(cid, cls, out) == 1
    return out


def ladder_cores(V: VeeringData, cid: int) -> list[NormalCurve]:
    """Cores of the ladders of a torus in cyclic order, each crossing bases."""
    system = V.ladders
    return [L.core(V.cusp, system.roles) for L in system.by_torus(cid)]


def _check_nonnegative(V: VeeringData, theta: AngleVector) -> None:
    if check_angle_vector(V.tri, theta).classification == "invalid":
        raise AssertionError("construction left the angle-structure space")
    if theta.min() < 0:
        raise AssertionError("construction produced a negative angle")


def rung_holonomy(V: VeeringData, signs: Sequence[int]) -> HolonomyResult:
    """Deform along every other ladder core with weight 1/4 on each torus.

    Even-indexed ladders for sign +1, odd-indexed for -1.  The prescribed class
    on each torus meets the core of ladder 0 once, positively.
    """
    cusp = V.cusp
    ntori = len(cusp.components)
    if len(signs) != ntori or any(s not in (1, -1) for s in signs):
        raise HolonomyError(f"need one sign in {{1, -1}} per cusp ({ntori})")
    terms, classes, ks, targets, used = [], [], [], [], []
    for cid, eps in enumerate(signs):
        cores = ladder_cores(V, cid)
        k = len(cores) // 2
        delta = complement_class(cusp, cid, cusp.curve_class(cores[0]))
        chosen = cores[0::2] if eps == 1 else cores[1::2]
        for c in chosen:
            terms.append((Fraction(1, 4), leading_trailing(cusp, c)))
            used.append(c)
        classes.append(delta)
        ks.append(k)
        targets.append(Fraction(eps * k, 2))
    theta = apply(V.tri, V.taut.angles(), terms)
    _check_nonnegative(V, theta)
    h = holonomy_functional(cusp, theta)
    values = tuple(h(cid, classes[cid]) for cid in range(ntori))
    return HolonomyResult(theta, tuple(classes), values, tuple(targets), tuple(ks), curves=tuple(used))


def _require_transverse(V: VeeringData) -> None:
    if V.transverse is None:
        raise VeeringError("not transverse-taut")


def ascending_class(V: VeeringData, cid: int) -> tuple[int, int]:
    """Class of the cores of ascending ladders (they point down)."""
    system = V.ladders
    for L in system.by_torus(cid):
        if L.ascending:
            return V.cusp.curve_class(L.core(V.cusp, system.roles))
    raise AssertionError("torus without ascending ladders")


def rung_holonomy_transverse(V: VeeringData, J: Sequence[int], sign: int) -> HolonomyResult:
    """Weight 1/2 along the cores of one ladder type on the cusps in ``J``.

    Sign +1 uses ascending ladders and -1 descending ones.  The prescribed class
    on each torus meets the ascending cores once, positively.
    """
    _require_transverse(V)
    if sign not in (1, -1):
        raise HolonomyError("sign must be 1 or -1")
    cusp, system = V.cusp, V.ladders
    ntori = len(cusp.components)
    J = set(J)
    if J - set(range(ntori)):
        raise HolonomyError(f"cusp indices out of range: {sorted(J - set(range(ntori)))}")
    terms, classes, ks, targets, used = [], [], [], [], []
    for cid in range(ntori):
        ladders = system.by_torus(cid)
        k = len(ladders) // 2
        classes.append(complement_class(cusp, cid, ascending_class(V, cid)))
        ks.append(k)
        if cid in J:
            for L in ladders:
                if L.ascending == (sign == 1):
                    c = L.core(cusp, system.roles)
                    terms.append((Fraction(1, 2), leading_trailing(cusp, c)))
                    used.append(c)
            targets.append(Fraction(sign * k))
        else:
            targets.append(Fraction(0))
    theta = apply(V.tri, V.taut.angles(), terms)
    _check_nonnegative(V, theta)
    h = holonomy_functional(cusp, theta)
    values = tuple(h(cid, classes[cid]) for cid in range(ntori))
    return HolonomyResult(theta, tuple(classes), values, tuple(targets), tuple(ks), curves=tuple(used))


def exotic_taut(V: VeeringData) -> tuple[TautStructure, TautStructure]:
    """The two taut structures reached by the full transverse rung deformation."""
    _require_transverse(V)
    out = []
    for sign in (1, -1):
        res = rung_holonomy_transverse(V, range(len(V.cusp.components)), sign)
        theta = res.theta
        if any(x not in (0, 1) for x in theta.entries):
            raise AssertionError("rung deformation did not flatten every tetrahedron")
        if check_angle_vector(V.tri, theta).classification != "taut":
            raise AssertionError("exotic vector is not taut")
        taut = TautStructure(tuple(theta.tet(t).index(1) for t in range(V.tri.n)))
        if taut == V.taut:
            raise AssertionError("exotic structure equals the input")
        out.append(taut)
    return out[0], out[1]


def pole_reference_class(V: VeeringData, cid: int) -> tuple[int, int]:
    """Reference orientation of the ladderpoles: the core of the first ladder."""
    first = V.ladders.by_torus(cid)[0]
    return V.cusp.curve_class(first.core(V.cusp, V.ladders.roles))


def horizontal_curve(V: VeeringData, cid: int, up: Sequence[int]) -> NormalCurve:
    """Curve crossing every ladder of a torus, turning at hinges.

    In each ladder it moves away from the bases; at a hinge entered through its
    base it crosses the ladderpole.  It starts at a hinge of a ladder that is
    ascending for the pole orientation ``up``.
    """
    cusp, system = V.cusp, V.ladders
    roles = system.roles
    up = tuple(up)
    asc = [L for L in system.by_torus(cid)
           if cusp.curve_class(L.core(cusp, roles)) == (-up[0], -up[1])]
    starts = sorted(T for L in asc for T in L.triangles if system.hinge_triangle[T])
    if not starts:
        raise AssertionError("no hinge in an ascending ladder")
    X = starts[0]
    entry = roles[X].wide   # as if entered through its base
    seen: dict[tuple[int, int], int] = {}
    segs = []
    while (X, entry) not in seen:
        seen[(X, entry)] = len(segs)
        r = roles[X]
        if entry == r.wide and system.hinge_triangle[X]:
            ex = r.flat
        elif entry in (r.wide, r.flat):
            ex = r.pole_thin
        else:
            raise AssertionError("horizontal curve entered through the far rung")
        segs.append((X, entry, ex))
        X, entry = cusp.across(X, ex)
    return cusp.make_curve(segs[seen[(X, entry)]:])


def _check_pole_crossings(V: VeeringData, cid: int, curve: NormalCurve, m: int) -> None:
    """All ladderpole crossings of ``curve`` must have the same sign."""
    roles = V.ladders.roles
    crossings = sum(1 for T, _, ex in curve.segments if ex == roles[T].flat)
    poles = sum(1 for p in V.ladders.poles if p.torus == cid)
    if crossings != abs(m) * poles:
        raise AssertionError("horizontal curve crosses ladderpoles in both directions")


def _ladderpole(V: VeeringData, orient: Sequence[int], J: Sequence[int], weight: Fraction,
                t_base: Fraction) -> HolonomyResult:
    cusp = V.cusp
    ntori = len(cusp.components)
    theta = hinge_rescue(V, t_base, allow_limit=True)
    terms, classes, ms, ks, used = [], [], [], [], []
    for cid in range(ntori):
        ref = pole_reference_class(V, cid)
        up = (orient[cid] * ref[0], orient[cid] * ref[1])
        classes.append(up)
        ks.append(len(V.ladders.by_torus(cid)) // 2)
        if cid not in J:
            ms.append(0)
            continue
        gamma = horizontal_curve(V, cid, up)
        m = cusp.curve_class_intersection(gamma, up)
        _check_pole_crossings(V, cid, gamma, m)
        ms.append(m)
        used.append(gamma)
        terms.append((weight, leading_trailing(cusp, gamma)))
    theta = apply(V.tri, theta, terms)
    _check_nonnegative(V, theta)
    h = holonomy_functional(cusp, theta)
    values = tuple(h(cid, classes[cid]) for cid in range(ntori))
    targets = tuple(2 * weight * m for m in ms)
    return HolonomyResult(theta, tuple(classes), values, targets, tuple(ks), tuple(ms), tuple(used))


def ladderpole_holonomy(V: VeeringData, orientations: Sequence[int] | None = None) -> HolonomyResult:
    """Weight 1/8 along one horizontal curve per cusp, from the limit hinge rescue."""
    ntori = len(V.cusp.components)
    orientations = tuple(orientations) if orientations is not None else (1,) * ntori
    if len(orientations) != ntori or any(o not in (1, -1) for o in orientations):
        raise HolonomyError(f"need one orientation in {{1, -1}} per cusp ({ntori})")
    return _ladderpole(V, orientations, range(ntori), Fraction(1, 8), Fraction(1, 4))


def transverse_pole_orientations(V: VeeringData) -> tuple[int, ...]:
    """Per torus, +1 if the reference pole orientation points up for the coorientation."""
    out = []
    for cid in range(len(V.cusp.components)):
        ref = pole_reference_class(V, cid)
        a = ascending_class(V, cid)
        out.append(1 if ref == (-a[0], -a[1]) else -1)
    return tuple(out)


def ladderpole_holonomy_transverse(V: VeeringData, J: Sequence[int],
                                   orientations: Sequence[int] | None = None) -> HolonomyResult:
    """Weight 1/4 along horizontal curves on the cusps in ``J``.

    The pole orientations must all agree, or all disagree, with the upward
    direction of the coorientation; by default they all agree.
    """
    _require_transverse(V)
    ntori = len(V.cusp.components)
    upward = transverse_pole_orientations(V)
    orientations = tuple(orientations) if orientations is not None else upward
    if len(orientations) != ntori or any(o not in (1, -1) for o in orientations):
        raise HolonomyError(f"need one orientation in {{1, -1}} per cusp ({ntori})")
    agree = {o == u for o, u in zip(orientations, upward)}
    if len(agree) > 1:
        raise HolonomyError("inconsistent ladderpole orientations")
    J = set(J)
    if J - set(range(ntori)):
        raise HolonomyError(f"cusp indices out of range: {sorted(J - set(range(ntori)))}")
    return _ladderpole(V, orientations, J, Fraction(1, 4), Fraction(1, 4))
