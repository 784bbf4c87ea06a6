"""Leading-trailing deformations: integer tangent vectors to the angle-structure space."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cusp import CuspComplex, NormalCurve
from .triangulation import AngleVector, Triangulation, check_angle_vector, pair_of


class DeformationError(ValueError):
    pass


def tangency_defects(tri: Triangulation, entries: Sequence) -> list[str]:
    bad = []
    for t in range(tri.n):
        s = sum(entries[3 * t: 3 * t + 3])
        if s:
            bad.append(f"tetrahedron {t} sums to {s}")
    for e in tri.edge_classes:
        s = sum(entries[3 * t + pair_of(*ab)] for t, ab in e.incidences)
        if s:
            bad.append(f"edge {e.id} sums to {s}")
    return bad


@dataclass(frozen=True)
class DeformationVector:
    """Integer coefficients on angle slots, tangent to the space of angle structures."""

    tri: Triangulation
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) != 3 * self.tri.n:
            raise DeformationError("deformation has the wrong dimension")
        bad = tangency_defects(self.tri, self.entries)
        if bad:
            raise DeformationError("deformation is not tangent: " + "; ".join(bad))

    def __add__(self, other: "DeformationVector") -> "DeformationVector":
        return DeformationVector(self.tri, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "DeformationVector":
        return DeformationVector(self.tri, tuple(-a for a in self.entries))

    def __sub__(self, other: "DeformationVector") -> "DeformationVector":
        return self + (-other)

    def __mul__(self, k: int) -> "DeformationVector":
        return DeformationVector(self.tri, tuple(k * a for a in self.entries))

    __rmul__ = __mul__

    @classmethod
    def zero(cls, tri: Triangulation) -> "DeformationVector":
        return cls(tri, (0,) * (3 * tri.n))

    def is_zero(self) -> bool:
        return not any(self.entries)


def leading_trailing(cusp: CuspComplex, curve: NormalCurve) -> DeformationVector:
    """Raise the angle facing each entry side, lower the angle facing each exit side."""
    entries = [0] * (3 * cusp.tri.n)
    for T, en, ex in curve.segments:
        entries[cusp.slot(T, en)] += 1
        entries[cusp.slot(T, ex)] -= 1
    return DeformationVector(cusp.tri, tuple(entries))


def edge_loop_deformation(cusp: CuspComplex, edge: int) -> DeformationVector:
    """Deformation of a clockwise loop around either end of an edge class."""
    ends = [v.id for v in cusp.vertices if v.edge == edge]
    if len(ends) != 2:
        raise DeformationError(f"edge {edge} does not have two ends")
    d0, d1 = (leading_trailing(cusp, cusp.vertex_loop(v, clockwise=True)) for v in ends)
    if d0.entries != d1.entries:
        raise AssertionError(f"the two ends of edge {edge} give different deformations")
    return d0


def apply(tri: Triangulation, theta: AngleVector,
          terms: Iterable[tuple[Fraction | int, DeformationVector]]) -> AngleVector:
    """theta + sum of coefficient * D, exactly."""
    out = list(theta.entries)
    for coef, D in terms:
        if len(D.entries) != len(out):
            raise DeformationError("dimension mismatch between angle vector and deformation")
        c = Fraction(coef)
        if c:
            for i, x in enumerate(D.entries):
                if x:
                    out[i] += c * x
    result = AngleVector(tuple(out))
    if check_angle_vector(tri, result).classification == "invalid":
        raise AssertionError("deformed vector left the space of generalized angle structures")
    return result
