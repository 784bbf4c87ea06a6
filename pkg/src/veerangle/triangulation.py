"""Ideal triangulations: gluing data, edge classes, angle equations.

Conventions used throughout the package:

* tetrahedron vertices are 0..3 and face ``f`` is the face opposite vertex ``f``;
* ``gluings[t][f] = (t', perm)`` with ``perm`` a tuple giving the image of each
  vertex of ``t``; the face is glued to face ``perm[f]`` of ``t'``;
* an angle vector has three entries per tetrahedron, indexed by opposite edge
  pairs: pair 0 = {01, 23}, pair 1 = {02, 13}, pair 2 = {03, 12};
* angles are exact rationals meaning multiples of pi.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import jsonschema

Perm = tuple[int, int, int, int]

EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_EDGES = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def pair_of(a: int, b: int) -> int:
    """Index of the opposite-edge pair containing the edge ``{a, b}``."""
    if a == b:
        raise ValueError("degenerate edge")
    lo, hi = min(a, b), max(a, b)
    if (lo, hi) in ((0, 1), (2, 3)):
        return 0
    if (lo, hi) in ((0, 2), (1, 3)):
        return 1
    return 2


def perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def perm_inverse(p: Sequence[int]) -> Perm:
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def _ccw_corners(v: int) -> tuple[int, int, int]:
    for rest in itertools.permutations([w for w in range(4) if w != v]):
        if perm_sign((v,) + rest) == 1:
            return rest
    raise AssertionError("unreachable")


# Counterclockwise corner order of the cusp triangle at vertex v: (v, a, b, c)
# is an even permutation.  With odd gluing permutations this orients every
# boundary torus coherently.
CCW = tuple(_ccw_corners(v) for v in range(4))


def ccw_from(v: int, a: int) -> tuple[int, int, int]:
    """Corners of the cusp triangle at ``v`` in ccw order starting at ``a``."""
    c = CCW[v]
    i = c.index(a)
    return c[i], c[(i + 1) % 3], c[(i + 2) % 3]


class TriangulationError(ValueError):
    """Invalid gluing data; ``location`` names the offending tet/face."""

    def __init__(self, message: str, location: tuple | None = None):
        self.location = location
        if location is not None:
            message = f"{message} at {location}"
        super().__init__(message)


@dataclass(frozen=True)
class EdgeClass:
    id: int
    incidences: tuple[tuple[int, tuple[int, int]], ...]

    @property
    def degree(self) -> int:
        return len(self.incidences)


@dataclass(frozen=True)
class AngleVector:
    """Coefficients of pi, three per tetrahedron."""

    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(x) for x in self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def slot(self, t: int, p: int) -> Fraction:
        return self.entries[3 * t + p]

    def tet(self, t: int) -> tuple[Fraction, Fraction, Fraction]:
        return self.entries[3 * t: 3 * t + 3]

    def min(self) -> Fraction:
        return min(self.entries)

    def zero_slots(self) -> list[int]:
        return [i for i, x in enumerate(self.entries) if x == 0]

    @classmethod
    def constant(cls, n: int, value) -> "AngleVector":
        return cls((Fraction(value),) * (3 * n))


@dataclass(frozen=True)
class TautStructure:
    pi_pair: tuple[int, ...]

    def angles(self) -> AngleVector:
        out = []
        for p in self.pi_pair:
            out.extend(Fraction(1) if q == p else Fraction(0) for q in range(3))
        return AngleVector(tuple(out))


@dataclass(frozen=True)
class Triangulation:
    name: str
    gluings: tuple[tuple[tuple[int, Perm], ...], ...]
    taut: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.gluings)

    def glue(self, t: int, f: int) -> tuple[int, int, Perm]:
        t2, perm = self.gluings[t][f]
        return t2, perm[f], perm

    def next_corner(self, t: int, v: int, a: int) -> tuple[int, int, int]:
        """Rotate counterclockwise about the cusp vertex at corner (t, v, a)."""
        _, b, _ = ccw_from(v, a)
        t2, _, perm = self.glue(t, b)
        return t2, perm[v], perm[a]

    @cached_property
    def _corner_orbits(self) -> dict:
        orbit_of: dict[tuple[int, int, int], int] = {}
        orbits: list[list[tuple[int, int, int]]] = []
        for t in range(self.n):
            for v in range(4):
                for a in CCW[v]:
                    if (t, v, a) in orbit_of:
                        continue
                    idx = len(orbits)
                    orbit, c = [], (t, v, a)
                    while c not in orbit_of:
                        orbit_of[c] = idx
                        orbit.append(c)
                        c = self.next_corner(*c)
                    if c != (t, v, a):
                        raise TriangulationError("corner rotation does not close up", (t, v, a))
                    orbits.append(orbit)
        return {"orbit_of": orbit_of, "orbits": orbits}

    @cached_property
    def edge_classes(self) -> tuple[EdgeClass, ...]:
        orbit_of = self._corner_orbits["orbit_of"]
        orbits = self._corner_orbits["orbits"]
        classes = []
        done: set[int] = set()
        for t in range(self.n):
            for a, b in EDGES:
                o = orbit_of[(t, a, b)]
                if o in done:
                    continue
                other = orbit_of[(t, b, a)]
                if other == o:
                    raise TriangulationError("edge identified with itself in reverse", (t, (a, b)))
                done.update((o, other))
                inc = tuple((tt, (min(v, w), max(v, w))) for tt, v, w in orbits[o])
                classes.append(EdgeClass(len(classes), inc))
        return tuple(classes)

    @cached_property
    def edge_index(self) -> dict[tuple[int, tuple[int, int]], int]:
        return {inc: e.id for e in self.edge_classes for inc in e.incidences}

    def edge_of(self, t: int, a: int, b: int) -> int:
        return self.edge_index[(t, (min(a, b), max(a, b)))]

    @cached_property
    def vertex_classes(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Ideal vertices (cusps) as lists of (tet, vertex) incidences."""
        seen: dict[tuple[int, int], int] = {}
        classes = []
        for t in range(self.n):
            for v in range(4):
                if (t, v) in seen:
                    continue
                comp, stack = [], [(t, v)]
                seen[(t, v)] = len(classes)
                while stack:
                    tt, vv = stack.pop()
                    comp.append((tt, vv))
                    for f in range(4):
                        if f == vv:
                            continue
                        t2, _, perm = self.glue(tt, f)
                        nxt = (t2, perm[vv])
                        if nxt not in seen:
                            seen[nxt] = len(classes)
                            stack.append(nxt)
                classes.append(tuple(sorted(comp)))
        return tuple(classes)

    @property
    def e_max(self) -> int:
        return max(e.degree for e in self.edge_classes)


_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "tetrahedra", "gluings"],
    "properties": {
        "name": {"type": "string"},
        "tetrahedra": {"type": "integer", "minimum": 1},
        "gluings": {
            "type": "array",
            "items": {
                "type": "array", "minItems": 4, "maxItems": 4,
                "items": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "prefixItems": [
                        {"type": "integer", "minimum": 0},
                        {"type": "array", "minItems": 4, "maxItems": 4,
                         "items": {"type": "integer", "minimum": 0, "maximum": 3}},
                    ],
                },
            },
        },
        "taut": {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 2}},
    },
    "additionalProperties": False,
}


def validate_gluings(gluings: Sequence[Sequence[tuple[int, Sequence[int]]]]) -> None:
    n = len(gluings)
    for t in range(n):
        for f in range(4):
            t2, perm = gluings[t][f]
            if not 0 <= t2 < n:
                raise TriangulationError(f"gluing target {t2} out of range", (t, f))
            if sorted(perm) != [0, 1, 2, 3]:
                raise TriangulationError("gluing map is not a permutation", (t, f))
            f2 = perm[f]
            if (t2, f2) == (t, f):
                raise TriangulationError("self-glued face", (t, f))
            back_t, back_perm = gluings[t2][f2]
            if back_t != t or tuple(back_perm) != perm_inverse(perm):
                raise TriangulationError("non-involutive gluing", (t, f))
            if perm_sign(perm) != -1:
                raise TriangulationError("non-orientable gluing (even permutation)", (t, f))


def make_triangulation(name: str, gluings, taut: Iterable[int] | None = None) -> Triangulation:
    norm = tuple(tuple((int(t2), tuple(int(x) for x in perm)) for t2, perm in row) for row in gluings)
    for t, row in enumerate(norm):
        if len(row) != 4:
            raise TriangulationError("tetrahedron needs four gluings", (t,))
    validate_gluings(norm)
    tri = Triangulation(name, norm, None if taut is None else tuple(int(p) for p in taut))
    if tri.taut is not None and len(tri.taut) != tri.n:
        raise TriangulationError("taut field has wrong length", ("taut",))
    tri.edge_classes  # forces orbit computation (raises on invalid edges)
    return tri


def parse_triangulation(text: str) -> Triangulation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TriangulationError(f"schema violation: not JSON ({exc.msg})", ("document",)) from None
    try:
        jsonschema.validate(doc, _SCHEMA)
    except jsonschema.ValidationError as exc:
        raise TriangulationError(f"schema violation: {exc.message}", tuple(exc.absolute_path)) from None
    if len(doc["gluings"]) != doc["tetrahedra"]:
        raise TriangulationError("schema violation: gluings length differs from tetrahedra", ("gluings",))
    return make_triangulation(doc["name"], doc["gluings"], doc.get("taut"))


def triangulation_to_dict(tri: Triangulation, taut: TautStructure | None = None) -> dict:
    doc = {
        "name": tri.name,
        "tetrahedra": tri.n,
        "gluings": [[[t2, list(perm)] for t2, perm in row] for row in tri.gluings],
    }
    pi_pair = taut.pi_pair if taut is not None else tri.taut
    if pi_pair is not None:
        doc["taut"] = list(pi_pair)
    return doc


def serialize_triangulation(tri: Triangulation, taut: TautStructure | None = None) -> str:
    return json.dumps(triangulation_to_dict(tri, taut), separators=(",", ":"))


def edge_classes(tri: Triangulation) -> list[EdgeClass]:
    return list(tri.edge_classes)


@dataclass(frozen=True)
class AngleCheck:
    classification: str  # "invalid" | "generalized" | "taut" | "positive"
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.classification != "invalid"


def check_angle_vector(tri: Triangulation, theta: AngleVector | Sequence) -> AngleCheck:
    if not isinstance(theta, AngleVector):
        theta = AngleVector(tuple(theta))
    if len(theta) != 3 * tri.n:
        raise ValueError(f"dimension mismatch: expected {3 * tri.n} angles, got {len(theta)}")
    bad = []
    for t in range(tri.n):
        s = sum(theta.tet(t))
        if s != 1:
            bad.append(f"tetrahedron {t}: angle sum {s}*pi != pi")
    for e in tri.edge_classes:
        s = sum(theta.slot(t, pair_of(*ab)) for t, ab in e.incidences)
        if s != 2:
            bad.append(f"edge {e.id}: angle sum {s}*pi != 2*pi")
    if bad:
        return AngleCheck("invalid", tuple(bad))
    if all(x in (0, 1) for x in theta.entries):
        return AngleCheck("taut")
    if all(x > 0 for x in theta.entries):
        return AngleCheck("positive")
    return AngleCheck("generalized")


def enumerate_taut_structures(tri: Triangulation) -> list[TautStructure]:
    """All taut structures, lexicographic in ``pi_pair``.

    Depth-first over tetrahedra; an edge class is pruned once it carries more
    than two pi angles or can no longer reach two.
    """
    n = tri.n
    # per tet and pair: edge classes receiving pi
    pi_edges = [[(tri.edge_of(t, *PAIR_EDGES[p][0]), tri.edge_of(t, *PAIR_EDGES[p][1])) for p in range(3)]
                for t in range(n)]
    # incidences of each edge class still undecided after tets < t are fixed
    remaining = [[0] * len(tri.edge_classes) for _ in range(n + 1)]
    for t in range(n - 1, -1, -1):
        remaining[t] = list(remaining[t + 1])
        for a, b in EDGES:
            remaining[t][tri.edge_of(t, a, b)] += 1
    count = [0] * len(tri.edge_classes)
    out: list[TautStructure] = []
    choice: list[int] = []

    def rec(t: int) -> None:
        if t == n:
            if all(c == 2 for c in count):
                out.append(TautStructure(tuple(choice)))
            return
        for p in range(3):
            e1, e2 = pi_edges[t][p]
            count[e1] += 1
            count[e2] += 1
            ok = all(count[e] <= 2 for e in (e1, e2))
            if ok:
                # every class touched by tet t must still be able to reach 2
                for a, b in EDGES:
                    e = tri.edge_of(t, a, b)
                    if count[e] + remaining[t + 1][e] < 2:
                        ok = False
                        break
            if ok:
                choice.append(p)
                rec(t + 1)
                choice.pop()
            count[e1] -= 1
            count[e2] -= 1

    rec(0)
    return out
