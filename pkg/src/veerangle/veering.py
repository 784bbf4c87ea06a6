"""Veering colorings, hinges, transverse coorientations and the double cover."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .cusp import CuspComplex, LadderSystem, ladder_decomposition
from .triangulation import PAIR_EDGES, TautStructure, Triangulation, make_triangulation

BLUE, RED = "blue", "red"


class VeeringError(ValueError):
    def __init__(self, message: str, location=None):
        super().__init__(message if location is None else f"{message}: {location}")
        self.location = location


@dataclass(frozen=True)
class Coloring:
    colors: tuple[str, ...]  # one per edge class

    def __getitem__(self, e: int) -> str:
        return self.colors[e]

    def swapped(self) -> "Coloring":
        return Coloring(tuple(RED if c == BLUE else BLUE for c in self.colors))


@dataclass(frozen=True)
class FaceOrientation:
    """bits[t][f] == 1 when face f of tetrahedron t is cooriented out of t."""

    bits: tuple[tuple[int, int, int, int], ...]

    def out(self, t: int, f: int) -> bool:
        return self.bits[t][f] == 1

    def flipped(self) -> "FaceOrientation":
        return FaceOrientation(tuple(tuple(1 - b for b in row) for row in self.bits))


@dataclass(frozen=True)
class CoveringMap:
    projection: tuple[int, ...]            # cover tet -> base tet
    fibers: tuple[tuple[int, int], ...]    # base tet -> (sheet 0, sheet 1)
    deck: tuple[int, ...]                  # fixed-point-free involution on cover tets


@dataclass(frozen=True)
class VeeringData:
    tri: Triangulation
    taut: TautStructure
    coloring: Coloring
    hinge: tuple[bool, ...]
    transverse: Optional[FaceOrientation]

    @cached_property
    def cusp(self) -> CuspComplex:
        return CuspComplex(self.tri)

    @cached_property
    def d_max(self) -> int:
        return self.cusp.d_max(self.taut)

    @cached_property
    def ladders(self) -> LadderSystem:
        return ladder_decomposition(self.cusp, self.taut, self.coloring.colors, self.hinge, self.transverse)

    def with_transverse(self, transverse: Optional[FaceOrientation]) -> "VeeringData":
        out = VeeringData(self.tri, self.taut, self.coloring, self.hinge, transverse)
        out.__dict__["cusp"] = self.cusp
        return out


def thin_pair_colors(p: int) -> tuple[int, int]:
    """(blue pair, red pair) of a tetrahedron whose pi-pair is ``p``."""
    return (p + 1) % 3, (p + 2) % 3


def corner_veer(cusp: CuspComplex, T: int, a: int, taut: TautStructure) -> Optional[str]:
    """Which way the thin corner ``a`` of ``T`` veers, or None if it is the wide corner."""
    wide = cusp.wide_corner(T, taut)
    _, x, y = cusp.ccw_from(T, a)
    if wide == a:
        return None
    return BLUE if wide == y else RED


def vertex_veer(cusp: CuspComplex, vid: int, taut: TautStructure) -> Optional[str]:
    cusp.fans_at(vid, taut)  # raises unless there are exactly two wide corners
    kinds = {corner_veer(cusp, T, a, taut) for T, a in cusp.vertices[vid].corners} - {None}
    return kinds.pop() if len(kinds) == 1 else None


def color_edges(tri: Triangulation, taut: TautStructure, cusp: CuspComplex | None = None) -> Coloring:
    cusp = cusp or CuspComplex(tri)
    colors: list[Optional[str]] = [None] * len(tri.edge_classes)
    for vert in cusp.vertices:
        c = vertex_veer(cusp, vert.id, taut)
        if c is None:
            raise VeeringError("not veering at vertex", (vert.id, vert.corners))
        if colors[vert.edge] is None:
            colors[vert.edge] = c
        elif colors[vert.edge] != c:
            raise VeeringError("ends disagree", vert.edge)
    return Coloring(tuple(colors))


def mirror_veering(tri: Triangulation, taut: TautStructure) -> bool:
    """True when every vertex link has uniformly veering fans, ignoring edge ends."""
    cusp = CuspComplex(tri)
    try:
        return all(vertex_veer(cusp, v.id, taut) is not None for v in cusp.vertices)
    except Exception:
        return False


def check_square_model(tri: Triangulation, taut: TautStructure, coloring: Coloring) -> bool:
    """Each tetrahedron's thin pairs: the orientation-determined one blue, the other red."""
    if len(coloring.colors) != len(tri.edge_classes):
        return False
    for t in range(tri.n):
        blue, red = thin_pair_colors(taut.pi_pair[t])
        for pair, want in ((blue, BLUE), (red, RED)):
            for a, b in PAIR_EDGES[pair]:
                if coloring[tri.edge_of(t, a, b)] != want:
                    return False
    return True


def square_model_coloring(tri: Triangulation, taut: TautStructure) -> Optional[Coloring]:
    """The coloring forced by the square model alone, if consistent and total."""
    colors: list[Optional[str]] = [None] * len(tri.edge_classes)
    for t in range(tri.n):
        blue, red = thin_pair_colors(taut.pi_pair[t])
        for pair, want in ((blue, BLUE), (red, RED)):
            for a, b in PAIR_EDGES[pair]:
                e = tri.edge_of(t, a, b)
                if colors[e] not in (None, want):
                    return None
                colors[e] = want
    if any(c is None for c in colors):
        return None
    return Coloring(tuple(colors))


def classify_hinges(tri: Triangulation, taut: TautStructure, coloring: Coloring) -> tuple[bool, ...]:
    out = []
    for t in range(tri.n):
        (a, b), (c, d) = PAIR_EDGES[taut.pi_pair[t]]
        out.append(coloring[tri.edge_of(t, a, b)] != coloring[tri.edge_of(t, c, d)])
    return tuple(out)


def _reference_bits(taut: TautStructure, t: int) -> list[int]:
    """A local coorientation: faces through the first pi-edge in, the others out."""
    (a, b), (c, d) = PAIR_EDGES[taut.pi_pair[t]]
    bits = [0] * 4
    # faces containing edge {a, b} are those opposite c and d
    bits[c] = bits[d] = 0
    bits[a] = bits[b] = 1
    return bits


def transverse_orientation(tri: Triangulation, taut: TautStructure) -> Optional[FaceOrientation]:
    """Coherent face coorientation, seeded with face (0, 0) pointing out, if one exists."""
    # each tetrahedron has two local choices; a gluing forces the neighbour's choice
    flip: list[Optional[int]] = [None] * tri.n
    for start in range(tri.n):
        if flip[start] is not None:
            continue
        flip[start] = 0 if _reference_bits(taut, start)[0] == 1 else 1
        queue = deque([start])
        while queue:
            t = queue.popleft()
            mine = [x ^ flip[t] for x in _reference_bits(taut, t)]
            for f in range(4):
                t2, f2, _ = tri.glue(t, f)
                ref2 = _reference_bits(taut, t2)[f2]
                need = (1 - mine[f]) ^ ref2
                if flip[t2] is None:
                    flip[t2] = need
                    queue.append(t2)
                elif flip[t2] != need:
                    return None
    return FaceOrientation(tuple(tuple(x ^ flip[t] for x in _reference_bits(taut, t)) for t in range(tri.n)))


def _double_cover(tri: Triangulation, taut: TautStructure, refs):
    """Cover tetrahedron 2t + s carries the reference coorientation of t flipped by s."""
    n = tri.n
    gluings = []
    for t in range(n):
        for s in (0, 1):
            row = []
            for f in range(4):
                t2, f2, perm = tri.glue(t, f)
                consistent = refs[t][f] != refs[t2][f2]
                s2 = s if consistent else 1 - s
                row.append((2 * t2 + s2, perm))
            gluings.append(row)
    pi = tuple(taut.pi_pair[i // 2] for i in range(2 * n))
    cover = make_triangulation(f"{tri.name}~2", gluings, pi)
    cmap = CoveringMap(
        projection=tuple(i // 2 for i in range(2 * n)),
        fibers=tuple((2 * t, 2 * t + 1) for t in range(n)),
        deck=tuple(i ^ 1 for i in range(2 * n)),
    )
    return cover, TautStructure(pi), cmap


def transverse_double_cover(tri: Triangulation, taut: TautStructure):
    if transverse_orientation(tri, taut) is not None:
        raise VeeringError("already transverse-taut")
    refs = [_reference_bits(taut, t) for t in range(tri.n)]
    cover, ctaut, cmap = _double_cover(tri, taut, refs)
    if transverse_orientation(cover, ctaut) is None:
        raise AssertionError("double cover is not transverse-taut")
    check_deck(cover, cmap)
    return cover, ctaut, cmap


def check_deck(cover: Triangulation, cmap: CoveringMap) -> None:
    """Assert the deck map is a fixed-point-free automorphism of the cover."""
    for i, j in enumerate(cmap.deck):
        if i == j or cmap.deck[j] != i:
            raise AssertionError("deck map is not a free involution")
        for f in range(4):
            i2, perm = cover.gluings[i][f]
            j2, perm2 = cover.gluings[j][f]
            if j2 != cmap.deck[i2] or perm2 != perm:
                raise AssertionError("deck map does not commute with gluings")


def veering_data(tri: Triangulation, taut: TautStructure | None = None) -> VeeringData:
    """Color, classify hinges and look for a transverse coorientation."""
    if taut is None:
        if tri.taut is None:
            raise VeeringError("no taut structure supplied")
        taut = TautStructure(tuple(tri.taut))
    cusp = CuspComplex(tri)
    coloring = color_edges(tri, taut, cusp)
    if not check_square_model(tri, taut, coloring):
        raise AssertionError("vertex-link coloring disagrees with the square model")
    data = VeeringData(tri, taut, coloring, classify_hinges(tri, taut, coloring),
                       transverse_orientation(tri, taut))
    data.__dict__["cusp"] = cusp
    return data


__all__ = [
    "BLUE", "RED", "Coloring", "CoveringMap", "FaceOrientation", "VeeringData", "VeeringError",
    "check_square_model", "classify_hinges", "color_edges", "corner_veer", "mirror_veering",
    "square_model_coloring", "transverse_double_cover", "transverse_orientation", "veering_data",
]
