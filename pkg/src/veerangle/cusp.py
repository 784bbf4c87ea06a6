"""Boundary tori: cusp triangles, vertex links, fans, ladders, homology.

A cusp triangle is indexed ``T = 4 * t + v`` (the truncated tip of vertex
``v`` of tetrahedron ``t``).  Its corners are labelled by the other three
vertices of the tetrahedron; corner ``a`` of triangle (t, v) sits on the edge
{v, a} and carries the angle of pair ``pair_of(v, a)``.  The side of a
triangle opposite corner ``w`` lies on face ``w`` of the tetrahedron.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .triangulation import CCW, TautStructure, Triangulation, ccw_from, pair_of


class CuspError(ValueError):
    pass


def tet_of(T: int) -> int:
    return T // 4


def vert_of(T: int) -> int:
    return T % 4


@dataclass(frozen=True)
class CuspVertex:
    id: int
    edge: int
    end: int
    corners: tuple[tuple[int, int], ...]  # (triangle, corner label), ccw around the vertex


@dataclass(frozen=True)
class Fan:
    vertex: int
    side: int
    triangles: tuple[tuple[int, int], ...]  # (triangle, corner label at the vertex)

    def __len__(self) -> int:
        return len(self.triangles)


@dataclass(frozen=True)
class NormalCurve:
    """Closed normal curve; a segment is (triangle, entry corner, exit corner).

    The curve enters the triangle through the side opposite the entry corner
    and leaves through the side opposite the exit corner.
    """

    torus: int
    segments: tuple[tuple[int, int, int], ...]

    def __len__(self) -> int:
        return len(self.segments)

    def reversed(self) -> "NormalCurve":
        return NormalCurve(self.torus, tuple((T, ex, en) for T, en, ex in reversed(self.segments)))

    def repeated(self, k: int) -> "NormalCurve":
        return NormalCurve(self.torus, self.segments * k)

    @property
    def embedded(self) -> bool:
        # sufficient criterion: one arc per triangle
        tris = [T for T, _, _ in self.segments]
        return len(tris) == len(set(tris))

    def cut_corners(self) -> list[tuple[int, int]]:
        return [(T, 6 - vert_of(T) - en - ex) for T, en, ex in self.segments]


@dataclass(frozen=True)
class HomologyBasis:
    torus: int
    curves: tuple[NormalCurve, NormalCurve]
    chains: tuple[dict, dict]  # canonical side id -> integer coefficient
    form: int  # intersection number of curves[0] with curves[1]


class CuspComplex:
    """The triangulated boundary of the truncated manifold."""

    def __init__(self, tri: Triangulation):
        self.tri = tri
        self.num_triangles = 4 * tri.n
        orbits = tri._corner_orbits["orbits"]
        orbit_of = tri._corner_orbits["orbit_of"]
        self._vertex_of: dict[tuple[int, int], int] = {}
        verts = []
        order = []
        for e in tri.edge_classes:
            t, (a, b) = e.incidences[0]
            order.append((orbit_of[(t, a, b)], e.id, 0))
            order.append((orbit_of[(t, b, a)], e.id, 1))
        for o, eid, end in order:
            corners = tuple((4 * t + v, a) for t, v, a in orbits[o])
            vid = len(verts)
            verts.append(CuspVertex(vid, eid, end, corners))
            for c in corners:
                self._vertex_of[c] = vid
        self.vertices: tuple[CuspVertex, ...] = tuple(verts)

        self._side_reps: list[tuple[tuple[int, int], tuple[int, int]]] = []
        self._side_id: dict[tuple[int, int], int] = {}
        for T in range(self.num_triangles):
            for w in CCW[vert_of(T)]:
                if (T, w) in self._side_id:
                    continue
                other = self.across(T, w)
                sid = len(self._side_reps)
                self._side_reps.append(((T, w), other))
                self._side_id[(T, w)] = sid
                self._side_id[other] = sid

        comp = [-1] * self.num_triangles
        comps = []
        for T in range(self.num_triangles):
            if comp[T] >= 0:
                continue
            cid = len(comps)
            members, queue = [], deque([T])
            comp[T] = cid
            while queue:
                X = queue.popleft()
                members.append(X)
                for w in CCW[vert_of(X)]:
                    Y, _ = self.across(X, w)
                    if comp[Y] < 0:
                        comp[Y] = cid
                        queue.append(Y)
            comps.append(tuple(sorted(members)))
        self.components: tuple[tuple[int, ...], ...] = tuple(comps)
        self.component_of: tuple[int, ...] = tuple(comp)
        for cid in range(len(comps)):
            chi = self.euler_characteristic(cid)
            if chi != 0:
                raise CuspError(f"boundary component {cid} not a torus (Euler characteristic {chi})")

    # -- local structure -------------------------------------------------

    def corners(self, T: int) -> tuple[int, int, int]:
        return CCW[vert_of(T)]

    def ccw_from(self, T: int, a: int) -> tuple[int, int, int]:
        return ccw_from(vert_of(T), a)

    def across(self, T: int, w: int) -> tuple[int, int]:
        """The (triangle, corner) whose opposite side is glued to side ``w`` of ``T``."""
        t, v = divmod(T, 4)
        t2, f2, perm = self.tri.glue(t, w)
        return 4 * t2 + perm[v], f2

    def map_corner(self, T: int, w: int, x: int) -> int:
        """Label in the neighbour across side ``w`` of corner ``x`` of ``T``."""
        t, _ = divmod(T, 4)
        _, _, perm = self.tri.glue(t, w)
        return perm[x]

    def slot(self, T: int, a: int) -> int:
        """Index into the angle vector of corner ``a`` of ``T``."""
        t, v = divmod(T, 4)
        return 3 * t + pair_of(v, a)

    def vertex_of(self, T: int, a: int) -> int:
        return self._vertex_of[(T, a)]

    def side_id(self, T: int, w: int) -> int:
        return self._side_id[(T, w)]

    def side_sign(self, T: int, w: int) -> int:
        """+1 if (T, w) is the canonical representative of its side."""
        return 1 if self._side_reps[self._side_id[(T, w)]][0] == (T, w) else -1

    @property
    def num_sides(self) -> int:
        return len(self._side_reps)

    def side_reps(self, sid: int) -> tuple[tuple[int, int], tuple[int, int]]:
        return self._side_reps[sid]

    def side_endpoints(self, T: int, w: int) -> tuple[int, int]:
        """Corners (y, z) of the side opposite ``w``, oriented ccw in ``T``."""
        _, y, z = self.ccw_from(T, w)
        return y, z

    def euler_characteristic(self, cid: int) -> int:
        tris = self.components[cid]
        verts = {self.vertex_of(T, a) for T in tris for a in self.corners(T)}
        sides = {self.side_id(T, w) for T in tris for w in self.corners(T)}
        return len(verts) - len(sides) + len(tris)

    def torus_vertices(self, cid: int) -> list[int]:
        return sorted({self.vertex_of(T, a) for T in self.components[cid] for a in self.corners(T)})

    def torus_of_vertex(self, vid: int) -> int:
        T, _ = self.vertices[vid].corners[0]
        return self.component_of[T]

    # -- fans ------------------------------------------------------------

    def wide_corner(self, T: int, taut: TautStructure) -> int:
        t, v = divmod(T, 4)
        p = taut.pi_pair[t]
        (w,) = [a for a in self.corners(T) if pair_of(v, a) == p]
        return w

    def fans_at(self, vid: int, taut: TautStructure) -> tuple[Fan, Fan]:
        corners = self.vertices[vid].corners
        wide = [i for i, (T, a) in enumerate(corners) if self.wide_corner(T, taut) == a]
        if len(wide) != 2:
            raise CuspError(f"vertex link lacks exactly two pi-corners (vertex {vid} has {len(wide)})")
        i, j = wide
        first = corners[i + 1:j]
        second = corners[j + 1:] + corners[:i]
        return Fan(vid, 0, tuple(first)), Fan(vid, 1, tuple(second))

    def d_max(self, taut: TautStructure) -> int:
        return max(len(f) for v in range(len(self.vertices)) for f in self.fans_at(v, taut))

    # -- curves ----------------------------------------------------------

    def make_curve(self, segments: Iterable[tuple[int, int, int]]) -> NormalCurve:
        segs = tuple(segments)
        if not segs:
            return NormalCurve(-1, ())
        torus = self.component_of[segs[0][0]]
        for k, (T, en, ex) in enumerate(segs):
            cs = self.corners(T)
            if en not in cs or ex not in cs or en == ex:
                raise CuspError(f"segment {k} of curve is not a normal arc: {(T, en, ex)}")
            T2, en2 = segs[(k + 1) % len(segs)][:2]
            if self.across(T, ex) != (T2, en2):
                raise CuspError(f"curve does not close up between segments {k} and {k + 1}")
        return NormalCurve(torus, segs)

    def vertex_loop(self, vid: int, clockwise: bool = False) -> NormalCurve:
        segs = []
        for T, a in self.vertices[vid].corners:
            _, b, c = self.ccw_from(T, a)
            segs.append((T, c, b))
        curve = self.make_curve(segs)
        return curve.reversed() if clockwise else curve

    def turning_terms(self, curve: NormalCurve) -> tuple[list[int], list[int]]:
        """Angle slots cut off to the left and to the right of ``curve``."""
        left, right = [], []
        for T, en, ex in curve.segments:
            z = 6 - vert_of(T) - en - ex
            # (z, en, ex) counterclockwise puts the cut corner on the right
            if self.ccw_from(T, z) == (z, en, ex):
                right.append(self.slot(T, z))
            else:
                left.append(self.slot(T, z))
        return left, right

    def chain_of(self, curve: NormalCurve) -> dict[int, int]:
        """Primal 1-cycle obtained by pushing each arc onto its cut corner."""
        chain: dict[int, int] = {}
        segs = curve.segments
        for k, (T, en, ex) in enumerate(segs):
            z = 6 - vert_of(T) - en - ex
            T2, en2, ex2 = segs[(k + 1) % len(segs)]
            z2 = 6 - vert_of(T2) - en2 - ex2
            if self.map_corner(T, ex, z) == z2:
                continue
            y, zz = self.side_endpoints(T, ex)
            sign = self.side_sign(T, ex) * (1 if z == y else -1)
            sid = self.side_id(T, ex)
            chain[sid] = chain.get(sid, 0) + sign
        return {k: v for k, v in chain.items() if v}

    def intersect_chain(self, curve: NormalCurve, chain: dict[int, int]) -> int:
        """Algebraic intersection of a normal curve with a primal 1-cycle.

        Crossing a side from the right of its canonical orientation to the left
        counts +1; with this sign a deformation along gamma changes the
        holonomy of delta by twice the intersection of gamma with delta.
        """
        total = 0
        for T, _, ex in curve.segments:
            c = chain.get(self.side_id(T, ex))
            if c:
                total -= c * self.side_sign(T, ex)
        return total

    def intersection_number(self, c1: NormalCurve, c2: NormalCurve) -> int:
        if not c1.segments or not c2.segments:
            return 0
        if c1.torus != c2.torus:
            raise CuspError("curves lie on different tori")
        return self.intersect_chain(c1, self.chain_of(c2))

    # -- homology --------------------------------------------------------

    @cached_property
    def homology_bases(self) -> tuple[HomologyBasis, ...]:
        return tuple(self._homology_basis(cid) for cid in range(len(self.components)))

    def homology_basis(self, cid: int) -> HomologyBasis:
        return self.homology_bases[cid]

    def _homology_basis(self, cid: int) -> HomologyBasis:
        tris = self.components[cid]
        root = tris[0]
        parent: dict[int, tuple[int, int, int] | None] = {root: None}
        dual_tree: set[int] = set()
        queue = deque([root])
        while queue:
            X = queue.popleft()
            for w in sorted(self.corners(X)):
                Y, w2 = self.across(X, w)
                if Y in parent:
                    continue
                parent[Y] = (X, w, w2)  # X exits across w, Y entered at w2
                dual_tree.add(self.side_id(X, w))
                queue.append(Y)
        verts = self.torus_vertices(cid)
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in verts}
        for sid in sorted({self.side_id(T, w) for T in tris for w in self.corners(T)}):
            if sid in dual_tree:
                continue
            (T, w), _ = self._side_reps[sid]
            y, z = self.side_endpoints(T, w)
            vy, vz = self.vertex_of(T, y), self.vertex_of(T, z)
            adj[vy].append((sid, vz))
            adj[vz].append((sid, vy))
        seen = {verts[0]}
        primal_tree: set[int] = set()
        queue = deque([verts[0]])
        while queue:
            u = queue.popleft()
            for sid, x in adj[u]:
                if x not in seen:
                    seen.add(x)
                    primal_tree.add(sid)
                    queue.append(x)
        leftover = sorted({self.side_id(T, w) for T in tris for w in self.corners(T)}
                          - dual_tree - primal_tree)
        if len(leftover) != 2:
            raise CuspError(f"torus {cid}: expected 2 generators, found {len(leftover)}")
        curves = tuple(self._fundamental_cycle(sid, parent) for sid in leftover)
        chains = tuple(self.chain_of(c) for c in curves)
        form = self.intersect_chain(curves[0], chains[1])
        if abs(form) != 1:
            raise CuspError(f"torus {cid}: basis intersection form {form}")
        return HomologyBasis(cid, curves, chains, form)

    def _fundamental_cycle(self, sid: int, parent) -> NormalCurve:
        (B, wB), (A, wA) = self._side_reps[sid]  # leave B across wB, enter A at wA

        def to_root(X):
            path = [X]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]][0])
            return path

        pa, pb = to_root(A), to_root(B)
        common = set(pa) & set(pb)
        lca = next(X for X in pa if X in common)
        up = pa[:pa.index(lca) + 1]       # A ... lca
        down = pb[:pb.index(lca)][::-1]   # child of lca ... B
        steps = []  # (from triangle, exit corner, to triangle, entry corner)
        for X in up[:-1]:
            P, w, w2 = parent[X]
            steps.append((X, w2, P, w))
        for Y in down:
            P, w, w2 = parent[Y]
            steps.append((P, w, Y, w2))
        segs, entry, cur = [], wA, A
        for X, ex, Y, en in steps:
            segs.append((X, entry, ex))
            entry, cur = en, Y
        segs.append((cur, entry, wB))
        return self.make_curve(segs)

    def curve_class(self, curve: NormalCurve) -> tuple[int, int]:
        """Coordinates (a, b) with [curve] = a [beta_1] + b [beta_2]."""
        if not curve.segments:
            return (0, 0)
        basis = self.homology_basis(curve.torus)
        w = basis.form
        a = self.intersect_chain(curve, basis.chains[1]) * w
        b = -self.intersect_chain(curve, basis.chains[0]) * w
        return a, b

    def class_intersection(self, cid: int, x: Sequence[int], y: Sequence[int]) -> int:
        """Intersection number of two homology classes given in basis coordinates."""
        w = self.homology_basis(cid).form
        return (x[0] * y[1] - x[1] * y[0]) * w

    def curve_class_intersection(self, curve: NormalCurve, cls: Sequence[int]) -> int:
        basis = self.homology_basis(curve.torus)
        return (cls[0] * self.intersect_chain(curve, basis.chains[0])
                + cls[1] * self.intersect_chain(curve, basis.chains[1]))


def build_cusp_complex(tri: Triangulation) -> CuspComplex:
    return CuspComplex(tri)


# -- ladders ---------------------------------------------------------------


@dataclass(frozen=True)
class TriangleRoles:
    """Corner roles in a veering cusp triangle.

    ``wide`` carries the pi angle; the pole side joins ``wide`` and ``pole_thin``
    (same color) and lies opposite ``flat``.  The base is opposite ``wide`` and
    the other rung opposite ``pole_thin``.
    """

    wide: int
    flat: int
    pole_thin: int


@dataclass(frozen=True)
class Ladder:
    id: int
    torus: int
    triangles: tuple[int, ...]   # cyclic strip, each exits the next through its base
    rungs: tuple[int, ...]       # side ids of the bases, same order
    poles: tuple[int, int]
    ascending: Optional[bool]

    def core(self, cusp: "CuspComplex", roles: dict) -> NormalCurve:
        return cusp.make_curve((T, roles[T].pole_thin, roles[T].wide) for T in self.triangles)


@dataclass(frozen=True)
class Pole:
    id: int
    torus: int
    color: str
    vertices: tuple[int, ...]
    sides: tuple[int, ...]


@dataclass(frozen=True)
class LadderSystem:
    roles: dict
    ladders: tuple[Ladder, ...]
    poles: tuple[Pole, ...]
    ladder_of: dict
    order: tuple[tuple[int, ...], ...]  # per torus, ladder ids in cyclic order across poles
    hinge_triangle: dict

    def by_torus(self, cid: int) -> list[Ladder]:
        return [self.ladders[i] for i in self.order[cid]]


def triangle_roles(cusp: CuspComplex, T: int, taut: TautStructure, colors: Sequence[str]) -> TriangleRoles:
    p = cusp.wide_corner(T, taut)
    _, left, right = cusp.ccw_from(T, p)
    cp = colors[cusp.vertices[cusp.vertex_of(T, p)].edge]
    cl = colors[cusp.vertices[cusp.vertex_of(T, left)].edge]
    cr = colors[cusp.vertices[cusp.vertex_of(T, right)].edge]
    if cl == cr:
        raise CuspError("thin corners of a cusp triangle share a color", T)
    flat = right if cp == cl else left
    return TriangleRoles(p, flat, left if flat == right else right)


def ladder_decomposition(cusp: CuspComplex, taut: TautStructure, colors: Sequence[str],
                         hinge: Sequence[bool], transverse=None) -> LadderSystem:
    """Cut each torus along its ladderpoles into ladders.

    ``transverse`` is a face coorientation (bits[t][f] == 1 meaning out of t);
    when given, each ladder is tagged ascending or descending.
    """
    roles = {T: triangle_roles(cusp, T, taut, colors) for T in range(cusp.num_triangles)}

    ladder_of: dict[int, int] = {}
    strips = []
    for T in range(cusp.num_triangles):
        if T in ladder_of:
            continue
        strip, X = [], T
        while X not in ladder_of:
            ladder_of[X] = len(strips)
            strip.append(X)
            Y, entry = cusp.across(X, roles[X].wide)
            if entry != roles[Y].pole_thin:
                raise CuspError("base is not glued to a rung", (X, Y))
            X = Y
        if X != T:
            raise CuspError("ladder strip does not close up", T)
        strips.append(tuple(strip))

    # poles: connected components of the graph of pole sides
    pole_sides = {}
    for T in range(cusp.num_triangles):
        r = roles[T]
        pole_sides[cusp.side_id(T, r.flat)] = (cusp.vertex_of(T, r.wide), cusp.vertex_of(T, r.pole_thin))
    adj: dict[int, list[tuple[int, int]]] = {}
    for sid, (u, v) in pole_sides.items():
        adj.setdefault(u, []).append((sid, v))
        adj.setdefault(v, []).append((sid, u))
    for v, nbrs in adj.items():
        if len(nbrs) != 2:
            raise CuspError("ladderpole is not a 1-manifold", v)
    if len(adj) != len(cusp.vertices):
        raise CuspError("ladderpoles miss a vertex")
    pole_of_vertex: dict[int, int] = {}
    poles = []
    for start in sorted(adj):
        if start in pole_of_vertex:
            continue
        pid = len(poles)
        verts, sides, stack = [], set(), [start]
        pole_of_vertex[start] = pid
        while stack:
            u = stack.pop()
            verts.append(u)
            for sid, x in adj[u]:
                sides.add(sid)
                if x not in pole_of_vertex:
                    pole_of_vertex[x] = pid
                    stack.append(x)
        color = {colors[cusp.vertices[u].edge] for u in verts}
        if len(color) != 1:
            raise CuspError("ladderpole changes color", pid)
        poles.append(Pole(pid, cusp.torus_of_vertex(start), color.pop(), tuple(sorted(verts)),
                          tuple(sorted(sides))))

    ladders = []
    for lid, strip in enumerate(strips):
        ps = set()
        for T in strip:
            r = roles[T]
            ps.add(pole_of_vertex[cusp.vertex_of(T, r.wide)])
            ps.add(pole_of_vertex[cusp.vertex_of(T, r.flat)])
        if len(ps) != 2:
            raise CuspError("ladder is not bounded by two ladderpoles", lid)
        asc = None
        if transverse is not None:
            tags = set()
            for T in strip:
                t, _ = divmod(T, 4)
                r = roles[T]
                b1, b2 = transverse.bits[t][r.flat], transverse.bits[t][r.pole_thin]
                if b1 != b2:
                    raise CuspError("faces through a pi edge disagree", T)
                tags.add(b1 == 1)
            if len(tags) != 1:
                raise CuspError("ladder mixes ascending and descending triangles", lid)
            asc = tags.pop()
        rungs = tuple(cusp.side_id(T, roles[T].wide) for T in strip)
        ladders.append(Ladder(lid, cusp.component_of[strip[0]], strip, rungs,
                              tuple(sorted(ps)), asc))

    order = []
    for cid in range(len(cusp.components)):
        mine = [L for L in ladders if L.torus == cid]
        first = min(mine, key=lambda L: min(L.triangles))
        seq = [first.id]
        pole = pole_of_vertex[cusp.vertex_of(min(first.triangles), roles[min(first.triangles)].wide)]
        cur = first
        while True:
            others = [L for L in mine if pole in L.poles and L.id != cur.id]
            if len(others) != 1:
                raise CuspError("ladderpole does not separate two ladders", pole)
            cur = others[0]
            pole = next(p for p in cur.poles if p != pole)
            if cur.id == first.id:
                break
            seq.append(cur.id)
        if len(seq) != len(mine) or len(seq) % 2:
            raise CuspError("ladders on a torus are not an even cycle", cid)
        if transverse is not None:
            for i, lid in enumerate(seq):
                if ladders[lid].ascending == ladders[seq[(i + 1) % len(seq)]].ascending:
                    raise CuspError("ascending and descending ladders do not alternate", cid)
        order.append(tuple(seq))

    hinge_triangle = {T: bool(hinge[T // 4]) for T in range(cusp.num_triangles)}
    return LadderSystem(roles, tuple(ladders), tuple(poles), ladder_of, tuple(order), hinge_triangle)


def down_neighbor(cusp: CuspComplex, system: LadderSystem, T: int) -> int:
    return cusp.across(T, system.roles[T].wide)[0]


def heights(cusp: CuspComplex, system: LadderSystem, ladder: Ladder) -> dict[int, int]:
    """Distance down an ascending ladder to the nearest hinge triangle."""
    if ladder.ascending is not True:
        raise CuspError("heights need an ascending ladder", ladder.id)
    H: dict[int, int] = {}
    for T in ladder.triangles:
        path, X = [], T
        while X not in H and not system.hinge_triangle[X]:
            path.append(X)
            X = down_neighbor(cusp, system, X)
            if len(path) > len(ladder.triangles):
                raise CuspError("no hinge in ladder", ladder.id)
        h = H.get(X, 0)
        H[X] = h
        for Y in reversed(path):
            h += 1
            H[Y] = h
    return H
