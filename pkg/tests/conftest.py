import itertools
import random
from pathlib import Path

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from veerangle.bundles import bundle
from veerangle.triangulation import (
    Triangulation,
    TriangulationError,
    make_triangulation,
    parse_triangulation,
    perm_inverse,
    perm_sign,
)
from veerangle.veering import veering_data

DATA = Path(__file__).parent / "data"
ODD_PERMS = [p for p in itertools.permutations(range(4)) if perm_sign(p) == -1]


def load(name: str) -> Triangulation:
    return parse_triangulation((DATA / name).read_text())


@pytest.fixture(scope="session")
def fig8():
    return veering_data(*bundle("RL"))


@pytest.fixture(scope="session")
def rrll():
    return veering_data(*bundle("RRLL"))


@pytest.fixture(scope="session")
def nontransverse():
    tri = load("nontransverse4.json")
    return veering_data(tri)


# -- independent oracles -----------------------------------------------------


def first_homology(tri: Triangulation) -> tuple[int, list[int]]:
    """(rank, torsion) of H1 from the dual cell complex, via Smith normal form."""
    faces: dict = {}
    for t in range(tri.n):
        for f in range(4):
            t2, f2, _ = tri.glue(t, f)
            faces.setdefault(min((t, f), (t2, f2)), len(faces))
    d1 = [[0] * len(faces) for _ in range(tri.n)]
    for (t, f), i in faces.items():
        t2, _, _ = tri.glue(t, f)
        d1[t2][i] += 1
        d1[t][i] -= 1
    # dual 2-cells are edge classes: cross the faces met while walking around each edge
    rows = []
    for e in tri.edge_classes:
        row = [0] * len(faces)
        t, (a, b) = e.incidences[0]
        start = (t, a, b)
        c, d = (x for x in range(4) if x not in (a, b))
        while True:
            t2, f2, p = tri.glue(t, c)
            key = min((t, c), (t2, f2))
            row[faces[key]] += 1 if key == (t, c) else -1
            t, a, b, c = t2, p[a], p[b], p[d]
            d = next(x for x in range(4) if x not in (a, b, c))
            if (t, a, b) == start:
                break
        rows.append(row)
    D1, D2 = Matrix(d1), Matrix(rows).T
    snf = smith_normal_form(D2, domain=ZZ)
    torsion = [abs(snf[i, i]) for i in range(min(snf.shape)) if abs(snf[i, i]) > 1]
    return len(faces) - D1.rank() - D2.rank(), torsion


def isomorphic(a: Triangulation, b: Triangulation) -> bool:
    """Brute-force combinatorial isomorphism: fix tet 0's image and propagate."""
    if a.n != b.n:
        return False
    for t0 in range(b.n):
        for s0 in itertools.permutations(range(4)):
            tmap, pmap = {0: t0}, {0: s0}
            stack, ok = [0], True
            while stack and ok:
                t = stack.pop()
                for f in range(4):
                    t2, f2, p = a.glue(t, f)
                    u, sig = tmap[t], pmap[t]
                    u2, g2, q = b.glue(u, sig[f])
                    # sigma2 = q o sigma o p^-1
                    pinv = perm_inverse(p)
                    sig2 = tuple(q[sig[pinv[i]]] for i in range(4))
                    if t2 in tmap:
                        if tmap[t2] != u2 or pmap[t2] != sig2:
                            ok = False
                            break
                    else:
                        if u2 in tmap.values():
                            ok = False
                            break
                        tmap[t2], pmap[t2] = u2, sig2
                        stack.append(t2)
            if ok and len(tmap) == a.n:
                return True
    return False


def random_gluing(n: int, rng: random.Random):
    faces = [(t, f) for t in range(n) for f in range(4)]
    rng.shuffle(faces)
    rows = [[None] * 4 for _ in range(n)]
    for (t, f), (t2, f2) in zip(faces[::2], faces[1::2]):
        p = rng.choice([p for p in ODD_PERMS if p[f] == f2])
        rows[t][f] = (t2, p)
        rows[t2][f2] = (t, perm_inverse(p))
    return rows


def random_curve(cusp, torus: int, rng: random.Random, max_len: int = 40):
    """Closed normal curve from a random walk on (triangle, entry side) states."""
    tris = cusp.components[torus]
    while True:
        T0 = rng.choice(tris)
        en0 = rng.choice(cusp.corners(T0))
        segs, T, en = [], T0, en0
        for _ in range(max_len):
            ex = rng.choice([a for a in cusp.corners(T) if a != en])
            segs.append((T, en, ex))
            T, en = cusp.across(T, ex)
            if (T, en) == (T0, en0):
                return cusp.make_curve(segs)


def canonical_cycle(curve) -> tuple:
    segs = curve.segments
    return min(segs[i:] + segs[:i] for i in range(len(segs)))


def mutate(tri: Triangulation, rng: random.Random):
    """Swap two gluing targets, keeping the result a valid closed orientable gluing."""
    for _ in range(100):
        rows = [list(r) for r in tri.gluings]
        (t, f), (s, g) = rng.sample([(t, f) for t in range(tri.n) for f in range(4)], 2)
        t2, p = rows[t][f]
        s2, q = rows[s][g]
        f2, g2 = p[f], q[g]
        if (s, g) in ((t2, f2),) or len({(t, f), (t2, f2), (s, g), (s2, g2)}) < 4:
            continue
        p_new = rng.choice([x for x in ODD_PERMS if x[f] == g])
        q_new = rng.choice([x for x in ODD_PERMS if x[f2] == g2])
        rows[t][f], rows[s][g] = (s, p_new), (t, perm_inverse(p_new))
        rows[t2][f2], rows[s2][g2] = (s2, q_new), (t2, perm_inverse(q_new))
        try:
            return make_triangulation(tri.name + "-mut", rows)
        except TriangulationError:
            continue
    raise RuntimeError("no valid mutation found")


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
