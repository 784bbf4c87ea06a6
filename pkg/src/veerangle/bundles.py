"""Layered triangulations of once-punctured torus bundles.

The fiber is R^2 minus Z^2 modulo translations, so an ideal triangle is a
lattice triangle up to translation.  A layer is the triangulation with edge
vectors {a, b, a+b}; the letter R replaces (a, b) by (a, a+b) and L by
(a+b, b).  Each letter is one diagonal exchange, i.e. one flattened
tetrahedron whose vertices are the four corners of the parallelogram around
the flipped edge, with the old diagonal at height 0 and the new one at
height 1.  After the whole word the layer equals W({e1, e2, e1+e2}) for the
product matrix W, and the top layer is glued to the bottom one through
W^{-1}.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .triangulation import TautStructure, Triangulation, make_triangulation, pair_of, perm_sign

R = ((1, 1), (0, 1))
L = ((1, 0), (1, 1))


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class MonodromyWord:
    letters: str

    def __post_init__(self):
        w = self.letters.upper()
        if not w or set(w) - {"R", "L"}:
            raise WordError(f"word must be a nonempty string over R, L: {self.letters!r}")
        if "R" not in w or "L" not in w:
            raise WordError(f"word {self.letters!r} needs both letters (otherwise not pseudo-Anosov)")
        object.__setattr__(self, "letters", w)

    def __str__(self) -> str:
        return self.letters


def _mat_mul(m, k):
    return tuple(tuple(sum(m[i][x] * k[x][j] for x in range(2)) for j in range(2)) for i in range(2))


def _apply(m, p):
    return (m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1])


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def _add(p, q):
    return (p[0] + q[0], p[1] + q[1])


def _canon(points):
    """Lattice triangle up to translation: sorted vertices with the least at 0."""
    base = min(points)
    return tuple(sorted(_sub(p, base) for p in points))


def _det3(u, v, w):
    return (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]))


def bundle(word: MonodromyWord | str, *, negate: bool = False) -> tuple[Triangulation, TautStructure]:
    """Layered triangulation of the bundle with monodromy ``word``.

    ``negate`` composes the monodromy with the hyperelliptic involution -I.
    """
    if not isinstance(word, MonodromyWord):
        word = MonodromyWord(word)
    a, b = (1, 0), (0, 1)
    tets = []  # per tet: vertex -> (lattice point, height) plus faces
    for letter in word.letters:
        if letter == "R":
            # flip b: quadrilateral 0, a+b, b, -a with diagonal b
            p, q = _add(a, b), (-a[0], -a[1])
            a, b = a, _add(a, b)
        else:
            # flip a: quadrilateral 0, a+b, a, -b with diagonal a
            p, q = _add(a, b), (-b[0], -b[1])
            a, b = _add(a, b), b
        # bottom diagonal [0, p+q], top diagonal [p, q]
        pts = [((0, 0), 0), (p, 1), (_add(p, q), 0), (q, 1)]
        vol = _det3(*[(x[0][0] - pts[0][0][0], x[0][1] - pts[0][0][1], x[1] - pts[0][1]) for x in pts[1:]])
        if vol < 0:
            pts[1], pts[3] = pts[3], pts[1]
        tets.append(pts)

    w = (1, 0), (0, 1)
    for letter in word.letters:
        w = _mat_mul(w, R if letter == "R" else L)
    if negate:
        w = tuple(tuple(-x for x in row) for row in w)
    det = w[0][0] * w[1][1] - w[0][1] * w[1][0]
    w_inv = ((w[1][1] * det, -w[0][1] * det), (-w[1][0] * det, w[0][0] * det))

    n = len(tets)
    # faces: (tet, face) -> ordered vertex labels and lattice points
    def face(t, f):
        return [v for v in range(4) if v != f]

    def top_faces(t):
        return [f for f in range(4) if tets[t][f][1] == 0]  # opposite a bottom vertex

    def bottom_faces(t):
        return [f for f in range(4) if tets[t][f][1] == 1]

    gluings = [[None] * 4 for _ in range(n)]
    for t in range(n):
        t2 = (t + 1) % n
        for f in top_faces(t):
            pts = {v: tets[t][v][0] for v in face(t, f)}
            if t2 == 0:
                pts = {v: _apply(w_inv, x) for v, x in pts.items()}
            key = _canon(pts.values())
            match = None
            for f2 in bottom_faces(t2):
                pts2 = {v: tets[t2][v][0] for v in face(t2, f2)}
                if _canon(pts2.values()) == key:
                    match = (f2, pts2)
            if match is None:
                raise AssertionError(f"no matching face for tet {t} face {f}")
            f2, pts2 = match
            shift = _sub(min(pts2.values()), min(pts.values()))
            perm = [None] * 4
            perm[f] = f2
            for v, x in pts.items():
                y = _add(x, shift)
                perm[v] = next(u for u, z in pts2.items() if z == y)
            perm = tuple(perm)
            if perm_sign(perm) != -1:
                raise AssertionError("layered gluing is not orientation reversing")
            inv = [0] * 4
            for i, x in enumerate(perm):
                inv[x] = i
            gluings[t][f] = (t2, perm)
            gluings[t2][f2] = (t, tuple(inv))

    pi_pair = []
    for t in range(n):
        bottom = [v for v in range(4) if tets[t][v][1] == 0]
        pi_pair.append(pair_of(*bottom))
    name = ("-" if negate else "") + word.letters
    tri = make_triangulation(name, gluings, pi_pair)
    return tri, TautStructure(tuple(pi_pair))


def _necklace(word: str) -> str:
    return min(word[i:] + word[:i] for i in range(len(word)))


def corpus(max_len: int, seed: int) -> list[MonodromyWord]:
    """Deterministic test corpus of monodromy words.

    All words of length <= 6 up to rotation, every L^a R^b with a + b <=
    max_len, and seeded random words of length 7..max_len.
    """
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    seen: dict[str, None] = {}

    def add(w: str) -> None:
        if "R" in w and "L" in w:
            seen.setdefault(_necklace(w), None)

    for k in range(2, min(6, max_len) + 1):
        for letters in itertools.product("LR", repeat=k):
            add("".join(letters))
    for total in range(2, max_len + 1):
        for a in range(1, total):
            add("L" * a + "R" * (total - a))
    rng = random.Random(seed)
    if max_len > 6:
        target = len(seen) + 20 * (max_len - 6)
        attempts = 0
        while len(seen) < target and attempts < 100 * target:
            attempts += 1
            k = rng.randint(7, max_len)
            add("".join(rng.choice("LR") for _ in range(k)))
    return [MonodromyWord(w) for w in seen]
