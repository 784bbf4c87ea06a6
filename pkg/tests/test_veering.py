import itertools
import random

import pytest

from conftest import mutate, random_gluing
from veerangle.bundles import bundle, corpus
from veerangle.cusp import CuspComplex, CuspError
from veerangle.triangulation import TautStructure, TriangulationError, enumerate_taut_structures, make_triangulation
from veerangle.veering import (
    BLUE,
    RED,
    Coloring,
    FaceOrientation,
    VeeringError,
    _double_cover,
    _reference_bits,
    check_deck,
    check_square_model,
    classify_hinges,
    color_edges,
    mirror_veering,
    square_model_coloring,
    transverse_double_cover,
    transverse_orientation,
    veering_data,
)


def fan_veering(tri, taut) -> bool:
    try:
        color_edges(tri, taut)
        return True
    except (VeeringError, CuspError):
        return False


def square_veering(tri, taut) -> bool:
    coloring = square_model_coloring(tri, taut)
    return coloring is not None and check_square_model(tri, taut, coloring)


def is_coherent(tri, bits) -> bool:
    if any(sum(row) != 2 for row in bits):
        return False
    return all(bits[t][f] != bits[tri.glue(t, f)[0]][tri.glue(t, f)[1]] for t in range(tri.n) for f in range(4))


def test_figure_eight_colors(fig8):
    assert sorted(fig8.coloring.colors) == [BLUE, RED]
    assert fig8.hinge == (True, True)
    assert fig8.d_max == 2


def test_rrll_is_veering_with_non_hinges(rrll):
    # tetrahedron i sits between letters i and i + 1
    assert rrll.hinge == (False, True, False, True)


def test_square_model_conventions(fig8):
    tri, taut, coloring = fig8.tri, fig8.taut, fig8.coloring
    assert check_square_model(tri, taut, coloring)
    assert not check_square_model(tri, taut, coloring.swapped())
    for e in range(len(coloring.colors)):
        recolored = list(coloring.colors)
        recolored[e] = RED if recolored[e] == BLUE else BLUE
        assert not check_square_model(tri, taut, Coloring(tuple(recolored)))


def test_non_veering_taut_structure_names_a_vertex():
    for word in ["RRLL", "RLRL", "RRRL", "RRLRL"]:
        tri, canonical = bundle(word)
        for taut in enumerate_taut_structures(tri):
            if taut == canonical or fan_veering(tri, taut):
                continue
            with pytest.raises(VeeringError) as info:
                color_edges(tri, taut)
            assert info.value.location is not None
            assert not square_veering(tri, taut)
            return
    pytest.fail("no non-veering taut structure found")


def test_veering_equivalence_on_corpus():
    for w in corpus(8, 7):
        for negate in (False, True):
            tri, taut = bundle(str(w), negate=negate)
            assert fan_veering(tri, taut) and square_veering(tri, taut)
            assert square_model_coloring(tri, taut) == color_edges(tri, taut)


def test_veering_equivalence_on_mutations():
    rng = random.Random(2024)
    rejected = 0
    for w in corpus(8, 7):
        tri, _ = bundle(str(w))
        for _ in range(10):
            m = mutate(tri, rng)
            for taut in enumerate_taut_structures(m):
                fans, square = fan_veering(m, taut), square_veering(m, taut)
                assert fans == square
                rejected += not fans
    assert rejected >= 50


def test_veering_equivalence_on_random_gluings():
    rng = random.Random(99)
    checked = 0
    while checked < 40:
        try:
            tri = make_triangulation("r", random_gluing(rng.randint(2, 4), rng))
        except TriangulationError:
            continue
        for taut in enumerate_taut_structures(tri):
            assert fan_veering(tri, taut) == square_veering(tri, taut)
            checked += 1


def test_mirror_veering_flags_only_uniform_links(fig8):
    assert mirror_veering(fig8.tri, fig8.taut)


def test_transverse_orientation_is_coherent_and_unique_up_to_flip():
    for word in ["RL", "RRL", "RRLL", "RLRRL"]:
        tri, taut = bundle(word)
        orient = transverse_orientation(tri, taut)
        assert orient is not None and is_coherent(tri, orient.bits)
        assert orient.bits[0][0] == 1
        refs = [_reference_bits(taut, t) for t in range(tri.n)]
        coherent = set()
        for flips in itertools.product((0, 1), repeat=tri.n):
            bits = tuple(tuple(b ^ s for b in refs[t]) for t, s in enumerate(flips))
            if is_coherent(tri, bits):
                coherent.add(bits)
        assert coherent == {orient.bits, orient.flipped().bits}


def test_double_cover_rejects_transverse_input(fig8):
    with pytest.raises(VeeringError):
        transverse_double_cover(fig8.tri, fig8.taut)


def test_double_cover_of_nontransverse_input(nontransverse):
    V = nontransverse
    assert V.transverse is None
    cover, ctaut, cmap = transverse_double_cover(V.tri, V.taut)
    W = veering_data(cover, ctaut)
    assert W.transverse is not None
    assert cover.n == 2 * V.tri.n
    assert cover.e_max == V.tri.e_max and W.d_max == V.d_max
    check_deck(cover, cmap)
    assert all(cmap.projection[i] == cmap.projection[j] for i, j in enumerate(cmap.deck))
    assert sorted(e.degree for e in cover.edge_classes) == sorted(2 * [e.degree for e in V.tri.edge_classes])
    # the pi-pairs and colors lift
    assert all(ctaut.pi_pair[i] == V.taut.pi_pair[cmap.projection[i]] for i in range(cover.n))
    assert all(W.hinge[i] == V.hinge[cmap.projection[i]] for i in range(cover.n))


@pytest.mark.parametrize("seed", range(6))
def test_scrambled_cover_of_transverse_input(seed):
    """Flipping the local coorientation of random tetrahedra still gives a free deck involution."""
    tri, taut = bundle(["RL", "RRL", "RRLL", "RLRRL", "RLLL", "RRLRL"][seed])
    rng = random.Random(seed)
    refs = [[b ^ flip for b in _reference_bits(taut, t)]
            for t, flip in enumerate(rng.randint(0, 1) for _ in range(tri.n))]
    cover, ctaut, cmap = _double_cover(tri, taut, refs)
    check_deck(cover, cmap)
    W = veering_data(cover, ctaut)
    assert W.transverse is not None
    # the base is transverse-taut, so the cover splits into two copies
    assert len(W.cusp.components) == 2
    assert cover.e_max == tri.e_max and W.d_max == veering_data(tri, taut).d_max


def test_cover_of_transverse_input_with_true_orientation_is_disconnected(fig8):
    refs = [list(row) for row in fig8.transverse.bits]
    cover, ctaut, cmap = _double_cover(fig8.tri, fig8.taut, refs)
    assert len(cover.vertex_classes) == 2 * len(fig8.tri.vertex_classes)
    assert len(CuspComplex(cover).components) == 2


def test_face_orientation_flip():
    o = FaceOrientation(((1, 1, 0, 0),))
    assert o.flipped().bits == ((0, 0, 1, 1),)
    assert o.out(0, 0) and not o.out(0, 2)


def test_classify_hinges_against_pair_colors(rrll):
    hinges = classify_hinges(rrll.tri, rrll.taut, rrll.coloring)
    assert hinges == rrll.hinge
    assert TautStructure(rrll.taut.pi_pair) == rrll.taut
