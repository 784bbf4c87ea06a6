import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_curve
from veerangle.bundles import bundle
from veerangle.cusp import NormalCurve
from veerangle.deform import DeformationError, DeformationVector, apply, edge_loop_deformation, leading_trailing
from veerangle.triangulation import PAIR_EDGES, AngleVector, check_angle_vector
from veerangle.veering import BLUE, veering_data

THIRD = Fraction(1, 3)


def test_empty_curve_gives_zero(fig8):
    assert leading_trailing(fig8.cusp, NormalCurve(0, ())).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["RL", "RRL", "RLRRL"]))
def test_reversal_negates_and_tangency_holds(seed, word):
    cusp = veering_data(*bundle(word)).cusp
    curve = random_curve(cusp, 0, random.Random(seed))
    D = leading_trailing(cusp, curve)
    assert leading_trailing(cusp, curve.reversed()) == -D
    assert all(sum(D.entries[3 * t: 3 * t + 3]) == 0 for t in range(cusp.tri.n))


def test_vertex_loop_touches_only_tetrahedra_around_its_edge(rrll):
    cusp, tri = rrll.cusp, rrll.tri
    for v in cusp.vertices:
        D = leading_trailing(cusp, cusp.vertex_loop(v.id))
        around = {t for t, _ in tri.edge_classes[v.edge].incidences}
        touched = {i // 3 for i, x in enumerate(D.entries) if x}
        assert touched and touched <= around


def test_edge_ends_agree_on_corpus_words():
    for word in ["RL", "RRLL", "RLRRRL"]:
        V = veering_data(*bundle(word))
        for e in V.tri.edge_classes:
            D = edge_loop_deformation(V.cusp, e.id)  # asserts both ends agree
            assert all(sum(D.entries[3 * t: 3 * t + 3]) == 0 for t in range(V.tri.n))


def test_opposite_diagonals_act_alike_on_a_hinge():
    """When each diagonal class meets the hinge once, the two deformations agree on it."""
    from veerangle.bundles import corpus

    checked = 0
    for w in corpus(8, 7):
        V = veering_data(*bundle(str(w)))
        for t in range(V.tri.n):
            if not V.hinge[t]:
                continue
            (a, b), (c, d) = PAIR_EDGES[V.taut.pi_pair[t]]
            e5, e6 = V.tri.edge_of(t, a, b), V.tri.edge_of(t, c, d)
            if any(sum(tt == t for tt, _ in V.tri.edge_classes[e].incidences) != 1 for e in (e5, e6)):
                continue
            D5 = edge_loop_deformation(V.cusp, e5).entries[3 * t: 3 * t + 3]
            D6 = edge_loop_deformation(V.cusp, e6).entries[3 * t: 3 * t + 3]
            assert any(D5) and D5 == D6
            checked += 1
    assert checked > 0


def test_apply_with_zero_coefficient(fig8):
    theta = fig8.taut.angles()
    assert apply(fig8.tri, theta, [(0, edge_loop_deformation(fig8.cusp, 0))]) == theta


def test_hinge_formula_on_rrll(rrll):
    from veerangle.rescue import hinge_deformation

    theta = apply(rrll.tri, rrll.taut.angles(), [(Fraction(1, 6), hinge_deformation(rrll))])
    for t in range(rrll.tri.n):
        vals = theta.tet(t)
        p = rrll.taut.pi_pair[t]
        assert vals[p] == THIRD
        if rrll.hinge[t]:
            assert sorted(vals) == [THIRD] * 3
        else:
            (a, b), _ = PAIR_EDGES[p]
            diag_blue = rrll.coloring[rrll.tri.edge_of(t, a, b)] == BLUE
            blue, red = (p + 1) % 3, (p + 2) % 3
            zero = red if diag_blue else blue
            assert vals[zero] == 0 and sorted(vals) == [0, THIRD, 2 * THIRD]


def test_deformation_validation(fig8):
    with pytest.raises(DeformationError, match="dimension"):
        DeformationVector(fig8.tri, (0, 0, 0))
    with pytest.raises(DeformationError, match="not tangent"):
        DeformationVector(fig8.tri, (1, 0, 0, 0, 0, 0))
    with pytest.raises(AssertionError):
        apply(fig8.tri, AngleVector.constant(2, 0), [])


def test_apply_stays_in_generalized_structures(rrll):
    rng = random.Random(3)
    theta = rrll.taut.angles()
    for _ in range(20):
        D = leading_trailing(rrll.cusp, random_curve(rrll.cusp, 0, rng))
        theta = apply(rrll.tri, theta, [(Fraction(rng.randint(-9, 9), 11), D)])
        assert check_angle_vector(rrll.tri, theta).classification != "invalid"
