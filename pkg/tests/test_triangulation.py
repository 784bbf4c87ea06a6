import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load, random_gluing
from veerangle.bundles import bundle
from veerangle.triangulation import (
    AngleVector,
    TautStructure,
    TriangulationError,
    check_angle_vector,
    edge_classes,
    enumerate_taut_structures,
    make_triangulation,
    parse_triangulation,
    serialize_triangulation,
)


def test_figure_eight_edge_classes():
    tri = load("m004.json")
    assert tri.n == 2
    assert sorted(e.degree for e in edge_classes(tri)) == [6, 6]


def test_self_glued_face_is_rejected_with_location():
    rows = [[(0, (0, 1, 3, 2)), (0, (1, 0, 2, 3)), (0, (0, 1, 3, 2)), (0, (0, 1, 3, 2))]]
    doc = {"name": "bad", "tetrahedra": 1, "gluings": [[[t, list(p)] for t, p in r] for r in rows]}
    with pytest.raises(TriangulationError, match="self-glued face") as info:
        parse_triangulation(json.dumps(doc))
    assert info.value.location is not None


@pytest.mark.parametrize("mutation, message", [
    (lambda d: d["gluings"][0][0].__setitem__(0, 7), "out of range"),
    (lambda d: d["gluings"][0][0].__setitem__(1, [0, 0, 1, 2]), "not a permutation"),
    (lambda d: d["gluings"][0][0].__setitem__(1, [1, 0, 3, 2]), "involutive"),
    (lambda d: d.__setitem__("taut", [0]), "taut"),
])
def test_invalid_documents_name_a_location(mutation, message):
    tri, _ = bundle("RL")
    doc = json.loads(serialize_triangulation(tri))
    mutation(doc)
    with pytest.raises(TriangulationError, match=message) as info:
        parse_triangulation(json.dumps(doc))
    assert info.value.location is not None


def test_schema_violation_is_rejected():
    with pytest.raises(TriangulationError):
        parse_triangulation('{"name": "x", "tetrahedra": 1}')
    with pytest.raises(TriangulationError):
        parse_triangulation("not json")


def test_even_permutation_is_rejected():
    # an identity gluing between two tetrahedra reverses no orientation
    rows = [[(1, (0, 1, 2, 3))] * 4, [(0, (0, 1, 2, 3))] * 4]
    with pytest.raises(TriangulationError, match="orientable"):
        make_triangulation("even", rows)


@pytest.mark.parametrize("word", ["RL", "RRL", "RLRL", "RRLLRL"])
def test_round_trip(word):
    tri, taut = bundle(word)
    text = serialize_triangulation(tri, taut)
    again = parse_triangulation(text)
    assert again == tri and again.taut == taut.pi_pair
    assert serialize_triangulation(again, taut) == text


def test_degree_sum_is_six_per_tetrahedron():
    tri, _ = bundle("RLRL")
    assert tri.n == 4
    assert sum(e.degree for e in tri.edge_classes) == 24


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_random_gluings_count_edges(n, seed):
    tri = make_triangulation("r", random_gluing(n, random.Random(seed)))
    assert sum(e.degree for e in tri.edge_classes) == 6 * n
    incidences = sorted(i for e in tri.edge_classes for i in e.incidences)
    assert len(incidences) == len(set(incidences)) == 6 * n


def test_angle_classification():
    tri, taut = bundle("RL")
    assert check_angle_vector(tri, taut.angles()).classification == "taut"
    assert check_angle_vector(tri, AngleVector.constant(2, Fraction(1, 3))).classification == "positive"
    zero = check_angle_vector(tri, AngleVector.constant(2, 0))
    assert zero.classification == "invalid" and zero.violations


def test_generalized_classification(fig8):
    from veerangle.deform import edge_loop_deformation

    D = edge_loop_deformation(fig8.cusp, 0)
    theta = [x + 2 * d for x, d in zip(fig8.taut.angles().entries, D.entries)]
    check = check_angle_vector(fig8.tri, theta)
    assert min(theta) < 0 and check.classification == "generalized"


def test_taut_search_contains_layered_structure():
    for word in ["RL", "RLRL", "RRLL"]:
        tri, taut = bundle(word)
        found = enumerate_taut_structures(tri)
        assert taut in found
        for t in found:
            assert check_angle_vector(tri, t.angles()).classification == "taut"


def test_taut_search_agrees_with_brute_force():
    from itertools import product

    tri, _ = bundle("RRL")
    brute = {TautStructure(p) for p in product(range(3), repeat=tri.n)
             if check_angle_vector(tri, TautStructure(p).angles()).classification == "taut"}
    assert set(enumerate_taut_structures(tri)) == brute


def test_degree_one_edge_has_no_taut_structure():
    rng = random.Random(5)
    seen = 0
    for _ in range(400):
        tri = make_triangulation("r", random_gluing(rng.randint(1, 3), rng))
        if min(e.degree for e in tri.edge_classes) == 1:
            seen += 1
            assert enumerate_taut_structures(tri) == []
    assert seen > 0
