import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from conftest import first_homology, isomorphic, load
from veerangle.bundles import L, R, MonodromyWord, WordError, bundle, corpus
from veerangle.triangulation import check_angle_vector
from veerangle.veering import classify_hinges, color_edges, transverse_orientation, veering_data


def monodromy(word: str, negate: bool) -> Matrix:
    m = Matrix.eye(2)
    for ch in word:
        m = m * Matrix(R if ch == "R" else L)
    return -m if negate else m


def expected_h1(word: str, negate: bool) -> tuple[int, list[int]]:
    """H1 of a punctured-torus bundle is Z plus the cokernel of (phi - I)."""
    A = monodromy(word, negate) - Matrix.eye(2)
    snf = smith_normal_form(A, domain=ZZ)
    diag = [abs(snf[i, i]) for i in range(2)]
    return 1 + diag.count(0), [d for d in diag if d > 1]


def test_figure_eight_matches_census_gluing():
    tri, _ = bundle("RL")
    assert tri.n == 2
    assert isomorphic(tri, load("m004.json"))
    assert first_homology(load("m004.json")) == (1, [])
    assert not isomorphic(bundle("RL", negate=True)[0], load("m004.json"))


@pytest.mark.parametrize("word", ["RL", "RRL", "RLL", "RRLL", "RLRL", "RRRL", "RRLRL", "RLLRRRL"])
@pytest.mark.parametrize("negate", [False, True])
def test_first_homology_matches_monodromy(word, negate):
    tri, _ = bundle(word, negate=negate)
    assert first_homology(tri) == expected_h1(word, negate)


@pytest.mark.parametrize("word", ["RL", "RRLL", "RLRRRL"])
def test_bundle_passes_pipeline_checks(word):
    tri, taut = bundle(word)
    assert tri.n == len(word)
    assert check_angle_vector(tri, taut.angles()).classification == "taut"
    color_edges(tri, taut)
    assert transverse_orientation(tri, taut) is not None
    assert len(tri.vertex_classes) == 1


def test_hinge_pattern_on_corpus():
    for w in corpus(9, 7):
        word = str(w)
        tri, taut = bundle(word)
        hinges = classify_hinges(tri, taut, color_edges(tri, taut))
        n = len(word)
        assert hinges == tuple(word[i] != word[(i + 1) % n] for i in range(n)), word


def test_fan_length_matches_longest_run():
    # recorded regression: d_max is one more than the longest cyclic run of a letter
    for w in corpus(9, 7):
        word = str(w)
        V = veering_data(*bundle(word))
        runs = max(len(r) for r in (word + word).replace("RL", "R L").replace("LR", "L R").split())
        assert V.d_max == min(runs, len(word)) + 1, word


def test_corpus_properties():
    words = [str(w) for w in corpus(12, 7)]
    assert {"RL", "LR"} & {str(w) for w in corpus(2, 0)}
    assert words == [str(w) for w in corpus(12, 7)]
    assert words != [str(w) for w in corpus(12, 8)]
    assert all("R" in w and "L" in w and len(w) <= 12 for w in words)
    assert "LLLLLLLLLLLR" in words or any(w.count("L") >= 5 and w.count("R") >= 1 for w in words)
    # de-duplicated up to rotation
    canon = {min(w[i:] + w[:i] for i in range(len(w))) for w in words}
    assert len(canon) == len(words)
    assert 150 <= len(words) <= 250


@pytest.mark.parametrize("word", ["", "RRR", "LL", "RXL"])
def test_invalid_words(word):
    with pytest.raises(WordError):
        MonodromyWord(word)


def test_rotation_gives_isomorphic_triangulation():
    a, _ = bundle("RRLRL")
    b, _ = bundle("RLRRL")
    assert isomorphic(a, b)
