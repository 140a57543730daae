import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtschemes import fixtures
from qtschemes.acceptance import law_violations
from qtschemes.algiso import separability_verdict
from qtschemes.config import from_color_matrix, identity_color, is_commutative, verify_coherence
from qtschemes.constructions import cyclic_group, intro_example, klein_cover_scheme, wreath_2_n
from qtschemes.perm import is_schurian, preserves_colors
from qtschemes.quasithin import (
    IncidenceStructure,
    adjacency,
    classify_geometry,
    expected_pattern,
    is_exceptional,
    is_kleinian,
    is_quasi_thin,
    klein_analysis_of,
    orthogonal_profile,
    orthogonals_form_klein_group,
    point_involution,
    r_matrix_violations,
    reconstruct_from_R,
    regular_witness,
    subset_adjacency_violations,
    thick_colors,
    triangle_product_violations,
    triangles,
)
from qtschemes.structure import is_1_regular, thin_residue_extension
from qtschemes.wl import one_point_extension

QT = [n for n in fixtures.scheme_names() if is_quasi_thin(fixtures.load(n))]
KLEIN = fixtures.kleinian_names()
MULTI = fixtures.multi_orthogonal_names()


@pytest.mark.parametrize("name", QT)
def test_orthogonals(name):
    x = fixtures.load(name)
    one = identity_color(x)
    prof = orthogonal_profile(x)
    for u in thick_colors(x):
        o = prof.orthogonal[u]
        support = set(np.flatnonzero(x.tensor.c[u, x.tensor.adjoint[u]]))
        assert support == {one, o} and o != one and x.tensor.adjoint[o] == o


@pytest.mark.parametrize("name", QT)
def test_trichotomy(name):
    x = fixtures.load(name)
    prof = orthogonal_profile(x)
    for u in thick_colors(x):
        for v in thick_colors(x):
            a = adjacency(x, u, v)
            assert a.pattern == expected_pattern(x, prof, u, v)
            assert a.adjacent == (u != v and a.pattern in (2, 3) and len(a.product) == 2) or a.pattern == 1


@pytest.mark.parametrize("name", QT)
def test_point_involutions_are_automorphisms(name):
    x = fixtures.load(name)
    for alpha in range(x.degree):
        f = point_involution(x, alpha)
        assert preserves_colors(x, f)
        row = x.matrix[alpha]
        for beta in range(x.degree):
            if x.tensor.valency[row[beta]] == 1:
                assert f[beta] == beta
            else:
                assert f[beta] != beta and row[f[beta]] == row[beta]


@pytest.mark.parametrize("name", [n for n in QT if len(orthogonal_profile(fixtures.load(n))) >= 2])
def test_point_extensions_are_1_regular(name):
    x = fixtures.load(name)
    for alpha in range(0, x.degree, max(1, x.degree // 6)):
        assert is_1_regular(one_point_extension(x, alpha))


def test_single_orthogonal_wreath():
    x = wreath_2_n(5)
    assert len(orthogonal_profile(x)) == 1
    assert not is_1_regular(one_point_extension(x, 0))


@pytest.mark.parametrize("name", QT)
def test_triangles(name):
    x = fixtures.load(name)
    prof = orthogonal_profile(x)
    for tri in triangles(x):
        exc = is_exceptional(x, tri, prof)
        assert exc == orthogonals_form_klein_group(x, tri, prof)
        if not exc:
            u, v, w = tri
            for a, b, c in ((u, v, w), (v, w, u), (w, u, v), (u, w, v), (v, u, w), (w, v, u)):
                assert regular_witness(x, a, b, c) is not None


def test_kleinian_verdicts(hm):
    for name, index in fixtures.HM_INDEX.items():
        v = is_kleinian(hm[name])
        assert v.kleinian and v.index == index
    assert is_kleinian(intro_example(1)).index == 4
    assert is_kleinian(fixtures.load("kleinian12-1")).index == 3
    for name in MULTI:
        assert not is_kleinian(fixtures.load(name)).kleinian


@pytest.mark.parametrize("name", KLEIN)
def test_commutative_kleinian_has_three_orthogonals(name):
    x = fixtures.load(name)
    if is_commutative(x):
        assert len(orthogonal_profile(x)) == 3


@pytest.mark.parametrize("name", KLEIN)
def test_klein_analysis(name):
    x = fixtures.load(name)
    index = is_kleinian(x).index
    trx = thin_residue_extension(x)
    verdicts = set()
    for embedding in ("residue", "base-row"):
        ka = klein_analysis_of(x, embedding=embedding)
        assert np.array_equal(ka.R, ka.L.T)
        assert r_matrix_violations(ka) == []
        assert from_color_matrix(reconstruct_from_R(ka, x.degree)).same_partition(trx.extension)
        geo = ka.geometry
        assert geo.is_partial_linear_space()
        assert all(len(geo.lines_through(p)) <= 3 for p in geo.points)
        verdicts.add(ka.verdict)
    expected = {3: "near-pencil-3", 4: "affine-plane-2", 7: "projective-plane-2"}[index]
    assert verdicts == {expected}


def test_index_seven_schemes_are_not_commutative(hm):
    assert not is_commutative(hm["hm28-175"]) and not is_commutative(hm["hm28-176"])


def test_near_pencil_scheme_is_schurian_and_separable():
    x = fixtures.load("kleinian12-1")
    assert is_schurian(x)
    assert separability_verdict(x, [x]).all_realized


def test_classify_geometry():
    fano = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    assert classify_geometry(IncidenceStructure(tuple(range(7)), tuple(fano))) == "projective-plane-2"
    pairs = tuple((a, b) for a in range(4) for b in range(a + 1, 4))
    assert classify_geometry(IncidenceStructure(tuple(range(4)), pairs)) == "affine-plane-2"
    assert classify_geometry(IncidenceStructure((0, 1, 2), ((0, 1), (0, 2), (1, 2)))) == "near-pencil-3"
    assert classify_geometry(IncidenceStructure((0, 1, 2), ((0, 1, 2),))) == "single-line"
    assert classify_geometry(IncidenceStructure((0, 1, 2, 3), ((0, 1), (2, 3)))) == "other"


@pytest.mark.parametrize("name", MULTI)
def test_common_neighbour_and_triangle_products(name):
    x = fixtures.load(name)
    assert subset_adjacency_violations(x) == []
    for alpha in (0, x.degree - 1):
        assert triangle_product_violations(x, alpha) == []


@settings(max_examples=30)
@given(
    st.sampled_from([3, 4]),
    st.lists(st.sampled_from([1, 2, 3]), min_size=3, max_size=3),
    st.lists(st.integers(0, 1), min_size=12, max_size=12),
)
def test_random_klein_covers_satisfy_all_laws(m, rho_values, bits):
    q = cyclic_group(m)
    rho = [0] + rho_values[: m - 1]
    twist = {d: bits[(d - 1) * m:d * m] for d in range(1, m)}
    x = klein_cover_scheme(q, rho, twist)
    if not verify_coherence(x) or not is_quasi_thin(x):
        return
    assert law_violations(x) == []
