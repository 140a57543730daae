import numpy as np
import pytest
from hypothesis import given

from qtschemes import fixtures
from qtschemes.config import identity_color, is_homogeneous, verify_coherence
from qtschemes.constructions import (
    cyclic_group,
    intro_example,
    regular_group_scheme,
    trivial_scheme,
    wreath_2_n,
)
from qtschemes.perm import find_isomorphism, is_schurian
from qtschemes.structure import (
    ClosedSet,
    closed_set_generated,
    direct_sum,
    is_1_regular,
    is_closed,
    is_primitive,
    quotient,
    regular_points,
    restriction,
    tensor_product,
    thin_radical,
    thin_residue,
    thin_residue_extension,
)

from conftest import closures


@pytest.mark.parametrize("name", fixtures.scheme_names())
def test_thin_radical_is_a_group(name):
    x = fixtures.load(name)
    tr = thin_radical(x)
    colors = sorted(tr.colors)
    for u in colors:
        assert tr.table[(u, tr.inverse(u))] == tr.identity
        for v in colors:
            assert tr.table[(u, v)] in tr.colors
            assert list(np.flatnonzero(x.tensor.c[u, v])) == [tr.table[(u, v)]]
            for w in colors:
                assert tr.table[(tr.table[(u, v)], w)] == tr.table[(u, tr.table[(v, w)])]


@pytest.mark.parametrize("name", fixtures.scheme_names())
def test_quotient_by_thin_residue_is_regular(name):
    x = fixtures.load(name)
    q = quotient(x, thin_residue(x))
    assert verify_coherence(q.config)
    assert (q.config.tensor.valency == 1).all()


@pytest.mark.parametrize("name", fixtures.scheme_names())
def test_thin_residue_extension_is_coherent(name):
    x = fixtures.load(name)
    trx = thin_residue_extension(x)
    assert verify_coherence(trx.extension)
    assert len(trx.extension.fibers) == len(trx.classes)


def test_wreath_residue_and_quotient():
    for n in (3, 4, 5):
        x = wreath_2_n(n)
        res = thin_residue(x)
        assert len(res) == 2
        q = quotient(x, res).config
        assert find_isomorphism(q, regular_group_scheme(cyclic_group(n))) is not None


def test_wreath_point_extension_has_no_regular_points():
    from qtschemes.wl import one_point_extension

    for n in (3, 4):
        assert not is_1_regular(one_point_extension(wreath_2_n(n), 0))


def test_closed_sets():
    x = intro_example(1)
    one = identity_color(x)
    assert is_closed(x, [one])
    assert closed_set_generated(x, []) == ClosedSet(frozenset({one}))
    assert len(closed_set_generated(x, range(x.rank))) == x.rank
    assert len(thin_radical(x)) == 4


def test_restriction_to_class():
    x = fixtures.load("hm16-173")
    res = thin_residue(x)
    cls = np.flatnonzero(np.isin(x.matrix[0], sorted(res.colors)))
    sub = restriction(x, cls)
    assert sub.degree == 4 and sub.rank == 4
    with pytest.raises(ValueError):
        restriction(x, [0, 1, 5])


def test_restriction_to_fiber_union():
    x = thin_residue_extension(intro_example(1)).extension
    f = x.fibers[0]
    assert restriction(x, f).degree == len(f)


def test_sum_and_product_of_schurian_schemes():
    a, b = trivial_scheme(3), regular_group_scheme(cyclic_group(2))
    s, t = direct_sum(a, b), tensor_product(a, b)
    assert verify_coherence(s) and verify_coherence(t)
    assert not is_homogeneous(s) and is_homogeneous(t)
    assert is_schurian(s) and is_schurian(t)
    assert t.rank == a.rank * b.rank and t.degree == 6


def test_product_with_non_schurian_factor():
    t = tensor_product(fixtures.load("hm16-173"), regular_group_scheme(cyclic_group(2)))
    assert t.degree == 32 and not is_schurian(t)


def test_extension_schurity_on_reference_pair():
    good, bad = fixtures.load("hm16-172"), fixtures.load("hm16-173")
    assert is_schurian(good) and is_schurian(thin_residue_extension(good).extension)
    # the non-schurian scheme still has a schurian thin residue extension
    assert not is_schurian(bad)
    assert is_schurian(thin_residue_extension(bad).extension)


def test_primitivity():
    assert is_primitive(trivial_scheme(5))
    assert is_primitive(regular_group_scheme(cyclic_group(7)))
    assert not is_primitive(regular_group_scheme(cyclic_group(6)))
    assert not is_primitive(fixtures.load("polygon-10"))
    # distance 3 in the 9-gon together with the diagonal is an equivalence relation
    assert not is_primitive(fixtures.load("polygon-9"))


def test_regular_points():
    assert regular_points(regular_group_scheme(cyclic_group(4))) == [0, 1, 2, 3]
    assert regular_points(trivial_scheme(3)) == []


@given(closures(max_degree=9))
def test_quotients_and_restrictions_stay_coherent(x):
    if not is_homogeneous(x):
        return
    res = thin_residue(x)
    assert verify_coherence(quotient(x, res).config)
    cls = np.flatnonzero(np.isin(x.matrix[0], sorted(res.colors)))
    assert verify_coherence(restriction(x, cls))
    assert verify_coherence(thin_residue_extension(x).extension)
