from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtschemes.config import (
    IncoherentError,
    ModuleVector,
    complex_product,
    from_color_matrix,
    identity_color,
    is_commutative,
    is_homogeneous,
    module_product,
    properties,
    relabel_points,
    scalar_product,
    verify_coherence,
)
from qtschemes.constructions import cyclic_group, regular_group_scheme, trivial_scheme
from qtschemes.perm import PermutationGroup, orbital_configuration

from conftest import brute_tensor, closures


def test_trivial_scheme_properties():
    x = trivial_scheme(5)
    assert x.rank == 2 and x.degree == 5
    assert verify_coherence(x)
    assert is_homogeneous(x) and is_commutative(x)
    assert x.tensor.valency.tolist() == [1, 4]


def test_canonical_relabelling_is_first_occurrence():
    x = from_color_matrix([[7, 3], [3, 7]])
    assert x.matrix.tolist() == [[0, 1], [1, 0]]


def test_rejects_malformed_matrices():
    with pytest.raises(ValueError):
        from_color_matrix([[0, 1, 2], [1, 0, 2]])
    with pytest.raises(ValueError):
        from_color_matrix([[0, -1], [-1, 0]])
    with pytest.raises(ValueError):
        from_color_matrix(np.zeros((0, 0)))


def test_incoherent_matrix_reports_axiom():
    # a path on 3 points with the diagonal merged into non-edges
    x = from_color_matrix([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    report = verify_coherence(x)
    assert not report and report.axiom == "diagonal not a union of classes"
    with pytest.raises(IncoherentError):
        x.tensor
    y = from_color_matrix([[0, 1, 2], [2, 0, 1], [2, 1, 0]])
    assert verify_coherence(y).axiom == "not closed under transpose"


def test_cyclic_scheme_products():
    x = regular_group_scheme(cyclic_group(5))
    assert identity_color(x) == 0
    color_of = {int(x.matrix[0, g]): g for g in range(5)}
    for u in range(5):
        for v in range(5):
            prod = complex_product(x, u, v)
            (w,) = prod.support
            assert prod[w] == 1
            assert color_of[w] == (color_of[u] + color_of[v]) % 5


@given(closures(max_degree=9))
def test_tensor_matches_adjacency_products(x):
    assert np.array_equal(x.tensor.c, brute_tensor(x.matrix))


@given(closures(max_degree=9))
def test_adjoint_identity(x):
    c, adj = x.tensor.c, x.tensor.adjoint
    assert np.array_equal(c[np.ix_(adj, adj, adj)], c.transpose(1, 0, 2))


@given(closures(max_degree=9))
def test_valency_weighted_identity(x):
    if not is_homogeneous(x):
        return
    c, adj, n = x.tensor.c, x.tensor.adjoint, x.tensor.valency
    a = n[None, None, :] * c[:, :, adj]
    assert np.array_equal(a, a.transpose(1, 2, 0))
    assert np.array_equal(a, a.transpose(2, 0, 1))


@given(closures(max_degree=8), st.data())
def test_scalar_product_adjunction(x, data):
    vec = st.lists(st.integers(-3, 3), min_size=x.rank, max_size=x.rank).map(lambda v: ModuleVector(tuple(v)))
    a, b, c = data.draw(vec), data.draw(vec), data.draw(vec)
    lhs = scalar_product(x, module_product(x, a, b), c)
    rhs = scalar_product(x, b, module_product(x, a.star(x.tensor), c))
    assert isinstance(lhs, Fraction) and lhs == rhs


@given(closures(max_degree=9))
def test_valency_one_criterion(x):
    if not is_homogeneous(x):
        return
    c, adj = x.tensor.c, x.tensor.adjoint
    one = identity_color(x)
    for u in range(x.rank):
        for v in range(x.rank):
            small = bool((c[adj[u], v] <= 1).all())
            meet = set(np.flatnonzero(c[u, adj[u]])) & set(np.flatnonzero(c[v, adj[v]]))
            assert small == (meet == {one})


@given(st.integers(2, 7), st.data())
def test_orbital_configurations_are_coherent(n, data):
    perms = st.permutations(list(range(n))).map(tuple)
    gens = data.draw(st.lists(perms, min_size=1, max_size=2))
    assert verify_coherence(orbital_configuration(PermutationGroup(n, gens)))


@given(closures(max_degree=7), st.data())
def test_relabelling_preserves_tensor(x, data):
    p = data.draw(st.permutations(list(range(x.degree))))
    y = relabel_points(x, p)
    assert verify_coherence(y)
    assert sorted(y.class_sizes.tolist()) == sorted(x.class_sizes.tolist())
    assert properties(y).is_commutative == properties(x).is_commutative
