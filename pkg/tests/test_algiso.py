from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtschemes import fixtures
from qtschemes.acceptance import identity_bijection
from qtschemes.algiso import (
    ColorBijection,
    _PointExtension,
    extend_algebraic_isomorphism,
    find_algebraic_isomorphisms,
    induced_by,
    is_algebraic_isomorphism,
    realize,
    realize_extension,
    separability_verdict,
    try_extend,
)
from qtschemes.config import from_color_matrix, identity_color
from qtschemes.constructions import intro_example
from qtschemes.perm import preserves_colors
from qtschemes.quasithin import orthogonal_profile

from conftest import closures


@pytest.fixture(scope="module")
def intro():
    return intro_example(1), intro_example(2)


def test_intro_pair_algebraic_isomorphisms(intro):
    x1, x2 = intro
    ais = find_algebraic_isomorphisms(x1, x2)
    assert len(ais) == 48
    assert all(realize(phi) is None for phi in ais)


def test_intro_pair_separability(intro):
    x1, x2 = intro
    for x in intro:
        v = separability_verdict(x, [x1, x2])
        assert not v.all_realized and v.refuted_by is not None and v.relative


def test_reference_pairs(hm):
    ais = find_algebraic_isomorphisms(hm["hm28-175"], hm["hm28-176"])
    assert len(ais) == 12 and all(realize(phi) is None for phi in ais)
    # exhaustive search: the degree-16 fixtures admit no algebraic isomorphism
    assert find_algebraic_isomorphisms(hm["hm16-172"], hm["hm16-173"]) == []
    selfs = find_algebraic_isomorphisms(hm["hm16-173"], hm["hm16-173"])
    assert len(selfs) == 8 and all(realize(phi) is not None for phi in selfs)


def _brute_algebraic(a, b):
    ca, cb = a.tensor.c, b.tensor.c
    out = []
    for p in permutations(range(b.rank)):
        m = np.asarray(p)
        if np.array_equal(ca, cb[np.ix_(m, m, m)]):
            out.append(tuple(p))
    return out


@settings(max_examples=25)
@given(closures(max_degree=7))
def test_search_matches_brute_force(x):
    if x.rank > 7:
        return
    got = sorted(phi.mapping for phi in find_algebraic_isomorphisms(x, x))
    assert got == sorted(_brute_algebraic(x, x))


@pytest.mark.parametrize("name", ["hm16-173", "hm28-175", "polygon-12", "kleinian16-3"])
def test_bijections_preserve_structure(name):
    x = fixtures.load(name)
    t = x.tensor
    prof = orthogonal_profile(x)
    for phi in find_algebraic_isomorphisms(x, x, limit=20):
        assert phi(identity_color(x)) == identity_color(x)
        for u in range(x.rank):
            assert t.adjoint[phi(u)] == phi(int(t.adjoint[u]))
            assert t.valency[phi(u)] == t.valency[u]
            if u in prof.orthogonal:
                assert prof.orthogonal[phi(u)] == phi(prof.orthogonal[u])
            for v in range(x.rank):
                assert np.count_nonzero(t.c[t.adjoint[u], v]) == np.count_nonzero(t.c[t.adjoint[phi(u)], phi(v)])


@given(closures(max_degree=7), st.data())
def test_induced_maps_are_algebraic(x, data):
    p = data.draw(st.permutations(list(range(x.degree))))
    pa = np.asarray(p)
    inv = np.argsort(pa)
    y = from_color_matrix(x.matrix[np.ix_(inv, inv)])
    phi = induced_by(p, x, y)
    assert phi.verified and is_algebraic_isomorphism(x, y, phi.mapping)
    f = realize(phi)
    assert f is not None and induced_by(f, x, y).mapping == phi.mapping


def test_induced_by_rejects_non_isomorphisms():
    x = intro_example(1)
    with pytest.raises(ValueError):
        induced_by([1, 0] + list(range(2, 16)), x, x)


# --------------------------------------------------------------------------
# one-point extensions
# --------------------------------------------------------------------------

MULTI = fixtures.multi_orthogonal_names()


@pytest.mark.parametrize("name", MULTI)
def test_block_structure(name):
    x = fixtures.load(name)
    val = x.tensor.valency
    for alpha in (0, x.degree // 2):
        px = _PointExtension(x, alpha)
        for (u, v), colors in px.colors_in.items():
            parents = {px.base_color[a] for a in colors}
            # the base colors met by the block are exactly the support of u* v
            assert parents == set(np.flatnonzero(x.tensor.c[x.tensor.adjoint[u], v]))
            for w in parents:
                k = len(px.color_with_base(u, v, w))
                assert k in (1, 2)
                if k == 2:
                    assert val[u] == val[v] == 2


@pytest.mark.parametrize("name", MULTI)
def test_extension_preserves_products(name):
    x = fixtures.load(name)
    for phi in find_algebraic_isomorphisms(x, x, limit=3):
        res = extend_algebraic_isomorphism(phi, 0, x.degree - 1)
        assert res is not None and res.method == "construction" and res.w_independent
        px, py = _PointExtension(x, 0), _PointExtension(x, x.degree - 1)
        ext = dict(enumerate(res.extended.mapping))
        for a in range(px.ext.rank):
            for b in range(px.ext.rank):
                c = px.compose(a, b)
                if c is not None:
                    assert py.compose(ext[a], ext[b]) == ext[c]
        f = realize_extension(res)
        assert f is not None and f[0] == x.degree - 1
        assert induced_by(f, x, x).mapping == phi.mapping


@pytest.mark.parametrize("name", MULTI)
def test_extension_for_every_point_pair_sample(name):
    x = fixtures.load(name)
    rng = np.random.default_rng(11)
    phi = identity_bijection(x)
    for a, b in rng.integers(0, x.degree, size=(8, 2)):
        res = try_extend(phi, int(a), int(b), allow_fallback=False)
        assert res, getattr(res, "reason", "")


def test_extension_outside_hypotheses():
    x = fixtures.load("hm16-173")
    phi = identity_bijection(x)
    refused = try_extend(phi, 0, 1, allow_fallback=False)
    assert not refused and "Kleinian" in refused.reason
    res = extend_algebraic_isomorphism(phi, 0, 0)
    assert res is not None and res.method == "fallback"
