"""Acceptance checks over the fixture corpus.

Each ``criterion_*`` function returns a list of :class:`Check` results; the
``selftest`` subcommand and ``tests/test_acceptance.py`` both run them.
:func:`law_violations` bundles the structural identities that every fixture
and every fuzzed closure must satisfy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

import numpy as np

from . import fixtures
from .algiso import (
    ColorBijection,
    _extension_hypotheses,
    find_algebraic_isomorphisms,
    realize,
    realize_extension,
    separability_verdict,
    try_extend,
)
from .config import (
    ColorMatrixConfiguration,
    ModuleVector,
    from_color_matrix,
    identity_color,
    is_commutative,
    is_homogeneous,
    module_product,
    scalar_product,
    verify_coherence,
)
from .constructions import cyclic_group, intro_example, regular_group_scheme
from .perm import automorphism_group, find_isomorphism, is_schurian, preserves_colors
from .quasithin import (
    expected_pattern,
    extension_fiber_violations,
    is_exceptional,
    is_kleinian,
    is_quasi_thin,
    klein_analysis_of,
    orthogonal_profile,
    point_involution,
    product_pattern,
    r_matrix_violations,
    reconstruct_from_R,
    regular_witness,
    subset_adjacency_violations,
    thick_colors,
    triangle_product_violations,
    triangles,
    _product,
)
from .structure import (
    is_1_regular,
    quotient,
    tensor_product,
    thin_radical,
    thin_residue,
    thin_residue_extension,
)
from .wl import coherent_closure, one_point_extension

GEOMETRY_FOR_INDEX = {3: "near-pencil-3", 4: "affine-plane-2", 7: "projective-plane-2"}


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" -- {self.detail}" if self.detail else ""
        return f"{status} criterion {self.criterion}: {self.name} ({self.seconds:.2f}s){extra}"


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def _all_scheme_fixtures() -> list:
    return [(n, fixtures.load(n)) for n in fixtures.scheme_names()]


def _intro_pair():
    return intro_example(1), intro_example(2)


# --------------------------------------------------------------------------
# criterion 1: the introductory pair
# --------------------------------------------------------------------------


def criterion_1() -> list:
    problems = []
    with _Timer() as t:
        x1, x2 = _intro_pair()
        for x in (x1, x2):
            if not (is_commutative(x) and is_quasi_thin(x) and x.degree == 16 and x.rank == 10):
                problems.append(f"{x.name}: wrong basic properties")
            v = is_kleinian(x)
            if not (v.kleinian and v.index == 4):
                problems.append(f"{x.name}: not Kleinian of index 4")
            if not is_schurian(x):
                problems.append(f"{x.name}: not schurian")
        if not find_algebraic_isomorphisms(x1, x2, limit=1):
            problems.append("no algebraic isomorphism between the pair")
        if find_isomorphism(x1, x2) is not None:
            problems.append("the pair is isomorphic")
        for x in (x1, x2):
            sv = separability_verdict(x, [x1, x2])
            if sv.all_realized:
                problems.append(f"{x.name}: reported separable relative to the pair")
    if t.seconds >= 10:
        problems.append(f"runtime {t.seconds:.1f}s exceeds 10s")
    return [Check(1, "introductory pair is non-separable", not problems, "; ".join(problems), t.seconds)]


# --------------------------------------------------------------------------
# criterion 2: vendored reference schemes
# --------------------------------------------------------------------------


def criterion_2() -> list:
    out = []
    start = time.perf_counter()
    with _Timer() as t:
        bad = []
        for name, index in fixtures.HM_INDEX.items():
            x = fixtures.load(name)
            v = is_kleinian(x) if is_quasi_thin(x) else None
            if v is None or not v.kleinian or v.index != index:
                bad.append(name)
    out.append(Check(2, "reference schemes are Kleinian of indices 4, 4, 7, 7", not bad, ", ".join(bad), t.seconds))
    with _Timer() as t:
        bad = []
        for good, nonschurian in fixtures.HM_PAIRS:
            if not is_schurian(fixtures.load(good)):
                bad.append(f"{good} is not schurian")
            if is_schurian(fixtures.load(nonschurian)):
                bad.append(f"{nonschurian} is schurian")
        orbits = len(automorphism_group(fixtures.load("hm16-173")).orbits)
        if orbits != 2:
            bad.append(f"Aut(hm16-173) has {orbits} orbits")
    out.append(Check(2, "schurity of the reference schemes; Aut(16-173) has two orbits", not bad, "; ".join(bad), t.seconds))
    for good, nonschurian in fixtures.HM_PAIRS:
        with _Timer() as t:
            a, b = fixtures.load(good), fixtures.load(nonschurian)
            ais = find_algebraic_isomorphisms(a, b)
            realized = [phi for phi in ais if realize(phi) is not None]
            ok = bool(ais) and not realized
            detail = f"{len(ais)} algebraic isomorphisms, {len(realized)} realized"
        out.append(Check(2, f"{good} -> {nonschurian}: algebraic isomorphisms exist, none realizable", ok, detail, t.seconds))
    total = time.perf_counter() - start
    out.append(Check(2, "runtime under 2 minutes", total < 120, f"{total:.1f}s", total))
    return out


# --------------------------------------------------------------------------
# criterion 3: geometry of Kleinian schemes
# --------------------------------------------------------------------------


def kleinian_fixtures() -> list:
    found = [(n, fixtures.load(n)) for n in fixtures.kleinian_names()]
    x1, x2 = _intro_pair()
    found += [("intro-1", x1), ("intro-2", x2)]
    for entry in fixtures.catalog_entries():
        c = entry.config
        if is_quasi_thin(c) and is_kleinian(c).kleinian:
            found.append((entry.declared_id, c))
    return found


def criterion_3() -> list:
    bad = []
    with _Timer() as t:
        items = kleinian_fixtures()
        for name, x in items:
            v = is_kleinian(x)
            verdict = klein_analysis_of(x).verdict
            if not v.kleinian or GEOMETRY_FOR_INDEX.get(v.index) != verdict:
                bad.append(f"{name}: index {v.index}, geometry {verdict}")
    return [Check(3, f"geometry matches the index on {len(items)} Kleinian fixtures", not bad, "; ".join(bad), t.seconds)]


# --------------------------------------------------------------------------
# criterion 4: the degree <= 8 slice
# --------------------------------------------------------------------------


def criterion_4() -> list:
    start = time.perf_counter()
    not_ok, too_many = [], []
    count = 0
    with _Timer() as t:
        for n in range(1, 9):
            entries = fixtures.catalog_entries(n)
            universe = [e.config for e in entries]
            for e in entries:
                x = e.config
                if not is_quasi_thin(x):
                    continue
                count += 1
                if not is_schurian(x) or not separability_verdict(x, universe).all_realized:
                    not_ok.append(e.declared_id)
    out = [Check(4, f"{count} quasi-thin schemes of degree <= 8 are schurian and separable", not not_ok, ", ".join(not_ok), t.seconds)]
    from .structure import is_primitive

    with _Timer() as t:
        for e in fixtures.catalog_entries():
            x = e.config
            if is_quasi_thin(x) and not is_primitive(x) and len(orthogonal_profile(x).orthogonals) > 1:
                too_many.append(f"{e.declared_id} has {len(orthogonal_profile(x).orthogonals)}")
    out.append(Check(4, "imprimitive quasi-thin schemes of degree <= 8 have at most one orthogonal", not too_many, "; ".join(too_many), t.seconds))
    total = time.perf_counter() - start
    out.append(Check(4, "runtime under 30 seconds", total < 30, f"{total:.1f}s", total))
    return out


# --------------------------------------------------------------------------
# criterion 5: extending algebraic isomorphisms
# --------------------------------------------------------------------------


def identity_bijection(cfg: ColorMatrixConfiguration) -> ColorBijection:
    return ColorBijection(cfg, cfg, tuple(range(cfg.rank)), verified=True)


def criterion_5(pairs: int = 20, seed: int = 20100) -> list:
    out = []
    rng = np.random.default_rng(seed)
    for name in fixtures.multi_orthogonal_names():
        x = fixtures.load(name)
        bad = []
        with _Timer() as t:
            reason = _extension_hypotheses(x)
            if reason is not None:
                bad.append(f"hypotheses unmet: {reason}")
            phi = identity_bijection(x)
            for _ in range(pairs):
                a, a2 = (int(p) for p in rng.integers(0, x.degree, size=2))
                res = try_extend(phi, a, a2, allow_fallback=False)
                if not res:
                    bad.append(f"({a}, {a2}): {res.reason}")
                    continue
                f = realize_extension(res)
                if f is None or f[a] != a2 or not preserves_colors(x, f):
                    bad.append(f"({a}, {a2}): realization failed")
            if not is_schurian(x):
                bad.append("not schurian")
        out.append(Check(5, f"{name}: {pairs} point pairs extend, verify and realize", not bad, "; ".join(bad[:3]), t.seconds))
    return out


# --------------------------------------------------------------------------
# criterion 6: structural identities
# --------------------------------------------------------------------------


def _tensor_violations(x: ColorMatrixConfiguration) -> list:
    out = []
    c = x.tensor.c
    adj = np.asarray(x.tensor.adjoint)
    if not np.array_equal(c[np.ix_(adj, adj, adj)], c.transpose(1, 0, 2)):
        out.append("tensor: c_{u*v*}^{w*} != c_{vu}^w")
    if is_homogeneous(x):
        n = np.asarray(x.tensor.valency)
        # A[u, v, w] = n_w c_uv^{w*}
        a = n[None, None, :] * c[:, :, adj]
        b = a.transpose(1, 2, 0)  # n_u c_vw^{u*}
        d = a.transpose(2, 0, 1)  # n_v c_wu^{v*}
        if not (np.array_equal(a, b) and np.array_equal(a, d)):
            out.append("tensor: valency-weighted cyclic identity fails")
    return out


def _scalar_violations(x: ColorMatrixConfiguration, rng, samples: int = 3) -> list:
    out = []
    r = x.rank
    for _ in range(samples):
        vx, vy, vz = (ModuleVector(tuple(int(v) for v in rng.integers(-2, 3, size=r))) for _ in range(3))
        lhs = scalar_product(x, module_product(x, vx, vy), vz)
        rhs = scalar_product(x, vy, module_product(x, vx.star(x.tensor), vz))
        if Fraction(lhs) != Fraction(rhs):
            out.append("scalar product: <xy, z> != <y, x* z>")
    return out


def _valency_one_violations(x: ColorMatrixConfiguration) -> list:
    """``c_{u*v}^w <= 1`` for all ``w`` iff ``uu* ∩ vv* = {1}``."""
    c = x.tensor.c
    adj = x.tensor.adjoint
    one = identity_color(x)
    out = []
    for u in range(x.rank):
        for v in range(x.rank):
            lhs = bool((c[adj[u], v] <= 1).all())
            su = set(np.flatnonzero(c[u, adj[u]]))
            sv = set(np.flatnonzero(c[v, adj[v]]))
            if lhs != (su & sv == {one}):
                out.append(f"valency-one criterion fails for ({u}, {v})")
    return out


def _quasi_thin_violations(x: ColorMatrixConfiguration, rng, points: int) -> list:
    out = []
    prof = orthogonal_profile(x)
    adj = x.tensor.adjoint
    one = identity_color(x)
    for u, o in prof.orthogonal.items():
        if o == one or adj[o] != o:
            out.append(f"orthogonal of {u} is not a non-trivial symmetric color")
    alphas = range(x.degree) if x.degree <= points else sorted(set(int(a) for a in rng.integers(0, x.degree, size=points)))
    for a in alphas:
        if not preserves_colors(x, point_involution(x, a)):
            out.append(f"f_{a} is not an automorphism")
        ext = one_point_extension(x, a)
        out += extension_fiber_violations(x, a, ext)
        if len(prof.orthogonals) >= 2 and not is_1_regular(ext):
            out.append(f"X_{a} is not 1-regular")
    thick = thick_colors(x)
    for u in thick:
        for v in thick:
            got = product_pattern(x, _product(x, int(adj[u]), v))
            if got is None or got != expected_pattern(x, prof, u, v):
                out.append(f"trichotomy fails for ({u}, {v})")
    try:
        v = is_kleinian(x)
    except AssertionError as exc:
        out.append(f"dual criterion: {exc}")
        return out
    for tri in triangles(x):
        try:
            exceptional = is_exceptional(x, tri, prof)
        except AssertionError as exc:
            out.append(f"exceptional criteria: {exc}")
            continue
        if not exceptional:
            for u, w, vv in permutations(tri):
                if regular_witness(x, u, vv, w) is None:
                    out.append(f"no regular witness for {(u, vv, w)}")
    if not v.kleinian and x.degree >= 9 and len(prof.orthogonals) >= 2:
        a = alphas[0] if len(alphas) else 0
        res = try_extend(ColorBijection(x, x, tuple(range(x.rank)), True), a, a, allow_fallback=False)
        if not res:
            out.append(f"identity extension at {a}: {res.reason}")
        elif not res.w_independent:
            out.append(f"extension at {a} depends on the choice of w")
        out += triangle_product_violations(x, a)
        out += subset_adjacency_violations(x)
    if v.kleinian:
        trx = thin_residue_extension(x)
        for embedding in ("residue", "base-row"):
            ka = klein_analysis_of(x, embedding=embedding)
            out += [f"{embedding}: {m}" for m in r_matrix_violations(ka)]
            rebuilt = from_color_matrix(reconstruct_from_R(ka, x.degree))
            if not rebuilt.same_partition(trx.extension):
                out.append(f"{embedding}: reconstruction from R differs")
    return out


def law_violations(x: ColorMatrixConfiguration, rng=None, points: int = 16) -> list:
    """Every structural identity checked on one configuration; empty when all hold."""
    rng = rng if rng is not None else np.random.default_rng(0)
    report = verify_coherence(x)
    if not report:
        return [f"coherence: {report.axiom}"]
    out = _tensor_violations(x) + _scalar_violations(x, rng)
    if is_homogeneous(x):
        out += _valency_one_violations(x)
        tr = thin_radical(x)
        for g in tr.colors:
            for h in tr.colors:
                if len(np.flatnonzero(x.tensor.c[g, h])) != 1:
                    out.append("thin colors do not multiply to one thin color")
        q = quotient(x, thin_residue(x)).config
        if not all(v == 1 for v in q.tensor.valency):
            out.append("quotient by the thin residue is not regular")
        if is_quasi_thin(x):
            out += _quasi_thin_violations(x, rng, points)
    return out


def random_seed_matrix(rng, max_degree: int = 12) -> np.ndarray:
    n = int(rng.integers(1, max_degree + 1))
    k = int(rng.integers(1, 4))
    m = rng.integers(0, k, size=(n, n))
    if rng.random() < 0.5:
        m = np.maximum(m, m.T)
    return m


def fuzzed_closures(count: int = 200, seed: int = 290810) -> list:
    rng = np.random.default_rng(seed)
    return [coherent_closure(random_seed_matrix(rng)) for _ in range(count)]


def criterion_6(count: int = 200) -> list:
    out = []
    rng = np.random.default_rng(6)
    with _Timer() as t:
        bad = []
        items = _all_scheme_fixtures() + [(e.declared_id, e.config) for e in fixtures.catalog_entries()]
        for name, x in items:
            bad += [f"{name}: {m}" for m in law_violations(x, rng)]
    out.append(Check(6, f"structural identities on {len(items)} fixtures", not bad, "; ".join(bad[:3]), t.seconds))
    with _Timer() as t:
        bad = []
        for k, x in enumerate(fuzzed_closures(count)):
            bad += [f"closure {k}: {m}" for m in law_violations(x, rng)]
    out.append(Check(6, f"structural identities on {count} fuzzed closures", not bad, "; ".join(bad[:3]), t.seconds))
    return out


# --------------------------------------------------------------------------
# criteria 7 and 8
# --------------------------------------------------------------------------


def criterion_7() -> list:
    out = []
    base = fixtures.load("hm16-173")
    for k in (2, 3):
        with _Timer() as t:
            y = tensor_product(base, regular_group_scheme(cyclic_group(k)))
            v = is_kleinian(y) if is_quasi_thin(y) else None
            ok = v is not None and v.kleinian and v.index == 4 and not is_schurian(y, cap=None)
        limit_ok = t.seconds < 300
        out.append(Check(7, f"16-173 (x) Z{k}: Kleinian of index 4, non-schurian", ok and limit_ok, f"degree {y.degree}", t.seconds))
    return out


def criterion_8() -> list:
    bad = []
    count = 0
    with _Timer() as t:
        items = _all_scheme_fixtures() + [(e.declared_id, e.config) for e in fixtures.catalog_entries()]
        items += list(zip(("intro-1", "intro-2"), _intro_pair()))
        for name, x in items:
            if is_homogeneous(x) and is_quasi_thin(x) and is_commutative(x):
                count += 1
                if not is_schurian(x, cap=None):
                    bad.append(name)
    return [Check(8, f"{count} commutative quasi-thin fixtures are schurian", not bad, ", ".join(bad), t.seconds)]


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8)


def run_all(stream=None) -> list:
    results = []
    for fn in CRITERIA:
        for check in fn():
            results.append(check)
            if stream is not None:
                print(check.line(), file=stream, flush=True)
    return results
