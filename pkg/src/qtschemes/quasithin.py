"""Quasi-thin schemes: orthogonals, adjacency, triangles, Klein structure.

In a quasi-thin scheme every color has valency 1 (thin) or 2 (thick).  A
thick color ``u`` has ``u u* = {1, u^perp}``; ``u^perp`` is its orthogonal.
The Kleinian case is analysed through the thin residue extension, whose
homogeneous components are regular Klein four-group schemes; the stabilizer
subgroups ``R_ij`` of the fiber pairs define an incidence geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Optional, Sequence

import numpy as np

from .config import ColorMatrixConfiguration, identity_color, is_homogeneous
from .structure import (
    ClosedSet,
    ThinResidueExtension,
    is_closed,
    thin_colors,
    thin_radical,
    thin_residue,
    thin_residue_extension,
)
from .wl import one_point_extension


def _support(cfg, u, v) -> frozenset:
    return frozenset(np.flatnonzero(cfg.tensor.slice(u, v)).tolist())


def _product(cfg, u, v) -> dict:
    row = cfg.tensor.slice(u, v)
    return {int(w): int(row[w]) for w in np.flatnonzero(row)}


def is_quasi_thin(cfg: ColorMatrixConfiguration) -> bool:
    """Homogeneous with every valency in {1, 2}."""
    if not is_homogeneous(cfg):
        return False
    return bool(cfg.tensor.valency.max() <= 2)


def _require_quasi_thin(cfg):
    if not is_quasi_thin(cfg):
        raise ValueError("configuration is not a quasi-thin scheme")


def thick_colors(cfg: ColorMatrixConfiguration) -> list:
    return [u for u in range(cfg.rank) if cfg.tensor.valency[u] == 2]


@dataclass(frozen=True)
class OrthogonalProfile:
    orthogonal: dict  # thick u -> u^perp
    classes: dict  # orthogonal o -> S_o = {v thick : v^perp = o}
    orthogonals: frozenset  # S^perp

    def __len__(self):
        return len(self.orthogonals)


def orthogonal_profile(cfg: ColorMatrixConfiguration) -> OrthogonalProfile:
    _require_quasi_thin(cfg)
    one = identity_color(cfg)
    adj = cfg.tensor.adjoint
    orth = {}
    for u in thick_colors(cfg):
        rest = _support(cfg, u, int(adj[u])) - {one}
        assert len(rest) == 1, f"u u* of thick color {u} has support {sorted(rest)} besides 1"
        orth[u] = next(iter(rest))
    classes = {}
    for u, o in orth.items():
        classes.setdefault(o, set()).add(u)
    return OrthogonalProfile(orth, {o: frozenset(s) for o, s in classes.items()}, frozenset(classes))


@dataclass(frozen=True)
class Adjacency:
    adjacent: bool
    pattern: Optional[int]
    product: dict


def product_pattern(cfg: ColorMatrixConfiguration, prod: dict) -> Optional[int]:
    """Which product shape ``u* v`` has: 1, 2, 3 as in the trichotomy, else ``None``."""
    val = cfg.tensor.valency
    shape = sorted((m, int(val[w])) for w, m in prod.items())
    if shape in ([(2, 1), (2, 1)], [(2, 2)]):
        return 1
    if shape == [(1, 2), (2, 1)]:
        return 2
    if shape == [(1, 2), (1, 2)]:
        return 3
    return None


def adjacency(cfg: ColorMatrixConfiguration, u: int, v: int) -> Adjacency:
    """Classify the product ``u* v`` of two thick colors."""
    _require_quasi_thin(cfg)
    val = cfg.tensor.valency
    if val[u] != 2 or val[v] != 2:
        raise ValueError("adjacency is defined for thick colors only")
    prod = _product(cfg, int(cfg.tensor.adjoint[u]), v)
    pattern = product_pattern(cfg, prod)
    return Adjacency(u != v and len(prod) == 2, pattern, prod)


def expected_pattern(cfg: ColorMatrixConfiguration, prof: OrthogonalProfile, u: int, v: int) -> int:
    """The pattern predicted by comparing orthogonals."""
    if prof.orthogonal[u] != prof.orthogonal[v]:
        return 3
    return 1 if cfg.tensor.valency[prof.orthogonal[u]] == 1 else 2


def is_adjacent(cfg: ColorMatrixConfiguration, u: int, v: int) -> bool:
    return u != v and len(_support(cfg, int(cfg.tensor.adjoint[u]), v)) == 2


def triangles(cfg: ColorMatrixConfiguration) -> list:
    """All 3-sets of pairwise adjacent thick colors, as sorted tuples."""
    _require_quasi_thin(cfg)
    thick = thick_colors(cfg)
    adj = {(u, v) for u in thick for v in thick if is_adjacent(cfg, u, v)}
    return [t for t in combinations(thick, 3) if all((x, y) in adj for x, y in combinations(t, 2))]


def is_exceptional(cfg: ColorMatrixConfiguration, tri: Sequence[int], prof: Optional[OrthogonalProfile] = None) -> bool:
    """``u^perp v^perp w^perp = 1``; cross-checked against the Klein subgroup criterion."""
    prof = prof or orthogonal_profile(cfg)
    u, v, w = (prof.orthogonal[x] for x in tri)
    one = identity_color(cfg)
    product_is_one = False
    if all(cfg.tensor.valency[x] == 1 for x in (u, v, w)):
        (uv,) = _support(cfg, u, v)
        product_is_one = _support(cfg, uv, w) == {one}
    assert product_is_one == orthogonals_form_klein_group(cfg, tri, prof), "exceptional criteria disagree"
    return product_is_one


def orthogonals_form_klein_group(cfg, tri, prof: Optional[OrthogonalProfile] = None) -> bool:
    """Whether ``{1} ∪ T^perp`` is a Klein subgroup of the thin radical."""
    prof = prof or orthogonal_profile(cfg)
    one = identity_color(cfg)
    group = {one} | {prof.orthogonal[x] for x in tri}
    thin = thin_colors(cfg)
    if len(group) != 4 or not group <= thin:
        return False
    if not is_closed(cfg, group):
        return False
    return all(_support(cfg, x, x) == {one} for x in group)


def regular_witness(cfg: ColorMatrixConfiguration, u: int, v: int, w: int) -> Optional[tuple]:
    """Some ``a in u*w``, ``b in w*v`` with ``|ab ∩ u*v| = 1``, if any."""
    adj = cfg.tensor.adjoint
    target = _support(cfg, int(adj[u]), v)
    for a in sorted(_support(cfg, int(adj[u]), w)):
        for b in sorted(_support(cfg, int(adj[w]), v)):
            if len(_support(cfg, a, b) & target) == 1:
                return a, b
    return None


@dataclass(frozen=True)
class KleinianVerdict:
    kleinian: bool
    residue: ClosedSet
    index: Optional[int]


def is_kleinian(cfg: ColorMatrixConfiguration) -> KleinianVerdict:
    """Direct residue test, cross-checked with the orthogonal criterion."""
    _require_quasi_thin(cfg)
    one = identity_color(cfg)
    residue = thin_residue(cfg)
    thin = thin_colors(cfg)
    direct = (
        residue.colors <= thin
        and len(residue) == 4
        and all(_support(cfg, x, x) == {one} for x in residue.colors)
    )
    perp = orthogonal_profile(cfg).orthogonals
    criterion = perp <= thin and (
        len(perp) == 2 or (len(perp) == 3 and is_closed(cfg, perp | {one}))
    )
    assert direct == criterion, "Kleinian criteria disagree"
    return KleinianVerdict(direct, residue, cfg.degree // len(thin))


def point_involution(cfg: ColorMatrixConfiguration, alpha: int) -> tuple:
    """``f_alpha``: fix ``beta`` if ``r(alpha, beta)`` is thin, else swap within ``alpha r(alpha, beta)``."""
    _require_quasi_thin(cfg)
    row = cfg.matrix[alpha]
    f = list(range(cfg.degree))
    for beta in range(cfg.degree):
        mates = np.flatnonzero(row == row[beta])
        if len(mates) == 2:
            f[beta] = int(mates[0] if mates[1] == beta else mates[1])
    return tuple(f)


# --------------------------------------------------------------------------
# Klein analysis
# --------------------------------------------------------------------------

SUBGROUP_NAMES = ("1", "H1", "H2", "H3", "G")

# subgroups of the abstract Klein group {0, 1, 2, 3} with XOR product
_SUBGROUPS = (frozenset({0}), frozenset({0, 1}), frozenset({0, 2}), frozenset({0, 3}), frozenset({0, 1, 2, 3}))


def subgroup_id(elements) -> int:
    return _SUBGROUPS.index(frozenset(elements))


@dataclass(frozen=True)
class IncidenceStructure:
    points: tuple
    lines: tuple  # sorted tuples of points

    def lines_through(self, p) -> list:
        return [ln for ln in self.lines if p in ln]

    def is_partial_linear_space(self) -> bool:
        if any(len(ln) < 2 for ln in self.lines):
            return False
        return all(
            sum(1 for ln in self.lines if p in ln and q in ln) <= 1 for p, q in combinations(self.points, 2)
        )

    def is_linear_space(self) -> bool:
        return all(
            sum(1 for ln in self.lines if p in ln and q in ln) == 1 for p, q in combinations(self.points, 2)
        )


def classify_geometry(geo: IncidenceStructure) -> str:
    sizes = sorted(len(ln) for ln in geo.lines)
    k = len(geo.points)
    if len(geo.lines) == 1:
        return "single-line"
    if not geo.is_linear_space():
        return "other"
    if k == 3 and sizes == [2, 2, 2]:
        return "near-pencil-3"
    if k == 4 and sizes == [2] * 6:
        return "affine-plane-2"
    if k == 7 and sizes == [3] * 7:
        return "projective-plane-2"
    return "other"


@dataclass(frozen=True)
class KleinAnalysis:
    fibers: tuple  # fibers of the extension, ordered by least point
    base_points: tuple
    actions: tuple  # actions[i][g] = permutation of the fiber induced by g_i (dict point -> point)
    R: np.ndarray  # subgroup ids
    L: np.ndarray
    kinds: np.ndarray  # "K1" / "K2" / "K3" on off-diagonal cells, "" on the diagonal
    classes: tuple  # classes of ~
    transversal: tuple
    geometry: IncidenceStructure
    verdict: str
    embedding: str = field(default="residue")


def _component_group(ext: ColorMatrixConfiguration, fiber: list) -> list:
    """Check the component on ``fiber`` is a regular Klein scheme; return its colors."""
    sub = ext.matrix[np.ix_(fiber, fiber)]
    colors = np.unique(sub)
    if len(fiber) != 4 or len(colors) != 4:
        raise ValueError(f"component on {fiber} is not a regular scheme of degree 4")
    for c in colors:
        cells = sub == c
        if not (np.array_equal(cells.sum(axis=1), np.ones(4)) and np.array_equal(cells, cells.T)):
            raise ValueError(f"component on {fiber} is not a regular Klein scheme")
    return colors.tolist()


def _embeddings(x0: ThinResidueExtension, fibers, base_points, embedding: str) -> list:
    """For each fiber a list ``g -> {point: image}`` over the abstract Klein group."""
    ext = x0.extension
    out = []
    if embedding == "residue":
        one = identity_color(x0.base)
        residue = [one] + sorted(x0.residue.colors - {one})
        if len(residue) != 4:
            raise ValueError("thin residue is not of order 4")
    for fiber, beta in zip(fibers, base_points):
        _component_group(ext, fiber)
        acts = []
        if embedding == "residue":
            base = x0.base.matrix
            for g in residue:
                acts.append({x: int(next(y for y in fiber if base[x, y] == g)) for x in fiber})
        elif embedding == "base-row":
            others = sorted(y for y in fiber if y != beta)
            colors = [ext.matrix[beta, beta]] + [ext.matrix[beta, y] for y in others]
            for c in colors:
                acts.append({x: int(next(y for y in fiber if ext.matrix[x, y] == c)) for x in fiber})
        else:
            raise ValueError(f"unknown embedding {embedding!r}")
        # the abstract group is XOR on {0, 1, 2, 3}; check the map is a homomorphism
        for g in range(4):
            for h in range(4):
                composed = {x: acts[h][acts[g][x]] for x in fiber}
                if composed != acts[g ^ h]:
                    raise ValueError("fiber embedding is not a Klein group isomorphism")
        out.append(acts)
    return out


def _stabilizers(ext, fi, fj, acts_i, acts_j):
    sub = ext.matrix[np.ix_(fi, fj)]
    lefts, rights = set(), set()
    for s in np.unique(sub):
        cells = {(fi[a], fj[b]) for a, b in zip(*np.nonzero(sub == s))}
        left = frozenset(g for g in range(4) if {(acts_i[g][x], y) for x, y in cells} == cells)
        right = frozenset(g for g in range(4) if {(x, acts_j[g][y]) for x, y in cells} == cells)
        lefts.add(left)
        rights.add(right)
    assert len(lefts) == 1 and len(rights) == 1, "stabilizer depends on the chosen relation"
    return subgroup_id(lefts.pop()), subgroup_id(rights.pop())


def klein_analysis(
    x0: ThinResidueExtension, base_points: Optional[Sequence[int]] = None, embedding: str = "residue"
) -> KleinAnalysis:
    """R/L matrices, the relation ~, a transversal and the reduced geometry."""
    ext = x0.extension
    fibers = tuple(sorted((sorted(f) for f in ext.fibers), key=lambda f: f[0]))
    if base_points is None:
        base_points = tuple(f[0] for f in fibers)
    base_points = tuple(int(b) for b in base_points)
    if any(b not in f for b, f in zip(base_points, fibers)) or len(base_points) != len(fibers):
        raise ValueError("need exactly one base point in every fiber")
    acts = _embeddings(x0, fibers, base_points, embedding)
    k = len(fibers)
    R = np.zeros((k, k), dtype=np.int64)
    L = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            L[i, j], R[i, j] = _stabilizers(ext, fibers[i], fibers[j], acts[i], acts[j])
    sizes = np.array([len(s) for s in _SUBGROUPS])[R]
    kinds = np.where(sizes == 4, "K1", np.where(sizes == 1, "K2", "K3"))
    np.fill_diagonal(kinds, "")
    classes = []
    seen = set()
    for i in range(k):
        if i not in seen:
            cls = tuple(j for j in range(k) if R[i, j] == 0)
            classes.append(cls)
            seen.update(cls)
    transversal = tuple(c[0] for c in classes)
    lines = set()
    for i in transversal:
        for j in transversal:
            if j != i:
                h = R[j, i]
                lines.add(tuple(sorted({i} | {m for m in transversal if m != i and R[m, i] == h})))
    geo = IncidenceStructure(transversal, tuple(sorted(lines)))
    return KleinAnalysis(
        fibers, base_points, tuple(acts), R, L, kinds, tuple(classes), transversal, geo, classify_geometry(geo), embedding
    )


def klein_analysis_of(cfg: ColorMatrixConfiguration, **kwargs) -> KleinAnalysis:
    return klein_analysis(thin_residue_extension(cfg), **kwargs)


def r_matrix_violations(ka: KleinAnalysis) -> list:
    """Check ``R_ij = L_ji``, the propagation rules and that ~ is an equivalence."""
    R, L = ka.R, ka.L
    k = len(R)
    size = np.array([len(s) for s in _SUBGROUPS])
    out = []
    if not np.array_equal(R, L.T):
        out.append("R is not the transpose of L")
    for i in range(k):
        for j in range(k):
            for m in range(k):
                if R[j, i] == R[m, i] and size[R[j, m]] == 2 and size[R[j, i]] == 2:
                    if not (R[i, j] == R[m, j] and R[i, m] == R[j, m]):
                        out.append(f"propagation fails on ({i}, {j}, {m})")
                if R[j, m] == 0 and R[j, i] != R[m, i]:
                    out.append(f"~-classes disagree on ({i}, {j}, {m})")
    sim = R == 0
    if not (sim.diagonal().all() and np.array_equal(sim, sim.T)):
        out.append("~ is not reflexive and symmetric")
    if not np.array_equal(sim, (sim.astype(int) @ sim.astype(int)) > 0):
        out.append("~ is not transitive")
    return out


def reconstruct_from_R(ka: KleinAnalysis, degree: int) -> np.ndarray:
    """Rebuild the extension's partition from fibers, embeddings and R alone."""
    mat = np.full((degree, degree), -1, dtype=np.int64)
    label = 0
    for i, fi in enumerate(ka.fibers):
        for j, fj in enumerate(ka.fibers):
            sz = len(_SUBGROUPS[ka.R[i, j]])
            if sz == 4:
                mat[np.ix_(fi, fj)] = label
                label += 1
            elif sz == 1:
                bi, bj = ka.base_points[i], ka.base_points[j]
                for y in fj:
                    for g in range(4):
                        mat[ka.actions[i][g][bi], ka.actions[j][g][y]] = label
                    label += 1
            else:
                lgroup, rgroup = _SUBGROUPS[ka.L[i, j]], _SUBGROUPS[ka.R[i, j]]
                ai, aj = ka.actions[i], ka.actions[j]
                oi = sorted({frozenset(ai[g][x] for g in lgroup) for x in fi}, key=min)
                oj = sorted({frozenset(aj[g][y] for g in rgroup) for y in fj}, key=min)
                for (p, q) in ((0, 0), (1, 1)):
                    mat[np.ix_(sorted(oi[p]), sorted(oj[q]))] = label
                label += 1
                for (p, q) in ((0, 1), (1, 0)):
                    mat[np.ix_(sorted(oi[p]), sorted(oj[q]))] = label
                label += 1
    return mat


# --------------------------------------------------------------------------
# executable checks of structural statements
# --------------------------------------------------------------------------


def extension_fiber_violations(cfg: ColorMatrixConfiguration, alpha: int, ext=None) -> list:
    """Fibers of ``X_alpha`` are exactly the neighbourhoods ``alpha u``."""
    ext = ext if ext is not None else one_point_extension(cfg, alpha)
    got = sorted(tuple(f) for f in ext.fibers)
    row = cfg.matrix[alpha]
    want = sorted(tuple(np.flatnonzero(row == u).tolist()) for u in range(cfg.rank))
    return [] if got == want else [f"fibers of X_{alpha} are not the sets alpha u"]


def subset_adjacency_violations(cfg: ColorMatrixConfiguration, max_size: int = 4) -> list:
    """For ``T ⊊ S_2`` with ``|T^perp| <= 2`` and ``|T_u| <= 2`` (``u`` thick) some
    ``t ∉ T`` is adjacent to all of ``T``.  Subsets are enumerated up to ``max_size``."""
    prof = orthogonal_profile(cfg)
    thick = thick_colors(cfg)
    val = cfg.tensor.valency
    adj = {(u, v) for u in thick for v in thick if is_adjacent(cfg, u, v)}
    out = []
    for size in range(1, min(max_size, len(thick) - 1) + 1):
        for T in combinations(thick, size):
            perps = {prof.orthogonal[x] for x in T}
            if len(perps) > 2:
                continue
            if any(val[o] == 2 and sum(1 for x in T if prof.orthogonal[x] == o) > 2 for o in perps):
                continue
            if not any(all((t, x) in adj for x in T) for t in thick if t not in T):
                out.append(f"no common neighbour for {T}")
    return out


def triangle_product_violations(cfg: ColorMatrixConfiguration, alpha: int, ext=None) -> list:
    """In ``X_alpha``: ``x.y = x̄.ȳ`` and ``x̄.y = x.ȳ = (x.y)‾`` along every triangle."""
    from .algiso import _PointExtension

    px = _PointExtension(cfg, alpha)
    out = []

    def bar(a):
        others = [b for b in px.colors_in[px.block_of[a]] if b != a]
        return others[0] if len(others) == 1 else None

    for tri in triangles(cfg):
        for u, w, v in permutations(tri):
            for x in px.colors_in[(u, w)]:
                for y in px.colors_in[(w, v)]:
                    xb, yb = bar(x), bar(y)
                    if xb is None or yb is None:
                        continue
                    xy = px.compose(x, y)
                    if xy is None or px.compose(xb, yb) != xy:
                        out.append(f"x.y != x̄.ȳ for {(u, w, v)}")
                    xyb = bar(xy) if xy is not None else None
                    if not (px.compose(xb, y) == px.compose(x, yb) == xyb):
                        out.append(f"x̄.y, x.ȳ, (x.y)‾ differ for {(u, w, v)}")
    return out
