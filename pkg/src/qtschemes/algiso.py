"""Algebraic isomorphisms: search, realization, and one-point extension.

An algebraic isomorphism is a bijection of colors preserving every
intersection number.  The search is a backtracking over colors; realization
delegates to the label-preserving map search in :mod:`qtschemes.perm`.

The one-point extension works on the one-point extensions ``X_alpha`` and
``X'_alpha'``.  Their colors live inside blocks ``alpha u x alpha v`` whose
sides have at most two points in a quasi-thin scheme, so all products of
extension colors are computed on tiny 0/1 blocks.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .config import ColorMatrixConfiguration, from_color_matrix, is_homogeneous
from .perm import _mark, _union, find_label_preserving_map
from .wl import one_point_extension, stable_coloring


@dataclass(frozen=True, eq=False)
class ColorBijection:
    """A color map ``mapping[u] = u'`` from ``source`` to ``target``."""

    source: ColorMatrixConfiguration = field(repr=False)
    target: ColorMatrixConfiguration = field(repr=False)
    mapping: tuple
    verified: bool = False

    def __call__(self, u: int) -> int:
        return self.mapping[u]

    def inverse_mapping(self) -> tuple:
        inv = [0] * len(self.mapping)
        for u, v in enumerate(self.mapping):
            inv[v] = u
        return tuple(inv)

    def is_identity(self) -> bool:
        return all(u == v for u, v in enumerate(self.mapping))


def _dense(cfg: ColorMatrixConfiguration) -> np.ndarray:
    c = cfg.tensor.c
    if c is None:
        raise ValueError(f"rank {cfg.rank} is too large for a dense tensor search")
    return c


def is_algebraic_isomorphism(a: ColorMatrixConfiguration, b: ColorMatrixConfiguration, mapping) -> bool:
    if a.rank != b.rank or sorted(mapping) != list(range(a.rank)):
        return False
    m = np.asarray(mapping)
    return bool(np.array_equal(_dense(a), _dense(b)[np.ix_(m, m, m)]))


def _invariants(cfg: ColorMatrixConfiguration) -> list:
    t = cfg.tensor
    c = _dense(cfg)
    diag = set(cfg.diagonal_colors)
    out = []
    for u in range(cfg.rank):
        fi, fj = t.fiber_of[u]
        out.append(
            (
                int(t.valency[u]),
                int(t.valency[t.adjoint[u]]),
                u in diag,
                int(t.adjoint[u]) == u,
                int(cfg.class_sizes[u]),
                fi == fj,
                tuple(sorted(c[u].ravel().tolist())),
                tuple(sorted(c[:, u].ravel().tolist())),
                tuple(sorted(c[:, :, u].ravel().tolist())),
            )
        )
    return out


def iter_algebraic_isomorphisms(a: ColorMatrixConfiguration, b: ColorMatrixConfiguration) -> Iterator[ColorBijection]:
    """All algebraic isomorphisms ``a -> b``, in a deterministic order."""
    if a.rank != b.rank or a.degree != b.degree:
        return
    ca, cb = _dense(a), _dense(b)
    ia, ib = _invariants(a), _invariants(b)
    if sorted(ia) != sorted(ib):
        return
    r = a.rank
    candidates = [[v for v in range(r) if ib[v] == ia[u]] for u in range(r)]
    order = sorted(range(r), key=lambda u: (len(candidates[u]), u))
    adj_a, adj_b = a.tensor.adjoint, b.tensor.adjoint
    image = [-1] * r
    used = [False] * r

    def consistent(src, dst):
        s = np.asarray(src)
        d = np.asarray(dst)
        u, v = s[-1], d[-1]
        return (
            np.array_equal(ca[u][np.ix_(s, s)], cb[v][np.ix_(d, d)])
            and np.array_equal(ca[:, u][np.ix_(s, s)], cb[:, v][np.ix_(d, d)])
            and np.array_equal(ca[:, :, u][np.ix_(s, s)], cb[:, :, v][np.ix_(d, d)])
        )

    def search(k, src, dst):
        if k == r:
            yield ColorBijection(a, b, tuple(image), verified=True)
            return
        u = order[k]
        if image[u] >= 0:
            yield from search(k + 1, src, dst)
            return
        for v in candidates[u]:
            if used[v]:
                continue
            pairs = [(u, v)]
            au, av = int(adj_a[u]), int(adj_b[v])
            if au != u:
                if image[au] >= 0 or used[av] or av not in candidates[au]:
                    continue
                pairs.append((au, av))
            elif av != v:
                continue
            ok = True
            s2, d2 = list(src), list(dst)
            for x, y in pairs:
                s2.append(x)
                d2.append(y)
                if not consistent(s2, d2):
                    ok = False
                    break
            if not ok:
                continue
            for x, y in pairs:
                image[x], used[y] = y, True
            yield from search(k + 1, s2, d2)
            for x, y in pairs:
                image[x], used[y] = -1, False

    for phi in search(0, [], []):
        assert is_algebraic_isomorphism(a, b, phi.mapping), "search produced an invalid map"
        yield phi


def find_algebraic_isomorphisms(
    a: ColorMatrixConfiguration, b: ColorMatrixConfiguration, limit: Optional[int] = None
) -> list:
    out = []
    for phi in iter_algebraic_isomorphisms(a, b):
        out.append(phi)
        if limit is not None and len(out) >= limit:
            break
    return out


def induced_by(f: Sequence[int], a: ColorMatrixConfiguration, b: ColorMatrixConfiguration) -> ColorBijection:
    """The color map ``phi_f`` of a point bijection ``f`` carrying ``a`` onto ``b``."""
    fa = np.asarray(f)
    if a.degree != b.degree or sorted(fa.tolist()) != list(range(a.degree)):
        raise ValueError("f is not a bijection between the point sets")
    image = b.matrix[np.ix_(fa, fa)]
    pairs = np.unique(np.stack([a.matrix.ravel(), image.ravel()], axis=1), axis=0)
    if len(pairs) != a.rank or len(np.unique(pairs[:, 1])) != b.rank or a.rank != b.rank:
        raise ValueError("f does not map color classes onto color classes")
    mapping = [0] * a.rank
    for u, v in pairs:
        mapping[int(u)] = int(v)
    return ColorBijection(a, b, tuple(mapping), verified=is_algebraic_isomorphism(a, b, mapping))


def realize(phi: ColorBijection, cap: Optional[int] = None) -> Optional[tuple]:
    """A point bijection inducing ``phi``, or ``None`` if there is none."""
    from .perm import _check_cap

    _check_cap(phi.source.degree, cap)
    from .perm import automorphism_generators

    inv = np.asarray(phi.inverse_mapping())
    gens = automorphism_generators(phi.target.matrix)
    return find_label_preserving_map(phi.source.matrix, inv[phi.target.matrix], right_gens=gens)


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Separability relative to a supplied universe of partner schemes."""

    refuted_by: Optional[tuple]
    all_realized: bool
    partners: tuple
    checked: int
    relative: bool = True


def separability_verdict(a: ColorMatrixConfiguration, partners: Sequence[ColorMatrixConfiguration]) -> SeparabilityVerdict:
    checked = 0
    names = tuple(p.name or f"partner-{i}" for i, p in enumerate(partners))
    for i, p in enumerate(partners):
        for phi in iter_algebraic_isomorphisms(a, p):
            checked += 1
            if realize(phi) is None:
                return SeparabilityVerdict((names[i], phi.mapping), False, names, checked)
    return SeparabilityVerdict(None, True, names, checked)


# --------------------------------------------------------------------------
# one-point extension of an algebraic isomorphism
# --------------------------------------------------------------------------


class _PointExtension:
    """``X_alpha`` organised by the blocks ``alpha u x alpha v``."""

    def __init__(self, cfg: ColorMatrixConfiguration, alpha: int):
        self.base = cfg
        self.alpha = alpha
        self.ext = one_point_extension(cfg, alpha)
        m = self.ext.matrix
        self.row = cfg.matrix[alpha]  # r(alpha, x)
        self.nbhd = {u: np.flatnonzero(self.row == u).tolist() for u in range(cfg.rank)}
        self.block_of = {}
        self.colors_in = defaultdict(list)
        self.base_color = {}
        for a in range(self.ext.rank):
            x, y = np.argwhere(m == a)[0]
            key = (int(self.row[x]), int(self.row[y]))
            self.block_of[a] = key
            self.colors_in[key].append(a)
            self.base_color[a] = int(cfg.matrix[x, y])
        for key in self.colors_in:
            self.colors_in[key].sort()

    def cells(self, a: int) -> np.ndarray:
        """0/1 matrix of ``a`` on its block."""
        u, v = self.block_of[a]
        sub = self.ext.matrix[np.ix_(self.nbhd[u], self.nbhd[v])]
        return (sub == a).astype(np.int64)

    def compose(self, b: int, c: int) -> Optional[int]:
        """``b . c`` when it is a single color, else ``None``."""
        (u, v), (v2, w) = self.block_of[b], self.block_of[c]
        if v != v2:
            return None
        prod = self.cells(b) @ self.cells(c)
        sub = self.ext.matrix[np.ix_(self.nbhd[u], self.nbhd[w])]
        colors = np.unique(sub[prod > 0])
        return int(colors[0]) if len(colors) == 1 else None

    def color_with_base(self, u: int, v: int, w: int) -> list:
        return [a for a in self.colors_in[(u, v)] if self.base_color[a] == w]


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    """An algebraic isomorphism ``X_alpha -> X'_alpha'`` extending ``phi``."""

    phi: ColorBijection = field(repr=False)
    alpha: int
    alpha_prime: int
    extended: ColorBijection = field(repr=False)
    method: str
    trace: dict = field(repr=False)
    w_independent: bool = True


def _extension_hypotheses(cfg: ColorMatrixConfiguration) -> Optional[str]:
    from .quasithin import is_kleinian, is_quasi_thin, orthogonal_profile

    if not is_homogeneous(cfg) or not is_quasi_thin(cfg):
        return "source is not a quasi-thin scheme"
    if cfg.degree < 9:
        return "source degree is below 9"
    if len(orthogonal_profile(cfg).orthogonals) < 2:
        return "source has fewer than two orthogonals"
    if is_kleinian(cfg).kleinian:
        return "source is Kleinian"
    return None


def verify_extension(px: _PointExtension, py: _PointExtension, phi: ColorBijection, mapping: dict) -> Optional[str]:
    """Check that ``mapping`` is an ``(alpha, alpha')``-extension of ``phi``.

    Returns ``None`` on success, otherwise a description of the first failure.
    """
    if sorted(mapping) != list(range(px.ext.rank)) or sorted(mapping.values()) != list(range(py.ext.rank)):
        return "not a bijection of extension colors"
    one = px.ext.matrix[px.alpha, px.alpha]
    if mapping[int(one)] != int(py.ext.matrix[py.alpha, py.alpha]):
        return "the individualized point is not preserved"
    for a, a2 in mapping.items():
        if py.base_color[a2] != phi(px.base_color[a]):
            return f"color {a} is not mapped inside the image of its parent color"
        u, v = px.block_of[a]
        if py.block_of[a2] != (phi(u), phi(v)):
            return f"color {a} is mapped outside the image block"
    # intersection numbers, block by block
    by_source = defaultdict(list)
    for a, (u, v) in px.block_of.items():
        by_source[u].append(a)
    for b, (u, v) in px.block_of.items():
        pb, qb = px.cells(b), py.cells(mapping[b])
        for c in by_source[v]:
            w = px.block_of[c][1]
            prod = pb @ px.cells(c)
            prod2 = qb @ py.cells(mapping[c])
            sub = px.ext.matrix[np.ix_(px.nbhd[u], px.nbhd[w])]
            sub2 = py.ext.matrix[np.ix_(py.nbhd[phi(u)], py.nbhd[phi(w)])]
            for d in px.colors_in[(u, w)]:
                i, j = np.argwhere(sub == d)[0]
                i2, j2 = np.argwhere(sub2 == mapping[d])[0]
                if prod[i, j] != prod2[i2, j2]:
                    return f"intersection number differs for ({b}, {c}, {d})"
            bc = px.compose(b, c)
            if bc is not None and py.compose(mapping[b], mapping[c]) != mapping[bc]:
                return f"product ({b}, {c}) is not preserved"
    return None


def _construct(px: _PointExtension, py: _PointExtension, phi: ColorBijection):
    from .quasithin import orthogonal_profile

    cfg = px.base
    prof = orthogonal_profile(cfg)
    thick = sorted(prof.orthogonal)
    mapping, trace = {}, {}
    deferred = []
    for (u, v), colors in sorted(px.colors_in.items()):
        parents = sorted({px.base_color[a] for a in colors})
        if len(parents) == len(colors):
            for a in colors:
                img = py.color_with_base(phi(u), phi(v), phi(px.base_color[a]))
                if len(img) != 1:
                    return None, None, f"no unique image for color {a} in the adjacent case"
                mapping[a] = img[0]
            trace[(u, v)] = "adjacent"
        else:
            deferred.append((u, v))
    independent = True
    for u, v in deferred:
        admissible = [w for w in thick if prof.orthogonal[w] != prof.orthogonal.get(u)]
        if not admissible:
            return None, None, f"no admissible middle relation for ({u}, {v})"
        results = []
        for w in admissible:
            for b in px.colors_in[(u, w)]:
                res = {}
                for a in px.colors_in[(u, v)]:
                    cs = [c for c in px.colors_in[(w, v)] if px.compose(b, c) == a]
                    if len(cs) != 1 or b not in mapping or cs[0] not in mapping:
                        return None, None, f"composition rule undefined for ({u}, {v}) via {w}"
                    img = py.compose(mapping[b], mapping[cs[0]])
                    if img is None:
                        return None, None, f"image product is not a single color for ({u}, {v})"
                    res[a] = img
                results.append(res)
        first = results[0]
        if any(r != first for r in results[1:]):
            independent = False
        mapping.update(first)
        trace[(u, v)] = "composed"
    return mapping, trace, independent


def _fallback(px: _PointExtension, py: _PointExtension, phi: ColorBijection) -> Optional[dict]:
    n = px.base.degree
    inv = np.asarray(phi.inverse_mapping())
    col = stable_coloring(_mark(_union(px.base.matrix, inv[py.base.matrix]), [px.alpha, n + py.alpha]))
    left, right = col[:n, :n], col[n:, n:]
    if not (from_color_matrix(left).same_partition(px.ext) and from_color_matrix(right).same_partition(py.ext)):
        return None
    mapping = {}
    for a in range(px.ext.rank):
        x, y = np.argwhere(px.ext.matrix == a)[0]
        hits = np.argwhere(right == left[x, y])
        if len(hits) == 0:
            return None
        mapping[a] = int(py.ext.matrix[hits[0][0], hits[0][1]])
    return mapping


@dataclass(frozen=True)
class ExtensionFailure:
    reason: str

    def __bool__(self):
        return False


def try_extend(phi: ColorBijection, alpha: int, alpha_prime: int, allow_fallback: bool = True):
    """Like :func:`extend_algebraic_isomorphism` but returns an :class:`ExtensionFailure` with a reason."""
    a, b = phi.source, phi.target
    px, py = _PointExtension(a, alpha), _PointExtension(b, alpha_prime)
    if px.ext.rank != py.ext.rank:
        return ExtensionFailure("one-point extensions have different ranks")
    reason = _extension_hypotheses(a)
    if reason is None:
        mapping, trace, info = _construct(px, py, phi)
        if mapping is None:
            return ExtensionFailure(info)
        problem = verify_extension(px, py, phi, mapping)
        if problem is not None:
            return ExtensionFailure(f"construction failed verification: {problem}")
        ext = ColorBijection(px.ext, py.ext, tuple(mapping[i] for i in range(px.ext.rank)), verified=True)
        return ExtensionResult(phi, alpha, alpha_prime, ext, "construction", trace, bool(info))
    if not allow_fallback:
        return ExtensionFailure(f"hypotheses unmet: {reason}")
    mapping = _fallback(px, py, phi)
    if mapping is None or len(set(mapping.values())) != px.ext.rank:
        return ExtensionFailure(f"hypotheses unmet ({reason}) and refinement fallback failed")
    problem = verify_extension(px, py, phi, mapping)
    if problem is not None:
        return ExtensionFailure(f"hypotheses unmet ({reason}) and fallback failed verification: {problem}")
    ext = ColorBijection(px.ext, py.ext, tuple(mapping[i] for i in range(px.ext.rank)), verified=True)
    return ExtensionResult(phi, alpha, alpha_prime, ext, "fallback", {"reason": reason})


def extend_algebraic_isomorphism(
    phi: ColorBijection, alpha: int, alpha_prime: int, allow_fallback: bool = True
) -> Optional[ExtensionResult]:
    """The verified ``(alpha, alpha')``-extension of ``phi``, or ``None``.

    When the scheme is quasi-thin with at least two orthogonals and the
    points' fibers line up, the extension is built constructively;
    otherwise a joint refinement of both schemes with ``alpha`` and
    ``alpha'`` matched is tried and the result is marked ``"fallback"``.
    """
    res = try_extend(phi, alpha, alpha_prime, allow_fallback)
    return res if isinstance(res, ExtensionResult) else None


def realize_extension(result: ExtensionResult) -> Optional[tuple]:
    """A point bijection inducing the extended map; it sends alpha to alpha'."""
    f = realize(result.extended)
    if f is not None:
        assert f[result.alpha] == result.alpha_prime
    return f
