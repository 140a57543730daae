"""Closed sets and the configurations derived from them.

Everything here works on the color level through the intersection tensor,
except the constructions that need point sets (classes ``alpha T``,
restrictions, extensions), which read the color matrix directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .config import (
    ColorMatrixConfiguration,
    from_color_matrix,
    identity_color,
    is_homogeneous,
    verify_coherence,
)


def _require_scheme(cfg: ColorMatrixConfiguration):
    if not is_homogeneous(cfg):
        raise ValueError("operation requires a homogeneous configuration (a scheme)")


def _support(cfg, u: int, v: int) -> frozenset:
    return frozenset(np.flatnonzero(cfg.tensor.slice(u, v)).tolist())


@dataclass(frozen=True)
class ClosedSet:
    colors: frozenset

    def __contains__(self, color) -> bool:
        return color in self.colors

    def __len__(self) -> int:
        return len(self.colors)

    def __iter__(self):
        return iter(sorted(self.colors))


def is_closed(cfg: ColorMatrixConfiguration, colors: Iterable[int]) -> bool:
    """``T T* ⊆ T`` (which forces the identity color into any non-empty T)."""
    _require_scheme(cfg)
    colors = set(colors)
    adj = cfg.tensor.adjoint
    return all(_support(cfg, u, int(adj[v])) <= colors for u in colors for v in colors)


def closed_set_generated(cfg: ColorMatrixConfiguration, seed: Iterable[int] = ()) -> ClosedSet:
    """Smallest closed set containing ``seed`` and the identity color."""
    _require_scheme(cfg)
    adj = cfg.tensor.adjoint
    colors = {identity_color(cfg)} | {int(s) for s in seed}
    colors |= {int(adj[s]) for s in colors}
    frontier = set(colors)
    while frontier:
        new = set()
        for u in frontier:
            for v in list(colors):
                new |= _support(cfg, u, v) | _support(cfg, v, u)
        new -= colors
        colors |= new
        frontier = new
    return ClosedSet(frozenset(colors))


@dataclass(frozen=True)
class ThinRadical:
    """The thin colors with their group table ``table[(u, v)] = uv``."""

    colors: frozenset
    table: dict = field(repr=False)
    identity: int = 0

    def inverse(self, u: int) -> int:
        return next(v for v in self.colors if self.table[(u, v)] == self.identity)

    def __len__(self) -> int:
        return len(self.colors)


def thin_colors(cfg: ColorMatrixConfiguration) -> frozenset:
    t = cfg.tensor
    return frozenset(u for u in range(cfg.rank) if t.is_thin(u))


def thin_radical(cfg: ColorMatrixConfiguration) -> ThinRadical:
    _require_scheme(cfg)
    thin = thin_colors(cfg)
    table = {}
    for u in thin:
        for v in thin:
            (w,) = _support(cfg, u, v)
            table[(u, v)] = w
    return ThinRadical(thin, table, identity_color(cfg))


def thin_residue(cfg: ColorMatrixConfiguration) -> ClosedSet:
    _require_scheme(cfg)
    adj = cfg.tensor.adjoint
    seed = set()
    for u in range(cfg.rank):
        seed |= _support(cfg, u, int(adj[u]))
    return closed_set_generated(cfg, seed)


def classes_of(cfg: ColorMatrixConfiguration, closed: ClosedSet) -> list:
    """The partition ``{alpha T}`` as sorted point lists, ordered by least point."""
    member = np.isin(cfg.matrix, sorted(closed.colors))
    seen = np.zeros(cfg.degree, dtype=bool)
    out = []
    for a in range(cfg.degree):
        if not seen[a]:
            cls = np.flatnonzero(member[a])
            seen[cls] = True
            out.append(cls.tolist())
    return out


@dataclass(frozen=True)
class Quotient:
    """A quotient scheme with back-references to the originating colors.

    ``origins[c]`` is the set of colors of the parent whose block relation is
    the quotient color ``c``; several parent colors may share one block
    relation.
    """

    config: ColorMatrixConfiguration
    classes: list
    origins: dict


def quotient(cfg: ColorMatrixConfiguration, closed: ClosedSet) -> Quotient:
    if not is_closed(cfg, closed.colors):
        raise ValueError("quotient requires a closed set of colors")
    classes = classes_of(cfg, closed)
    k = len(classes)
    hits = [[frozenset(np.unique(cfg.matrix[np.ix_(d, g)]).tolist()) for g in classes] for d in classes]
    labels = {}
    mat = np.empty((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            mat[i, j] = labels.setdefault(hits[i][j], len(labels))
    q = from_color_matrix(mat)
    origins = {}
    for key, lab in labels.items():
        origins[int(q.matrix.ravel()[np.flatnonzero(mat.ravel() == lab)[0]])] = key
    report = verify_coherence(q)
    assert report.ok, f"quotient is not coherent: {report}"
    return Quotient(q, classes, origins)


def restriction(cfg: ColorMatrixConfiguration, delta: Iterable[int]) -> ColorMatrixConfiguration:
    """Restriction to a union of fibers, or (for schemes) to a class ``alpha T``."""
    delta = sorted(set(int(x) for x in delta))
    if not delta or delta[0] < 0 or delta[-1] >= cfg.degree:
        raise ValueError("restriction set must be a non-empty set of points")
    dset = set(delta)
    is_fiber_union = all(set(f) <= dset or not (set(f) & dset) for f in cfg.fibers)
    if not is_fiber_union:
        colors = set(np.unique(cfg.matrix[np.ix_(delta, delta)]).tolist())
        ok = is_homogeneous(cfg) and is_closed(cfg, colors)
        if ok:
            ok = set(np.flatnonzero(np.isin(cfg.matrix[delta[0]], sorted(colors))).tolist()) == dset
        if not ok:
            raise ValueError("restriction set is neither a union of fibers nor a class of a closed set")
    sub = from_color_matrix(cfg.matrix[np.ix_(delta, delta)], name=cfg.name)
    report = verify_coherence(sub)
    assert report.ok, f"restriction is not coherent: {report}"
    return sub


@dataclass(frozen=True)
class ThinResidueExtension:
    base: ColorMatrixConfiguration
    residue: ClosedSet
    extension: ColorMatrixConfiguration
    classes: list


def thin_residue_extension(
    cfg: ColorMatrixConfiguration, closed: Optional[ClosedSet] = None
) -> ThinResidueExtension:
    """Split every color ``u`` into its block pieces ``u_{Delta, Gamma}``."""
    _require_scheme(cfg)
    residue = thin_residue(cfg)
    closed = residue if closed is None else closed
    if not is_closed(cfg, closed.colors) or not residue.colors <= closed.colors:
        raise ValueError("the closed set must contain the thin residue")
    classes = classes_of(cfg, closed)
    block = np.empty(cfg.degree, dtype=np.int64)
    for i, cls in enumerate(classes):
        block[cls] = i
    k, r = len(classes), cfg.rank
    mat = (cfg.matrix * k + block[:, None]) * k + block[None, :]
    ext = from_color_matrix(mat, name=cfg.name)
    report = verify_coherence(ext)
    assert report.ok, f"thin residue extension is not coherent: {report}"
    return ThinResidueExtension(cfg, closed, ext, classes)


def _fiber_ids(cfg: ColorMatrixConfiguration) -> np.ndarray:
    ids = np.empty(cfg.degree, dtype=np.int64)
    for i, f in enumerate(cfg.fibers):
        ids[list(f)] = i
    return ids


def direct_sum(a: ColorMatrixConfiguration, b: ColorMatrixConfiguration) -> ColorMatrixConfiguration:
    na, nb = a.degree, b.degree
    fa, fb = _fiber_ids(a), _fiber_ids(b)
    ka, kb = len(a.fibers), len(b.fibers)
    mat = np.empty((na + nb, na + nb), dtype=np.int64)
    mat[:na, :na] = a.matrix
    mat[na:, na:] = b.matrix + a.rank
    offset = a.rank + b.rank
    mat[:na, na:] = offset + fa[:, None] * kb + fb[None, :]
    mat[na:, :na] = offset + ka * kb + fb[:, None] * ka + fa[None, :]
    return from_color_matrix(mat)


def tensor_product(a: ColorMatrixConfiguration, b: ColorMatrixConfiguration) -> ColorMatrixConfiguration:
    """Points ``(x, y)`` are indexed ``x * b.degree + y``."""
    mat = (a.matrix[:, None, :, None] * b.rank + b.matrix[None, :, None, :]).reshape(
        a.degree * b.degree, a.degree * b.degree
    )
    return from_color_matrix(mat)


def regular_points(cfg: ColorMatrixConfiguration) -> list:
    """Points ``alpha`` with ``|alpha u| <= 1`` for every color ``u``."""
    out = []
    for a in range(cfg.degree):
        counts = np.bincount(cfg.matrix[a], minlength=cfg.rank)
        if counts.max() <= 1:
            out.append(a)
    return out


def is_1_regular(cfg: ColorMatrixConfiguration) -> bool:
    return bool(regular_points(cfg))


def is_primitive(cfg: ColorMatrixConfiguration) -> bool:
    """Only ``{1}`` and ``S`` are closed.

    Every closed set other than ``{1}`` contains the closed set generated by
    one of its non-identity colors, so it suffices to check that each such
    color generates all of ``S``.
    """
    _require_scheme(cfg)
    one = identity_color(cfg)
    return all(
        len(closed_set_generated(cfg, [u])) == cfg.rank for u in range(cfg.rank) if u != one
    )
