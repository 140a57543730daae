"""Coherent configurations stored as color matrices.

A configuration on the points ``0..n-1`` is an ``n x n`` integer matrix whose
entry ``(a, b)`` is the index of the basic relation containing the pair
``(a, b)``.  Everything else in the package is built on top of
:class:`ColorMatrixConfiguration` and :class:`IntersectionTensor`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

DENSE_RANK_LIMIT = 256


class IncoherentError(ValueError):
    """Raised when an operation needs a coherent configuration."""


def canonical_relabel(matrix: np.ndarray) -> np.ndarray:
    """Renumber colors 0, 1, ... in order of first occurrence (row-major)."""
    flat = np.asarray(matrix).ravel()
    values, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(values), dtype=np.int64)
    rank[order] = np.arange(len(values))
    return rank[inverse].reshape(np.shape(matrix))


@dataclass(frozen=True, eq=False)
class ColorMatrixConfiguration:
    """A partition of ``range(n)**2`` given by a color matrix.

    Instances are immutable; the matrix is stored read-only with colors in
    canonical first-occurrence order.  Coherence is *not* implied by
    construction, see :func:`verify_coherence`.
    """

    matrix: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def degree(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(self.matrix.max()) + 1

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<ColorMatrixConfiguration{label} degree={self.degree} rank={self.rank}>"

    def same_partition(self, other: "ColorMatrixConfiguration") -> bool:
        # canonical labels make partition equality a plain matrix comparison
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    @cached_property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.matrix.ravel(), minlength=self.rank)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean array of shape ``(rank, n, n)``, one adjacency matrix per color."""
        return self.matrix[None, :, :] == np.arange(self.rank)[:, None, None]

    @cached_property
    def diagonal_colors(self) -> tuple:
        return tuple(sorted(set(self.matrix.diagonal().tolist())))

    @cached_property
    def fibers(self) -> list:
        """Point sets of the fibers, ordered by their diagonal color."""
        diag = self.matrix.diagonal()
        return [tuple(np.flatnonzero(diag == c).tolist()) for c in self.diagonal_colors]

    @cached_property
    def tensor(self) -> "IntersectionTensor":
        return intersection_tensor(self)

    def color_cells(self, color: int) -> np.ndarray:
        """Array of ``(a, b)`` pairs in the class of ``color``."""
        return np.argwhere(self.matrix == color)

    def relation(self, color: int) -> set:
        return {tuple(p) for p in self.color_cells(color).tolist()}


def from_color_matrix(matrix, n: Optional[int] = None, name: str = "") -> ColorMatrixConfiguration:
    """Build a configuration from any square matrix of nonnegative labels."""
    try:
        arr = np.array(matrix, dtype=np.int64)
    except ValueError as exc:  # ragged nested lists
        raise ValueError(f"ragged color matrix: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"color matrix must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("a configuration needs at least one point")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"declared degree {n} but matrix has {arr.shape[0]} rows")
    if (arr < 0).any():
        raise ValueError("color indices must be nonnegative")
    return ColorMatrixConfiguration(canonical_relabel(arr), name=name)


# --------------------------------------------------------------------------
# coherence
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceReport:
    ok: bool
    axiom: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def _product_blocks(adj: np.ndarray, u: int) -> np.ndarray:
    """Counts ``|a u ∩ c v*|`` for all v, as an array of shape ``(rank, n*n)``."""
    r, n, _ = adj.shape
    right = adj.transpose(1, 0, 2).reshape(n, r * n).astype(np.float64)
    prod = adj[u].astype(np.float64) @ right
    return np.rint(prod).astype(np.int64).reshape(n, r, n).transpose(1, 0, 2).reshape(r, n * n)


def _scan_products(cfg: ColorMatrixConfiguration):
    """Yield ``(u, mins, maxs)`` per color ``u`` where mins/maxs are per (v, w)."""
    labels = cfg.matrix.ravel()
    order = np.argsort(labels, kind="stable")
    starts = np.searchsorted(labels[order], np.arange(cfg.rank))
    adj = cfg.adjacency
    for u in range(cfg.rank):
        counts = _product_blocks(adj, u)[:, order]
        yield u, np.minimum.reduceat(counts, starts, axis=1), np.maximum.reduceat(counts, starts, axis=1)


def verify_coherence(cfg: ColorMatrixConfiguration) -> CoherenceReport:
    """Check the coherent configuration axioms and report the first failure."""
    m = cfg.matrix
    n, r = cfg.degree, cfg.rank
    used = cfg.class_sizes
    if (used == 0).any():
        return CoherenceReport(False, "empty basic relation", (int(np.flatnonzero(used == 0)[0]),))

    diag = set(m.diagonal().tolist())
    off = m[~np.eye(n, dtype=bool)]
    shared = diag.intersection(off.tolist())
    if shared:
        c = min(shared)
        cell = tuple(int(x) for x in np.argwhere((m == c) & ~np.eye(n, dtype=bool))[0])
        return CoherenceReport(False, "diagonal not a union of classes", (c, cell))

    for c in range(r):
        images = set(m.T[m == c].tolist())
        if len(images) != 1:
            return CoherenceReport(False, "not closed under transpose", (c, tuple(sorted(images))))

    for u, mins, maxs in _scan_products(cfg):
        bad = np.argwhere(mins != maxs)
        if len(bad):
            v, w = (int(x) for x in bad[0])
            cols = np.flatnonzero(m.ravel() == w)
            vals = _row_values(cfg, u, v, cols)
            lo, hi = cols[np.argmin(vals)], cols[np.argmax(vals)]
            return CoherenceReport(
                False,
                "intersection number not constant",
                (u, v, w, divmod(int(lo), n), divmod(int(hi), n)),
            )
    return CoherenceReport(True)


def _row_values(cfg, u, v, cols):
    n = cfg.degree
    a, c = np.divmod(cols, n)
    adj = cfg.adjacency
    return (adj[u][a] & adj[v][:, c].T).sum(axis=1)


def is_coherent(cfg: ColorMatrixConfiguration) -> bool:
    return verify_coherence(cfg).ok


# --------------------------------------------------------------------------
# intersection numbers
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IntersectionTensor:
    """Intersection numbers ``c[u, v, w]`` together with per-color metadata.

    ``c`` is dense for rank at most ``DENSE_RANK_LIMIT``; above that it is
    ``None`` and :meth:`slice` computes one ``(u, v)`` row on demand.
    """

    c: Optional[np.ndarray]
    valency: np.ndarray
    adjoint: np.ndarray
    fiber_of: tuple
    diagonal: tuple
    config: ColorMatrixConfiguration = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.valency)

    def slice(self, u: int, v: int) -> np.ndarray:
        if self.c is not None:
            return self.c[u, v]
        return _tensor_row(self.config, u, v)

    def is_thin(self, u: int) -> bool:
        return self.valency[u] == 1 and self.valency[self.adjoint[u]] == 1


def _tensor_row(cfg, u, v):
    m = cfg.matrix
    reps = _class_representatives(cfg)
    prod = cfg.adjacency[u].astype(np.int64) @ cfg.adjacency[v].astype(np.int64)
    return prod[reps[:, 0], reps[:, 1]]


def _class_representatives(cfg) -> np.ndarray:
    flat = cfg.matrix.ravel()
    _, first = np.unique(flat, return_index=True)
    return np.stack(np.divmod(first, cfg.degree), axis=1)


def intersection_tensor(cfg: ColorMatrixConfiguration) -> IntersectionTensor:
    report = verify_coherence(cfg)
    if not report:
        raise IncoherentError(f"configuration is not coherent: {report.axiom} {report.witness}")
    m = cfg.matrix
    r = cfg.rank
    reps = _class_representatives(cfg)
    adjoint = np.array([m[b, a] for a, b in reps], dtype=np.int64)
    diag = m.diagonal()
    fiber_index = {c: i for i, c in enumerate(cfg.diagonal_colors)}
    fiber_of = tuple((fiber_index[diag[a]], fiber_index[diag[b]]) for a, b in reps)
    valency = np.array([(m[a] == u).sum() for u, (a, _) in enumerate(reps)], dtype=np.int64)
    c = None
    if r <= DENSE_RANK_LIMIT:
        dtype = np.int32 if r > 64 else np.int64
        c = np.zeros((r, r, r), dtype=dtype)
        for u, mins, _ in _scan_products(cfg):
            c[u] = mins
    return IntersectionTensor(c, valency, adjoint, fiber_of, cfg.diagonal_colors, cfg)


# --------------------------------------------------------------------------
# the module ZS
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleVector:
    """An element of the free module over the basic relations."""

    coefficients: tuple

    @classmethod
    def basis(cls, rank: int, color: int, coefficient: int = 1) -> "ModuleVector":
        vec = [0] * rank
        vec[color] = coefficient
        return cls(tuple(vec))

    @classmethod
    def from_colors(cls, rank: int, colors: Iterable[int]) -> "ModuleVector":
        vec = [0] * rank
        for c in colors:
            vec[c] += 1
        return cls(tuple(vec))

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, color):
        return self.coefficients[color]

    def __add__(self, other):
        return ModuleVector(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __rmul__(self, k: int):
        return ModuleVector(tuple(k * a for a in self.coefficients))

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, a in enumerate(self.coefficients) if a)

    def star(self, tensor: IntersectionTensor) -> "ModuleVector":
        vec = [0] * len(self)
        for i, a in enumerate(self.coefficients):
            vec[tensor.adjoint[i]] += a
        return ModuleVector(tuple(vec))

    def as_dict(self) -> dict:
        return {i: a for i, a in enumerate(self.coefficients) if a}


def complex_product(cfg: ColorMatrixConfiguration, u: int, v: int) -> ModuleVector:
    """The multiset ``uv``: coefficient of ``w`` is ``c[u, v, w]``."""
    row = cfg.tensor.slice(u, v)
    return ModuleVector(tuple(int(x) for x in row))


def module_product(cfg: ColorMatrixConfiguration, x: ModuleVector, y: ModuleVector) -> ModuleVector:
    """Bilinear extension of :func:`complex_product` to all of ZS."""
    t = cfg.tensor
    total = np.zeros(cfg.rank, dtype=object)
    for u, a in x.as_dict().items():
        for v, b in y.as_dict().items():
            total += a * b * t.slice(u, v).astype(object)
    return ModuleVector(tuple(int(z) for z in total))


def scalar_product(cfg: ColorMatrixConfiguration, x: ModuleVector, y: ModuleVector) -> Fraction:
    """``<x, y> = (1/n) * sum_s x_s y_s |s|`` as an exact fraction."""
    sizes = cfg.class_sizes
    total = sum(int(a) * int(b) * int(s) for a, b, s in zip(x.coefficients, y.coefficients, sizes))
    return Fraction(total, cfg.degree)


# --------------------------------------------------------------------------
# summary properties
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Properties:
    rank: int
    degree: int
    is_homogeneous: bool
    is_commutative: bool
    fibers: list


def is_commutative(cfg: ColorMatrixConfiguration) -> bool:
    t = cfg.tensor
    if t.c is not None:
        return bool(np.array_equal(t.c, t.c.transpose(1, 0, 2)))
    return all(
        np.array_equal(t.slice(u, v), t.slice(v, u)) for u in range(t.rank) for v in range(u)
    )


def properties(cfg: ColorMatrixConfiguration) -> Properties:
    fibers = cfg.fibers
    return Properties(
        rank=cfg.rank,
        degree=cfg.degree,
        is_homogeneous=len(fibers) == 1,
        is_commutative=is_commutative(cfg),
        fibers=[list(f) for f in fibers],
    )


def is_homogeneous(cfg: ColorMatrixConfiguration) -> bool:
    return len(cfg.diagonal_colors) == 1


def identity_color(cfg: ColorMatrixConfiguration) -> int:
    if not is_homogeneous(cfg):
        raise ValueError("configuration is not homogeneous")
    return int(cfg.matrix[0, 0])


def colors_at(cfg: ColorMatrixConfiguration, point: int, color: int) -> list:
    """The neighbourhood ``point * color``."""
    return np.flatnonzero(cfg.matrix[point] == color).tolist()


def relabel_points(cfg: ColorMatrixConfiguration, perm: Sequence[int]) -> ColorMatrixConfiguration:
    """Image of ``cfg`` under the point map ``a -> perm[a]``."""
    n = cfg.degree
    inv = np.empty(n, dtype=np.int64)
    inv[np.asarray(perm)] = np.arange(n)
    return from_color_matrix(cfg.matrix[np.ix_(inv, inv)], name=cfg.name)
