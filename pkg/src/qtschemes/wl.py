"""Two-dimensional Weisfeiler-Leman stabilization.

The refinement step gives cell ``(a, b)`` the new label

    (old color, color of (b, a), a == b, sorted multiset {(c(a, g), c(g, b))})

and numbers the distinct signatures in lexicographic order.  Labels therefore
depend only on the signatures present, never on cell positions, which is what
lets the isomorphism search compare two colorings refined side by side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ColorMatrixConfiguration, from_color_matrix


@dataclass(frozen=True)
class SeedPartition:
    """An arbitrary square labelling, not necessarily coherent."""

    matrix: np.ndarray

    @property
    def degree(self) -> int:
        return self.matrix.shape[0]


def _dense_labels(matrix: np.ndarray) -> np.ndarray:
    _, inverse = np.unique(matrix, return_inverse=True)
    return inverse.reshape(matrix.shape).astype(np.int64)


def refine_step(col: np.ndarray) -> np.ndarray:
    """One round of 2-WL on a dense labelling ``0..k-1``."""
    n = col.shape[0]
    k = int(col.max()) + 1
    codes = col[:, None, :] * k + col.T[None, :, :]
    codes.sort(axis=2)
    sig = np.empty((n, n, n + 3), dtype=np.int64)
    sig[:, :, 0] = col
    sig[:, :, 1] = col.T
    sig[:, :, 2] = np.eye(n, dtype=np.int64)
    sig[:, :, 3:] = codes
    return _row_labels(sig.reshape(n * n, n + 3)).reshape(n, n)


def _row_labels(rows: np.ndarray) -> np.ndarray:
    """Rank of each row among the distinct rows in lexicographic order.

    Same result as ``np.unique(rows, axis=0, return_inverse=True)[1]`` but
    much faster, since lexsort avoids the structured-dtype comparison sort.
    """
    order = np.lexsort(rows.T[::-1])
    srt = rows[order]
    step = np.any(srt[1:] != srt[:-1], axis=1)
    labels = np.empty(len(rows), dtype=np.int64)
    labels[order] = np.concatenate([[0], np.cumsum(step)])
    return labels


def stable_coloring(matrix) -> np.ndarray:
    """Iterate :func:`refine_step` to its fixpoint; labels are invariant."""
    col = _dense_labels(np.asarray(matrix, dtype=np.int64))
    n = col.shape[0]
    classes = int(col.max()) + 1
    rounds = 0
    while True:
        new = refine_step(col)
        rounds += 1
        assert rounds <= n * n + 1, "refinement exceeded n^2 rounds"
        new_classes = int(new.max()) + 1
        if new_classes == classes:
            return new
        col, classes = new, new_classes


def coherent_closure(seed) -> ColorMatrixConfiguration:
    """Smallest coherent configuration whose partition refines ``seed``."""
    matrix = seed.matrix if isinstance(seed, (SeedPartition, ColorMatrixConfiguration)) else seed
    arr = np.asarray(matrix, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"seed must be a non-empty square matrix, got shape {arr.shape}")
    return from_color_matrix(stable_coloring(arr))


def individualize(matrix: np.ndarray, points) -> np.ndarray:
    """Give each diagonal cell ``(p, p)`` its own fresh color."""
    out = np.array(matrix, dtype=np.int64, copy=True)
    fresh = int(out.max()) + 1
    for k, p in enumerate(points):
        out[p, p] = fresh + k
    return out


def one_point_extension(cfg: ColorMatrixConfiguration, point: int) -> ColorMatrixConfiguration:
    """The configuration ``X_point``: closure of ``cfg`` with ``(point, point)`` split off."""
    if not 0 <= point < cfg.degree:
        raise IndexError(f"point {point} out of range for degree {cfg.degree}")
    return coherent_closure(individualize(cfg.matrix, [point]))


def is_refinement(fine: ColorMatrixConfiguration, coarse: ColorMatrixConfiguration) -> bool:
    """True iff every class of ``coarse`` is a union of classes of ``fine``."""
    if fine.degree != coarse.degree:
        raise ValueError(f"degree mismatch: {fine.degree} vs {coarse.degree}")
    pairs = np.unique(np.stack([fine.matrix.ravel(), coarse.matrix.ravel()], axis=1), axis=0)
    return len(pairs) == fine.rank
