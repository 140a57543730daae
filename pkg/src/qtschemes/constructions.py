"""Builders for the named schemes and the small groups they come from."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .config import ColorMatrixConfiguration, from_color_matrix
from .perm import PermutationGroup, identity, mul, orbital_configuration


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    """Multiplication table ``table[x, y] = x*y`` on ``range(order)``."""

    table: np.ndarray
    identity: int = 0
    labels: tuple = field(default=(), repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        m = t.shape[0]
        if t.ndim != 2 or t.shape != (m, m) or m == 0:
            raise ValueError("group table must be a non-empty square array")
        if t.min() < 0 or t.max() >= m:
            raise ValueError("group table entries out of range")
        e = self.identity
        if not (np.array_equal(t[e], np.arange(m)) and np.array_equal(t[:, e], np.arange(m))):
            raise ValueError("identity element does not act trivially")
        if not all((t[x] == e).sum() == 1 for x in range(m)):
            raise ValueError("not every element has an inverse")
        # (xy)z == x(yz), both indexed by (x, y, z)
        lhs = t[t]
        rhs = t[np.arange(m)[:, None, None], t[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise ValueError("group table is not associative")
        object.__setattr__(self, "table", t)
        t.setflags(write=False)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def inverse(self, x: int) -> int:
        return int(np.flatnonzero(self.table[x] == self.identity)[0])

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])


def group_from_permutations(generators: Sequence[Sequence[int]]) -> FiniteGroupTable:
    """Table of the permutation group generated by ``generators``.

    Elements are numbered in breadth-first order from the identity, so the
    table is deterministic; ``labels`` holds the permutations themselves.
    """
    gens = [tuple(g) for g in generators]
    n = len(gens[0]) if gens else 1
    e = identity(n)
    elems = [e]
    index = {e: 0}
    k = 0
    while k < len(elems):
        x = elems[k]
        for g in gens:
            y = mul(x, g)
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
        k += 1
    m = len(elems)
    table = np.empty((m, m), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            table[i, j] = index[mul(x, y)]
    return FiniteGroupTable(table, 0, tuple(elems))


def cyclic_group(m: int) -> FiniteGroupTable:
    a = np.arange(m)
    return FiniteGroupTable((a[:, None] + a[None, :]) % m)


def direct_product(g: FiniteGroupTable, h: FiniteGroupTable) -> FiniteGroupTable:
    """Element ``(x, y)`` has index ``x * |h| + y``."""
    mg, mh = g.order, h.order
    t = (g.table[:, None, :, None] * mh + h.table[None, :, None, :]).reshape(mg * mh, mg * mh)
    return FiniteGroupTable(t, g.identity * mh + h.identity)


def dihedral_group(m: int) -> FiniteGroupTable:
    """Symmetries of the m-gon: rotation ``(1 2 ... m)`` and reflection ``x -> -x``."""
    rot = tuple((x + 1) % m for x in range(m))
    ref = tuple((-x) % m for x in range(m))
    return group_from_permutations([rot, ref])


def symmetric_group(m: int) -> FiniteGroupTable:
    gens = [tuple([1, 0] + list(range(2, m))), tuple(list(range(1, m)) + [0])] if m > 1 else [(0,)]
    return group_from_permutations(gens)


def trivial_scheme(n: int) -> ColorMatrixConfiguration:
    if n < 1:
        raise ValueError("degree must be at least 1")
    return from_color_matrix(1 - np.eye(n, dtype=np.int64), name=f"trivial-{n}")


def complete_configuration(n: int) -> ColorMatrixConfiguration:
    if n < 1:
        raise ValueError("degree must be at least 1")
    return from_color_matrix(np.arange(n * n).reshape(n, n), name=f"complete-{n}")


def regular_group_scheme(g: FiniteGroupTable) -> ColorMatrixConfiguration:
    """Color of ``(x, y)`` is ``x^-1 y``."""
    inv = np.array([g.inverse(x) for x in range(g.order)])
    return from_color_matrix(g.table[inv[:, None], np.arange(g.order)[None, :]])


def coset_involution_scheme(g: FiniteGroupTable, a: int) -> ColorMatrixConfiguration:
    """Scheme of ``G`` acting on right cosets of ``<a>`` by right multiplication."""
    if a == g.identity or g.mul(a, a) != g.identity:
        raise ValueError(f"element {a} is not an involution")
    coset_of = np.full(g.order, -1, dtype=np.int64)
    k = 0
    for x in range(g.order):
        if coset_of[x] < 0:
            coset_of[x] = coset_of[g.mul(a, x)] = k
            k += 1
    reps = [int(np.flatnonzero(coset_of == c)[0]) for c in range(k)]
    gens = [tuple(int(coset_of[g.table[r, h]]) for r in reps) for h in range(g.order)]
    return orbital_configuration(PermutationGroup(k, gens))


def wreath_2_n(n: int) -> ColorMatrixConfiguration:
    """Wreath product of the regular schemes of degrees 2 and ``n``.

    Point ``2 i + e`` is element ``e`` of block ``i``.  Colors: identity,
    in-block swap, and for each ``d != 0`` mod ``n`` the full block relation
    from block ``i`` to block ``i + d``.
    """
    if n < 3:
        raise ValueError("wreath_2_n needs n >= 3")
    pts = np.arange(2 * n)
    blk, e = np.divmod(pts, 2)
    d = (blk[None, :] - blk[:, None]) % n
    same = d == 0
    mat = np.where(same, (e[:, None] != e[None, :]).astype(np.int64), 1 + d)
    return from_color_matrix(mat, name=f"wreath-2-{n}")


def _translation_group_points(moduli: Sequence[int]) -> list:
    return list(product(*[range(m) for m in moduli]))


def _affine_scheme(moduli: Sequence[int], extra: Sequence) -> ColorMatrixConfiguration:
    pts = _translation_group_points(moduli)
    index = {p: i for i, p in enumerate(pts)}
    gens = []
    for k in range(len(moduli)):
        gens.append(
            tuple(index[tuple((x + (1 if j == k else 0)) % moduli[j] for j, x in enumerate(p))] for p in pts)
        )
    for f in extra:
        gens.append(tuple(index[f(p)] for p in pts))
    return orbital_configuration(PermutationGroup(len(pts), gens))


def intro_example(which: int) -> ColorMatrixConfiguration:
    """The pair of degree-16 rank-10 schemes that are algebraically isomorphic but not isomorphic.

    ``1``: Z4 x Z4 acting regularly, extended by inversion.
    ``2``: (Z2 x Z2)^2 acting regularly, extended by swapping the two factors.
    """
    if which == 1:
        cfg = _affine_scheme([4, 4], [lambda p: ((-p[0]) % 4, (-p[1]) % 4)])
    elif which == 2:
        cfg = _affine_scheme([2, 2, 2, 2], [lambda p: (p[2], p[3], p[0], p[1])])
    else:
        raise ValueError("which must be 1 or 2")
    return from_color_matrix(cfg.matrix, name=f"intro-{which}")


# --------------------------------------------------------------------------
# Klein covers of regular schemes
# --------------------------------------------------------------------------

# the Klein group is {0, 1, 2, 3} under XOR; its order-2 subgroups are {0, h}
KLEIN_SUBGROUPS = (1, 2, 3)


def klein_character(h: int, x: int) -> int:
    """The character of the Klein group with kernel ``{0, h}``."""
    return 0 if x in (0, h) else 1


def klein_cover_scheme(quotient: FiniteGroupTable, rho: Sequence[int], twist) -> ColorMatrixConfiguration:
    """A scheme on ``Q x K`` (``K`` the Klein group) covering the regular scheme of ``Q``.

    Point ``(i, x)`` has index ``4 i + x``.  Inside a fiber the colors are the
    translations ``x -> x ^ g``.  Between fibers ``i`` and ``j = i d`` the two
    pieces of the block are separated by the characters with kernels
    ``rho[d^-1]`` and ``rho[d]``; ``twist[d][i]`` says which piece of block
    ``(i, i d)`` belongs to the first thick color over ``d``.  The result is
    a color matrix that may or may not be coherent.
    """
    q = quotient
    m = q.order
    inv = [q.inverse(d) for d in range(m)]
    others = [d for d in range(m) if d != q.identity]
    slot = {d: k for k, d in enumerate(others)}
    mat = np.empty((4 * m, 4 * m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            d = q.mul(inv[i], j)
            for x in range(4):
                for y in range(4):
                    if d == q.identity:
                        c = x ^ y
                    else:
                        eps = klein_character(rho[inv[d]], x) ^ klein_character(rho[d], y)
                        c = 4 + 2 * slot[d] + (eps ^ int(twist[d][i]))
                    mat[4 * i + x, 4 * j + y] = c
    return from_color_matrix(mat)
