"""Permutation groups, orbital configurations and automorphism search.

Permutations are tuples of images, ``p[x]`` being the image of ``x``, and are
composed left to right: ``mul(p, q)`` applies ``p`` first.

Automorphisms and isomorphisms are found by individualization-refinement.
Two colorings ``left`` and ``right`` sharing one label alphabet are placed on
the diagonal blocks of a ``2n x 2n`` matrix and stabilized together; a point
of ``left`` and a point of ``right`` are individualized with the same fresh
label, and the search descends until the diagonal colors are discrete.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import ColorMatrixConfiguration, from_color_matrix
from .wl import stable_coloring

Permutation = tuple

DEFAULT_DEGREE_CAP = 64


class DegreeCapExceeded(ValueError):
    pass


def identity(n: int) -> Permutation:
    return tuple(range(n))


def mul(p: Sequence[int], q: Sequence[int]) -> Permutation:
    return tuple(q[x] for x in p)


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def is_identity(p: Sequence[int]) -> bool:
    return all(x == y for x, y in enumerate(p))


def check_permutation(p: Sequence[int], n: Optional[int] = None) -> Permutation:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(len(p))) or (n is not None and len(p) != n):
        raise ValueError(f"not a permutation of degree {n or len(p)}: {p}")
    return p


def cycles(p: Sequence[int]) -> list:
    seen, out = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = p[x]
        out.append(tuple(cyc))
    return out


def orbit(point: int, gens: Iterable[Sequence[int]]) -> set:
    gens = list(gens)
    seen = {point}
    todo = [point]
    while todo:
        x = todo.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


class PermutationGroup:
    """Group generated by permutations of ``range(degree)``.

    The stabilizer chain is built lazily with the deterministic
    Schreier-Sims algorithm.
    """

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = degree
        gens = [check_permutation(g, degree) for g in generators]
        self.generators = [g for g in dict.fromkeys(gens) if not is_identity(g)]

    def __repr__(self):
        return f"PermutationGroup(degree={self.degree}, generators={len(self.generators)})"

    @cached_property
    def orbits(self) -> list:
        left = set(range(self.degree))
        out = []
        while left:
            o = orbit(min(left), self.generators)
            out.append(sorted(o))
            left -= o
        return out

    def is_transitive(self) -> bool:
        return len(self.orbits) == 1

    @cached_property
    def _chain(self):
        return _schreier_sims(self.generators, self.degree)

    @property
    def base(self) -> list:
        return list(self._chain[0])

    @cached_property
    def order(self) -> int:
        total = 1
        for trans in self._chain[2]:
            total *= len(trans)
        return total

    def __contains__(self, p) -> bool:
        base, _, trans = self._chain
        h, level = _sift(tuple(p), base, trans, 0)
        return level == len(base) and is_identity(h)

    def stabilizer(self, point: int) -> "PermutationGroup":
        """Point stabilizer, via a chain whose first base point is ``point``."""
        base, strong, _ = _schreier_sims(self.generators, self.degree, prefix=[point])
        gens = strong[1] if len(strong) > 1 else []
        return PermutationGroup(self.degree, gens)

    def elements(self):
        """Enumerate all elements (small groups only)."""
        base, _, trans = self._chain
        if not base:
            yield identity(self.degree)
            return
        for reps in product(*[list(t.values()) for t in reversed(trans)]):
            g = identity(self.degree)
            for r in reps:
                g = mul(g, r)
            yield g


def _transversal(b: int, gens: list, n: int) -> dict:
    trans = {b: identity(n)}
    todo = [b]
    while todo:
        x = todo.pop()
        for g in gens:
            y = g[x]
            if y not in trans:
                trans[y] = mul(trans[x], g)
                todo.append(y)
    return trans


def _sift(h, base, trans, start):
    for level in range(start, len(base)):
        pt = h[base[level]]
        if pt not in trans[level]:
            return h, level
        h = mul(h, inverse(trans[level][pt]))
    return h, len(base)


def _schreier_sims(gens, n, prefix=()):
    base = list(prefix)
    for g in gens:
        if all(g[b] == b for b in base):
            base.append(next(x for x in range(n) if g[x] != x))
    strong = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(len(base))]
    trans = [_transversal(base[i], strong[i], n) for i in range(len(base))]
    i = len(base) - 1
    while i >= 0:
        restart = False
        for pt, u in list(trans[i].items()):
            for g in strong[i]:
                s = mul(mul(u, g), inverse(trans[i][g[pt]]))
                if is_identity(s):
                    continue
                h, j = _sift(s, base, trans, i + 1)
                if j < len(base) or not is_identity(h):
                    if j == len(base):
                        base.append(next(x for x in range(n) if h[x] != x))
                        strong.append([])
                        trans.append({})
                    for level in range(i + 1, j + 1):
                        strong[level].append(h)
                        trans[level] = _transversal(base[level], strong[level], n)
                    i = j
                    restart = True
                    break
            if restart:
                break
        if not restart:
            i -= 1
    return base, strong, trans


# --------------------------------------------------------------------------
# orbital configurations
# --------------------------------------------------------------------------


def orbital_configuration(group: PermutationGroup) -> ColorMatrixConfiguration:
    """The coherent configuration of 2-orbits of ``group``."""
    n = group.degree
    idx = np.arange(n * n)
    a, b = np.divmod(idx, n)
    rows, cols = [], []
    for g in group.generators:
        g = np.asarray(g)
        rows.append(idx)
        cols.append(g[a] * n + g[b])
    if rows:
        r, c = np.concatenate(rows), np.concatenate(cols)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n * n, n * n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return from_color_matrix(labels.reshape(n, n))


# --------------------------------------------------------------------------
# individualization-refinement search
# --------------------------------------------------------------------------


def _union(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    n = left.shape[0]
    cross = int(max(left.max(), right.max())) + 1
    out = np.full((2 * n, 2 * n), cross, dtype=np.int64)
    out[:n, :n] = left
    out[n:, n:] = right
    return out


def _mark(col: np.ndarray, points) -> np.ndarray:
    out = col.copy()
    fresh = int(out.max()) + 1
    for p in points:
        out[p, p] = fresh
    return out


def _balanced(col: np.ndarray, n: int) -> bool:
    k = int(col.max()) + 1
    left = np.bincount(col[:n, :n].ravel(), minlength=k)
    right = np.bincount(col[n:, n:].ravel(), minlength=k)
    return bool(np.array_equal(left, right))


def _target_cell(diag: np.ndarray):
    values, counts = np.unique(diag, return_counts=True)
    multi = counts > 1
    if not multi.any():
        return None
    # smallest non-singleton cell first, ties broken by label
    return values[multi][np.argmin(counts[multi])]


def _match(col: np.ndarray, n: int, right_gens=None) -> Optional[Permutation]:
    """Search below the union coloring ``col``.

    ``right_gens`` (automorphisms of the right-hand coloring) lets the first
    branching step try one point per orbit only.
    """
    if not _balanced(col, n):
        return None
    diag = col.diagonal()
    left, right = diag[:n], diag[n:]
    target = _target_cell(left)
    if target is None:
        where = {int(c): j for j, c in enumerate(right)}
        f = np.array([where[int(c)] for c in left])
        if np.array_equal(col[:n, :n], col[n:, n:][np.ix_(f, f)]):
            return tuple(int(x) for x in f)
        return None
    a = int(np.flatnonzero(left == target)[0])
    covered = set()
    for b in np.flatnonzero(right == target).tolist():
        if b in covered:
            continue
        if right_gens:
            covered |= orbit(b, right_gens)
        f = _match(stable_coloring(_mark(col, [a, n + b])), n)
        if f is not None:
            return f
    return None


def find_label_preserving_map(left, right, fixed=(), right_gens=None) -> Optional[Permutation]:
    """A bijection ``f`` with ``left[a, b] == right[f(a), f(b)]`` for all cells.

    ``fixed`` is a sequence of point pairs ``(a, f(a))`` the map must respect.
    ``right_gens`` optionally lists automorphisms of ``right`` (ignored when
    ``fixed`` is given).  Returns ``None`` after an exhaustive search if no
    such map exists.
    """
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    n = left.shape[0]
    if right.shape != left.shape:
        return None
    col = _union(left, right)
    for a, b in fixed:
        col = _mark(col, [a, n + b])
    f = _match(stable_coloring(col), n, None if fixed else right_gens)
    if f is not None:
        fa = np.asarray(f)
        assert np.array_equal(left, right[np.ix_(fa, fa)]), "search returned an invalid map"
    return f


def _aut_generators(col: np.ndarray) -> list:
    n = col.shape[0]
    diag = col.diagonal()
    target = _target_cell(diag)
    if target is None:
        return []
    cell = np.flatnonzero(diag == target).tolist()
    b = cell[0]
    gens = _aut_generators(stable_coloring(_mark(col, [b])))
    reach = orbit(b, gens)
    dead = set()
    pair = _union(col, col)
    for beta in cell[1:]:
        if beta in reach or beta in dead:
            continue
        f = _match(stable_coloring(_mark(pair, [b, n + beta])), n)
        if f is not None:
            gens.append(f)
            reach = orbit(b, gens)
        else:
            dead |= orbit(beta, gens)
    return gens


def _check_cap(n: int, cap: Optional[int]):
    cap = DEFAULT_DEGREE_CAP if cap is None else cap
    if n > cap:
        raise DegreeCapExceeded(f"degree {n} exceeds search cap {cap}")


@lru_cache(maxsize=256)
def _cached_generators(shape: tuple, data: bytes) -> tuple:
    m = np.frombuffer(data, dtype=np.int64).reshape(shape)
    gens = _aut_generators(stable_coloring(m))
    for g in gens:
        ga = np.asarray(g)
        if not np.array_equal(m, m[np.ix_(ga, ga)]):
            raise AssertionError(f"generator {g} does not preserve the color classes")
    return tuple(gens)


def automorphism_generators(matrix) -> tuple:
    """Generators of the group of label-preserving permutations of ``matrix``."""
    m = np.ascontiguousarray(matrix, dtype=np.int64)
    return _cached_generators(m.shape, m.tobytes())


def automorphism_group(cfg: ColorMatrixConfiguration, cap: Optional[int] = None) -> PermutationGroup:
    """Full color-preserving automorphism group of ``cfg``."""
    _check_cap(cfg.degree, cap)
    return PermutationGroup(cfg.degree, automorphism_generators(cfg.matrix))


def preserves_colors(cfg: ColorMatrixConfiguration, p: Sequence[int]) -> bool:
    pa = np.asarray(p)
    return bool(np.array_equal(cfg.matrix, cfg.matrix[np.ix_(pa, pa)]))


def is_schurian(cfg: ColorMatrixConfiguration, cap: Optional[int] = None) -> bool:
    """Whether ``cfg`` is the 2-orbit configuration of its automorphism group.

    For quasi-thin schemes the transitivity criterion is evaluated as well
    and the two answers are required to agree.
    """
    group = automorphism_group(cfg, cap)
    verdict = orbital_configuration(group).same_partition(cfg)
    from .quasithin import is_quasi_thin

    if len(cfg.diagonal_colors) == 1 and is_quasi_thin(cfg):
        assert verdict == group.is_transitive(), "schurity and transitivity disagree"
    return verdict


def find_isomorphism(
    a: ColorMatrixConfiguration, b: ColorMatrixConfiguration, cap: Optional[int] = None
) -> Optional[Permutation]:
    """A point bijection carrying the classes of ``a`` onto the classes of ``b``.

    Every isomorphism induces an algebraic isomorphism, so the search runs
    over algebraic isomorphisms and tries to realize each one.
    """
    if a.degree != b.degree or a.rank != b.rank:
        return None
    _check_cap(a.degree, cap)
    if sorted(a.class_sizes.tolist()) != sorted(b.class_sizes.tolist()):
        return None
    from .algiso import iter_algebraic_isomorphisms, realize

    for phi in iter_algebraic_isomorphisms(a, b):
        f = realize(phi, cap=cap)
        if f is not None:
            return f
    return None
