"""Regenerate the vendored fixture corpus.

Two families are produced:

* Kleinian quasi-thin schemes of index 4 (degree 16) and 7 (degree 28).
  Every such scheme is a Klein cover of the regular scheme of a group ``Q``
  of order 4 or 7: the points are ``Q x K`` with ``K`` the Klein group, the
  stabilizer matrix is circulant, and the thick colors are fixed by a GF(2)
  twist vector.  Changing base points inside fibers acts on twists by a
  linear "gauge" map, so it is enough to enumerate twist vectors modulo the
  gauge space.  The coherent, Kleinian results are deduplicated up to
  isomorphism and classified by schurity.

* All schemes of degree at most 8.  Every one of them is the scheme of a
  transitive group; a scheme whose group contains a minimal transitive
  subgroup ``M`` is a fusion of the orbital scheme of ``M``.  So the slice is
  the set of coherent homogeneous fusions of the orbital schemes of the
  minimal transitive groups of each degree, up to isomorphism.

Usage::

    python scripts/build_fixtures.py [--out DIR] [--only hm|catalog|seeds]
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
import time
from pathlib import Path

import numpy as np

from qtschemes.config import from_color_matrix, is_commutative, verify_coherence
from qtschemes.algiso import find_algebraic_isomorphisms
from qtschemes.constructions import (
    FiniteGroupTable,
    coset_involution_scheme,
    cyclic_group,
    dihedral_group,
    direct_product,
    klein_character,
    klein_cover_scheme,
)
from qtschemes.io import emit_matrix
from qtschemes.perm import (
    PermutationGroup,
    automorphism_group,
    cycles,
    find_isomorphism,
    identity,
    mul,
    orbital_configuration,
)
from qtschemes.quasithin import is_kleinian, is_quasi_thin, orthogonal_profile

log = logging.getLogger("build_fixtures")


# --------------------------------------------------------------------------
# GF(2) helpers
# --------------------------------------------------------------------------


def gf2_rref(rows: np.ndarray):
    """Row-reduce over GF(2); return (reduced rows, pivot columns)."""
    a = rows.copy() % 2
    pivots = []
    r = 0
    for c in range(a.shape[1]):
        hit = np.flatnonzero(a[r:, c])
        if len(hit) == 0:
            continue
        p = r + hit[0]
        a[[r, p]] = a[[p, r]]
        for k in np.flatnonzero(a[:, c]):
            if k != r:
                a[k] ^= a[r]
        pivots.append(c)
        r += 1
        if r == a.shape[0]:
            break
    return a[:r], pivots


def gf2_nullspace(eqs: np.ndarray, nvars: int) -> np.ndarray:
    if len(eqs) == 0:
        return np.eye(nvars, dtype=np.uint8)
    red, pivots = gf2_rref(eqs.astype(np.uint8))
    free = [c for c in range(nvars) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(nvars, dtype=np.uint8)
        v[f] = 1
        for row, p in zip(red, pivots):
            v[p] = row[f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), nvars)


def gf2_complement(sub: np.ndarray, space: np.ndarray) -> np.ndarray:
    """Vectors of ``space`` completing a basis of ``sub`` to one of ``space``."""
    red, _ = gf2_rref(sub) if len(sub) else (sub, [])
    out = []
    cur = red
    for v in space:
        trial = np.vstack([cur, v]) if len(cur) else v[None, :]
        red2, piv = gf2_rref(trial)
        if len(red2) > len(cur):
            out.append(v)
            cur = red2
    return np.array(out, dtype=np.uint8).reshape(len(out), space.shape[1])


# --------------------------------------------------------------------------
# Klein covers
# --------------------------------------------------------------------------


def _twist_spaces(q: FiniteGroupTable, rho):
    m = q.order
    others = [d for d in range(m) if d != q.identity]
    var = {(d, i): k for k, (d, i) in enumerate(itertools.product(others, range(m)))}
    nv = len(var)
    inv = [q.inverse(x) for x in range(m)]
    eqs = []
    for d in others:
        di = inv[d]
        for i in range(m):
            row = np.zeros(nv, dtype=np.uint8)
            for key in ((d, i), (di, q.mul(i, d)), (d, q.identity), (di, d)):
                row[var[key]] ^= 1
            eqs.append(row)
    space = gf2_nullspace(np.array(eqs), nv)
    gauge = []
    for i in range(m):
        for h in (1, 2):
            v = np.zeros(nv, dtype=np.uint8)
            for d in others:
                v[var[(d, i)]] ^= klein_character(rho[inv[d]], h)
                v[var[(d, q.mul(i, inv[d]))]] ^= klein_character(rho[d], h)
            gauge.append(v)
    for d in others:
        v = np.zeros(nv, dtype=np.uint8)
        for i in range(m):
            v[var[(d, i)]] = 1
        gauge.append(v)
    gauge = np.array(gauge, dtype=np.uint8)
    # the gauge must preserve the transpose condition
    assert not (np.array(eqs) @ gauge.T % 2).any()
    return var, space, gauge


def klein_covers(q: FiniteGroupTable):
    """Coherent Kleinian covers of ``Q`` of index ``|Q|``, one per gauge class."""
    m = q.order
    others = [d for d in range(m) if d != q.identity]
    seen_rho = set()
    for values in itertools.product((1, 2, 3), repeat=len(others)):
        # relabelling the three subgroups gives isomorphic schemes
        relabel = {}
        for v in values:
            relabel.setdefault(v, len(relabel) + 1)
        canon = tuple(relabel[v] for v in values)
        if canon in seen_rho:
            continue
        seen_rho.add(canon)
        rho = [0] * m
        for d, v in zip(others, canon):
            rho[d] = v
        var, space, gauge = _twist_spaces(q, rho)
        comp = gf2_complement(gauge, space)
        for bits in itertools.product((0, 1), repeat=len(comp)):
            vec = (np.array(bits, dtype=np.uint8) @ comp) % 2 if len(comp) else np.zeros(len(var), np.uint8)
            twist = {d: [int(vec[var[(d, i)]]) for i in range(m)] for d in others}
            cfg = klein_cover_scheme(q, rho, twist)
            if not verify_coherence(cfg):
                continue
            if not is_quasi_thin(cfg):
                continue
            verdict = is_kleinian(cfg)
            if verdict.kleinian and verdict.index == m:
                yield cfg, tuple(rho), twist


def dedupe(configs):
    """Representatives up to isomorphism, in first-seen order."""
    reps = []
    for cfg in configs:
        key = (cfg.rank, is_commutative(cfg), tuple(sorted(cfg.class_sizes.tolist())))
        if any(k == key and find_isomorphism(cfg, r) is not None for k, r in reps):
            continue
        reps.append((key, cfg))
    return [r for _, r in reps]


def classify_covers(groups, label):
    found = []
    for q in groups:
        t = time.time()
        got = [cfg for cfg, _, _ in klein_covers(q)]
        log.info("%s: quotient of order %d gives %d coherent Kleinian covers (%.1fs)", label, q.order, len(got), time.time() - t)
        found.extend(got)
    reps = dedupe(found)
    out = []
    for cfg in reps:
        group = automorphism_group(cfg)
        out.append(
            {
                "config": cfg,
                "schurian": orbital_configuration(group).same_partition(cfg),
                "orbits": len(group.orbits),
                "commutative": is_commutative(cfg),
                "aut_order": group.order,
            }
        )
    return out


# --------------------------------------------------------------------------
# degree <= 8 slice
# --------------------------------------------------------------------------


def _generate(gens, n, cap=None):
    """Element set of ``<gens>``; ``None`` once it exceeds ``cap`` elements."""
    e = identity(n)
    elems = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
                    if cap is not None and len(elems) > cap:
                        return None
        frontier = nxt
    return frozenset(elems)


def _transitive(elems, n) -> bool:
    return len({p[0] for p in elems}) == n


def _maximal_subgroups_2group(elems, n):
    """Index-2 subgroups of a 2-group: preimages of hyperplanes of ``H / Phi(H)``."""
    frattini = _generate([mul(g, g) for g in elems], n)
    basis = []
    span = frattini
    for g in sorted(elems):
        if g not in span:
            basis.append(g)
            span = _generate(list(frattini) + basis, n)
    d = len(basis)
    # coordinates of every element modulo the Frattini subgroup
    coords = {}
    for bits in itertools.product((0, 1), repeat=d):
        rep = identity(n)
        for b, g in zip(bits, basis):
            if b:
                rep = mul(rep, g)
        for f in frattini:
            coords[mul(f, rep)] = bits
    assert len(coords) == len(elems)
    for functional in itertools.product((0, 1), repeat=d):
        if any(functional):
            yield frozenset(g for g, c in coords.items() if sum(a * b for a, b in zip(functional, c)) % 2 == 0)


def _sylow2_generators(n):
    """Generators of a Sylow 2-subgroup of ``Sym(n)`` for ``n`` a power of 2."""
    gens = []
    size = 1
    while size < n:
        for start in range(0, n, 2 * size):
            gens.append(tuple(
                x + size if start <= x < start + size else x - size if start + size <= x < start + 2 * size else x
                for x in range(n)
            ))
        size *= 2
    return gens


def minimal_transitive_groups(n):
    """Element sets of transitive groups such that every transitive group of degree ``n`` contains one of them."""
    if n == 1:
        return [frozenset({(0,)})]
    if all(n % k for k in range(2, n)):  # prime: the cyclic group of order n
        return [_generate([tuple((x + 1) % n for x in range(n))], n)]
    if n & (n - 1) == 0:
        # a Sylow 2-subgroup of a transitive group of 2-power degree is transitive
        top = _generate(_sylow2_generators(n), n)
        found, seen, stack = [], {top}, [top]
        while stack:
            h = stack.pop()
            below = [m for m in _maximal_subgroups_2group(h, n) if _transitive(m, n)]
            if not below:
                found.append(h)
            for m in below:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return found
    # remaining composite degree (6): transitive two-generated groups of small order
    reps = {}
    for p in itertools.permutations(range(n)):
        key = tuple(sorted(len(c) for c in cycles(p)))
        reps.setdefault(key, p)
    groups = set()
    for a in reps.values():
        for b in itertools.permutations(range(n)):
            g = _generate([a, b], n, cap=24)
            if g is not None and _transitive(g, n):
                groups.add(g)
    return [g for g in groups if not any(h < g for h in groups)]


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def fusions(cfg):
    """All coherent fusions of a homogeneous scheme that keep the diagonal alone."""
    e = int(cfg.matrix[0, 0])
    others = [c for c in range(cfg.rank) if c != e]
    for part in set_partitions(others):
        lookup = np.zeros(cfg.rank, dtype=np.int64)
        for k, block in enumerate(part):
            lookup[block] = k + 1
        fused = from_color_matrix(lookup[cfg.matrix])
        if verify_coherence(fused):
            yield fused


def catalog_slice(n):
    orbitals = dedupe(
        [orbital_configuration(PermutationGroup(n, sorted(g))) for g in minimal_transitive_groups(n)]
    )
    log.info("degree %d: %d orbital schemes of minimal transitive groups", n, len(orbitals))
    found = []
    for cfg in orbitals:
        found.extend(fusions(cfg))
    reps = dedupe(found)
    reps.sort(key=lambda c: (c.rank, sorted(c.class_sizes.tolist()), c.matrix.tobytes()))
    return reps


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def write(out: Path, name: str, cfg, comments, dry_run=False):
    path = out / name
    text = emit_matrix(cfg, comments)
    if dry_run:
        log.info("would write %s (degree %d, rank %d)", path, cfg.degree, cfg.rank)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


HM_NOTE = (
    "provenance: reconstructed as a Klein cover of the regular scheme of a group of order {m}",
    "by scripts/build_fixtures.py; identified with catalog number {num} by its properties",
    "({what})",
)


def build_hm(out: Path, dry_run=False):
    z2 = cyclic_group(2)
    for degree, groups, (good, bad) in (
        (16, [cyclic_group(4), direct_product(z2, z2)], (172, 173)),
        (28, [cyclic_group(7)], (175, 176)),
    ):
        m = degree // 4
        recs = classify_covers(groups, f"degree {degree}")
        for rec in recs:
            log.info(
                "  rank %d commutative=%s schurian=%s orbits=%d |Aut|=%d",
                rec["config"].rank, rec["commutative"], rec["schurian"], rec["orbits"], rec["aut_order"],
            )
        nonschurian = [r for r in recs if not r["schurian"]]
        assert len(nonschurian) == 1, "expected exactly one non-schurian Kleinian scheme"
        x_bad = nonschurian[0]["config"]
        partners = [
            r for r in recs
            if r["schurian"] and find_algebraic_isomorphisms(r["config"], x_bad, limit=1)
        ]
        log.info("degree %d: %d schurian schemes algebraically isomorphic to the non-schurian one", degree, len(partners))
        if partners:
            x_good = partners[0]["config"]
            what = "schurian, algebraically isomorphic to the non-schurian partner"
        else:
            # no schurian scheme of this family is algebraically isomorphic to
            # the non-schurian one; take the first non-commutative schurian one
            x_good = next(r["config"] for r in recs if r["schurian"] and not r["commutative"])
            what = "schurian and non-commutative; NOT algebraically isomorphic to the non-schurian partner"
            log.warning("degree %d: no algebraically isomorphic schurian partner exists; using %s", degree, what)
        write(out, f"hm{degree}-{good}.txt", x_good, [
            f"id: {degree}-{good}",
            *[s.format(m=m, num=good, what=what) for s in HM_NOTE],
        ], dry_run)
        write(out, f"hm{degree}-{bad}.txt", x_bad, [
            f"id: {degree}-{bad}",
            *[s.format(m=m, num=bad, what="the unique non-schurian Kleinian scheme of this degree") for s in HM_NOTE],
        ], dry_run)
        k = 0
        for rec in recs:
            cfg = rec["config"]
            if cfg is x_good or cfg is x_bad:
                continue
            k += 1
            write(out, f"kleinian{degree}-{k}.txt", cfg, [
                f"Kleinian quasi-thin scheme of index {m}, Klein cover of a group of order {m}",
                f"commutative={rec['commutative']} schurian={rec['schurian']} |Aut|={rec['aut_order']}",
            ], dry_run)


def _polygon(m):
    g = dihedral_group(m)
    reflection = g.labels.index(tuple((-x) % m for x in range(m)))
    return coset_involution_scheme(g, reflection)


def build_seeds(out: Path, dry_run=False):
    # 5-cycle adjacency as an uncolored seed
    seed = np.zeros((5, 5), dtype=np.int64)
    for i in range(5):
        seed[i, (i + 1) % 5] = seed[(i + 1) % 5, i] = 1
    path = out / "c5-seed.txt"
    text = "# adjacency matrix of the 5-cycle; its coherent closure has rank 3\n5\n" + "\n".join(
        " ".join(map(str, r)) for r in seed
    ) + "\n"
    if not dry_run:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    # Klein regular scheme in packed-digit rows
    packed = "# regular scheme of the Klein group, rows as packed digits\n" + "\n".join(
        "".join(str(x ^ y) for y in range(4)) for x in range(4)
    ) + "\n"
    if not dry_run:
        (out / "klein-packed.txt").write_text(packed)
    # index-3 Kleinian schemes (near-pencil geometry)
    covers = dedupe([cfg for cfg, _, _ in klein_covers(cyclic_group(3))])
    for k, cfg in enumerate(covers, 1):
        write(out, f"kleinian12-{k}.txt", cfg, [
            "Kleinian quasi-thin scheme of index 3, Klein cover of a group of order 3",
        ], dry_run)
    # non-Kleinian quasi-thin schemes with several orthogonals
    for name, cfg, note in (
        ("polygon-9.txt", _polygon(9), "distance scheme of the 9-gon"),
        ("polygon-10.txt", _polygon(10), "distance scheme of the 10-gon"),
        ("polygon-12.txt", _polygon(12), "distance scheme of the 12-gon"),
    ):
        prof = orthogonal_profile(cfg)
        assert is_quasi_thin(cfg) and not is_kleinian(cfg).kleinian and len(prof.orthogonals) >= 2, name
        write(out, name, cfg, [f"{note}: quasi-thin, non-Kleinian, {len(prof.orthogonals)} orthogonals"], dry_run)


def build_catalog(out: Path, dry_run=False):
    for n in range(1, 9):
        t = time.time()
        reps = catalog_slice(n)
        log.info("degree %d: %d schemes (%.1fs)", n, len(reps), time.time() - t)
        for k, cfg in enumerate(reps, 1):
            write(out / "catalog", f"deg{n}-{k:02d}.txt", cfg, [
                f"id: {n}-{k}",
                "scheme of degree <= 8, enumerated as a coherent fusion of the orbital scheme",
                "of a minimal transitive group (numbering is local to this corpus)",
            ], dry_run)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src" / "qtschemes" / "fixtures"))
    ap.add_argument("--only", choices=["hm", "catalog", "seeds"])
    ap.add_argument("--dry-run", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    out = Path(args.out)
    if args.only in (None, "seeds"):
        build_seeds(out, args.dry_run)
    if args.only in (None, "catalog"):
        build_catalog(out, args.dry_run)
    if args.only in (None, "hm"):
        build_hm(out, args.dry_run)
    return 0


if __name__ == "__main__":
    sys.exit(main())
