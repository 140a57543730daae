"""Reading relation matrices and writing matrices and analysis reports.

File format: the first non-comment line is the degree ``n``; the next ``n``
lines hold ``n`` whitespace-separated non-negative color indices.  Lines that
are blank or start with ``#`` are ignored.  Rows written as ``n`` packed
single digits (the shape used by published scheme catalogs) are recognised
as well, with or without the degree line.
"""

from __future__ import annotations

import json
import re
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import ColorMatrixConfiguration, from_color_matrix, properties, verify_coherence


class ParseError(ValueError):
    pass


@dataclass
class CatalogEntry:
    source: str
    declared_degree: int
    declared_id: Optional[str]
    config: ColorMatrixConfiguration
    diagnostics: list = field(default_factory=list)
    coherent: bool = True


_ID_COMMENT = re.compile(r"^#\s*id\s*[:=]\s*(\S+)")
_ID_NAME = re.compile(r"(\d+-\d+)$")


def _rows(lines: Sequence[str], n: int, source: str) -> np.ndarray:
    if len(lines) != n:
        raise ParseError(f"{source}: expected {n} rows, found {len(lines)}")
    tokens = [ln.split() for ln in lines]
    packed = all(len(t) == 1 and len(t[0]) == n and t[0].isdigit() for t in tokens) and n > 1
    out = np.empty((n, n), dtype=np.int64)
    for r, toks in enumerate(tokens):
        cells = list(toks[0]) if packed else toks
        if len(cells) != n:
            raise ParseError(f"{source}: row {r + 1} has {len(cells)} entries, expected {n}")
        for c, tok in enumerate(cells):
            if not re.fullmatch(r"\d+", tok):
                raise ParseError(f"{source}: row {r + 1} has non-integer token {tok!r}")
            out[r, c] = int(tok)
    return out


def parse_relation_matrix(text: str, source: str = "<string>") -> CatalogEntry:
    declared_id = None
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _ID_COMMENT.match(line)
            if m:
                declared_id = m.group(1)
            continue
        body.append(line)
    if not body:
        raise ParseError(f"{source}: no data")
    first = body[0].split()
    if len(first) == 1 and first[0].isdigit() and int(first[0]) == 0:
        raise ParseError(f"{source}: degree must be positive")
    if len(first) == 1 and first[0].isdigit() and int(first[0]) == len(body) - 1:
        n = int(first[0])
        matrix = _rows(body[1:], n, source)
    elif all(len(ln.split()) == 1 and ln.isdigit() and len(ln) == len(body) for ln in body):
        n = len(body)
        matrix = _rows(body, n, source)
    elif len(first) == 1 and first[0].isdigit():
        n = int(first[0])
        matrix = _rows(body[1:], n, source)
    else:
        raise ParseError(f"{source}: first line must be the degree")
    if declared_id is None:
        m = _ID_NAME.search(Path(source).stem)
        declared_id = m.group(1) if m else None
    diagnostics = []
    values = np.unique(matrix)
    if values[0] != 0 or values[-1] != len(values) - 1:
        diagnostics.append(f"color indices {values.tolist()} have gaps; renumbered")
    cfg = from_color_matrix(matrix, name=declared_id or Path(source).stem)
    report = verify_coherence(cfg)
    if not report:
        diagnostics.append(f"not coherent: {report.axiom} {report.witness}")
    return CatalogEntry(source, n, declared_id, cfg, diagnostics, bool(report))


def load_entry(path) -> CatalogEntry:
    path = Path(path)
    return parse_relation_matrix(path.read_text(), source=str(path))


def emit_matrix(cfg: ColorMatrixConfiguration, comments: Sequence[str] = ()) -> str:
    width = len(str(cfg.rank - 1))
    lines = [f"# {c}" for c in comments]
    lines.append(str(cfg.degree))
    for row in cfg.matrix:
        lines.append(" ".join(str(int(x)).rjust(width) for x in row))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def build_report(
    cfg: ColorMatrixConfiguration,
    partners: Sequence[ColorMatrixConfiguration] = (),
    timing: bool = False,
    cap: int = 64,
) -> OrderedDict:
    """Analysis bundle for one configuration, with a fixed key order."""
    from .algiso import separability_verdict
    from .perm import automorphism_group, orbital_configuration
    from .quasithin import is_kleinian, is_quasi_thin, klein_analysis_of, orthogonal_profile

    clock = OrderedDict()
    t0 = time.perf_counter()
    rep = OrderedDict()
    rep["name"] = cfg.name
    coherent = bool(verify_coherence(cfg))
    props = OrderedDict(degree=cfg.degree, rank=cfg.rank, coherent=coherent)
    if not coherent:
        rep["properties"] = props
        return rep
    p = properties(cfg)
    props["homogeneous"] = p.is_homogeneous
    props["commutative"] = p.is_commutative
    props["fibers"] = len(p.fibers)
    props["valencies"] = sorted(int(v) for v in cfg.tensor.valency)
    rep["properties"] = props
    qt = is_quasi_thin(cfg)
    rep["quasi_thin"] = qt
    if qt:
        prof = orthogonal_profile(cfg)
        rep["orthogonals"] = OrderedDict(
            count=len(prof.orthogonals),
            colors=sorted(prof.orthogonals),
            thin=sorted(o for o in prof.orthogonals if cfg.tensor.valency[o] == 1),
        )
        kv = is_kleinian(cfg)
        k = OrderedDict(kleinian=kv.kleinian, index=kv.index)
        if kv.kleinian:
            ka = klein_analysis_of(cfg)
            k["geometry"] = ka.verdict
            k["transversal"] = len(ka.transversal)
        rep["kleinian"] = k
    clock["structure"] = time.perf_counter() - t0
    if cfg.degree <= cap:
        t1 = time.perf_counter()
        group = automorphism_group(cfg, cap)
        rep["automorphisms"] = OrderedDict(order=group.order, orbits=len(group.orbits))
        rep["schurian"] = orbital_configuration(group).same_partition(cfg)
        clock["automorphisms"] = time.perf_counter() - t1
        if partners:
            t2 = time.perf_counter()
            sv = separability_verdict(cfg, partners)
            rep["separability"] = OrderedDict(
                relative_to=list(sv.partners),
                all_realized=sv.all_realized,
                refuted_by=sv.refuted_by[0] if sv.refuted_by else None,
                checked=sv.checked,
            )
            clock["separability"] = time.perf_counter() - t2
    else:
        rep["schurian"] = None
    if timing:
        rep["timing"] = OrderedDict((k, round(v, 4)) for k, v in clock.items())
    return rep


def _plain_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_plain_value(x) for x in v) + "]"
    return str(v)


def emit_report(report: OrderedDict, fmt: str = "plain") -> str:
    """Plain ``key = value`` text with ``[section]`` headers, or JSON."""
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt != "plain":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = []
    flat = [(k, v) for k, v in report.items() if not isinstance(v, dict)]
    for k, v in flat:
        lines.append(f"{k} = {_plain_value(v)}")
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"[{k}]")
            for kk, vv in v.items():
                lines.append(f"{kk} = {_plain_value(vv)}")
    return "\n".join(lines) + "\n"
