"""Command-line interface: ``qtschemes <subcommand> ...``.

Exit codes: 0 success (including negative verdicts), 1 usage error,
2 unreadable or malformed input, 3 internal assertion or failed self-test.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .io import ParseError, build_report, emit_matrix, emit_report, load_entry

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str):
    entry = load_entry(path)
    for d in entry.diagnostics:
        print(f"warning: {path}: {d}", file=sys.stderr)
    return entry


def _bool(v: bool) -> str:
    return "true" if v else "false"


def cmd_analyze(args) -> int:
    entry = _load(args.file)
    partners = [_load(p).config for p in args.partners]
    report = build_report(entry.config, partners, timing=args.timing, cap=args.cap)
    sys.stdout.write(emit_report(report, "json" if args.json else "plain"))
    return EXIT_OK


def cmd_closure(args) -> int:
    from .wl import coherent_closure

    entry = load_entry(args.file)
    cfg = coherent_closure(entry.config.matrix)
    sys.stdout.write(emit_matrix(cfg, [f"coherent closure of {args.file}", f"rank {cfg.rank}"]))
    print(f"rank = {cfg.rank}")
    return EXIT_OK


def cmd_extend(args) -> int:
    from .structure import is_1_regular
    from .wl import one_point_extension

    entry = _load(args.file)
    if not 0 <= args.point < entry.config.degree:
        print(f"error: point {args.point} out of range for degree {entry.config.degree}", file=sys.stderr)
        return EXIT_USAGE
    ext = one_point_extension(entry.config, args.point)
    sys.stdout.write(emit_matrix(ext, [f"one-point extension of {args.file} at {args.point}", f"rank {ext.rank}"]))
    print(f"rank = {ext.rank}")
    print(f"fibers = {len(ext.fibers)}")
    print(f"1-regular = {_bool(is_1_regular(ext))}")
    return EXIT_OK


def cmd_compare(args) -> int:
    from .algiso import find_algebraic_isomorphisms, realize
    from .perm import find_isomorphism

    a, b = _load(args.a).config, _load(args.b).config
    iso = find_isomorphism(a, b, cap=args.cap)
    print(f"isomorphic = {_bool(iso is not None)}")
    if iso is not None:
        print(f"isomorphism = {list(iso)}")
    if args.algebraic or args.realize:
        ais = find_algebraic_isomorphisms(a, b, limit=args.limit)
        print("[algebraic]")
        print(f"found = {_bool(bool(ais))}")
        print(f"count = {len(ais)}")
        if args.realize:
            realized = sum(1 for phi in ais if realize(phi, cap=args.cap) is not None)
            print("[realize]")
            print(f"realized = {realized}")
            print(f"unrealized = {len(ais) - realized}")
    return EXIT_OK


def _summary_row(path: str):
    from .quasithin import is_kleinian, is_quasi_thin
    from .perm import is_schurian

    entry = load_entry(path)
    x = entry.config
    qt = entry.coherent and is_quasi_thin(x)
    v = is_kleinian(x) if qt else None
    schurian = is_schurian(x) if entry.coherent and x.degree <= 64 else None
    return {
        "name": Path(path).name,
        "degree": x.degree,
        "rank": x.rank,
        "coherent": entry.coherent,
        "quasi_thin": qt,
        "kleinian": bool(v and v.kleinian),
        "index": v.index if v else None,
        "schurian": schurian,
    }


def cmd_catalog(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        print(f"error: {root} is not a directory", file=sys.stderr)
        return EXIT_PARSE
    files = sorted(str(p) for p in root.glob("*.txt"))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_summary_row, files))
    else:
        rows = [_summary_row(f) for f in files]
    if args.filter == "quasi-thin":
        rows = [r for r in rows if r["quasi_thin"]]
    elif args.filter == "kleinian":
        rows = [r for r in rows if r["kleinian"]]
    cols = ["name", "degree", "rank", "coherent", "quasi_thin", "kleinian", "index", "schurian"]
    table = [cols] + [[_cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(row[k]) for row in table) for k in range(len(cols))]
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return EXIT_OK


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return _bool(v)
    return str(v)


def cmd_selftest(args) -> int:
    from . import acceptance

    chosen = acceptance.CRITERIA
    if args.criterion:
        chosen = [acceptance.CRITERIA[k - 1] for k in args.criterion]
    failed = 0
    for fn in chosen:
        for check in fn():
            print(check.line(), flush=True)
            failed += not check.ok
    print(f"{failed} check(s) failed")
    return EXIT_OK if failed == 0 else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qtschemes", description="Coherent configurations and quasi-thin schemes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="full report for one relation matrix")
    p.add_argument("file")
    p.add_argument("--partners", nargs="*", default=[], help="schemes to test separability against")
    p.add_argument("--json", action="store_true", help="JSON instead of the plain report")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings")
    p.add_argument("--cap", type=int, default=64, help="largest degree for automorphism searches")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("closure", help="coherent closure of a seed matrix")
    p.add_argument("file")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("extend", help="one-point extension")
    p.add_argument("file")
    p.add_argument("--point", type=int, required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("compare", help="isomorphism and algebraic isomorphism verdicts")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--algebraic", action="store_true")
    p.add_argument("--realize", action="store_true", help="try to realize every algebraic isomorphism")
    p.add_argument("--limit", type=int, default=None, help="stop after this many algebraic isomorphisms")
    p.add_argument("--cap", type=int, default=64)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("catalog", help="batch summary of a directory of relation matrices")
    p.add_argument("dir")
    p.add_argument("--filter", choices=["quasi-thin", "kleinian"])
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--criterion", type=int, nargs="*", choices=range(1, 9))
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
