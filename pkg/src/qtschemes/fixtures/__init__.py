"""Vendored fixture corpus; regenerate with ``scripts/build_fixtures.py``.

Every file starts with ``#`` comments recording how it was produced.
"""

from __future__ import annotations

from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parent
CATALOG_DIR = FIXTURE_DIR / "catalog"

HM_PAIRS = (("hm16-172", "hm16-173"), ("hm28-175", "hm28-176"))
HM_INDEX = {"hm16-172": 4, "hm16-173": 4, "hm28-175": 7, "hm28-176": 7}


def path(name: str) -> Path:
    p = FIXTURE_DIR / (name if name.endswith(".txt") else name + ".txt")
    if not p.exists():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return p


def load_entry(name: str):
    from ..io import load_entry as _load

    return _load(path(name))


def load(name: str):
    """The configuration stored in fixture ``name`` (with or without ``.txt``)."""
    return load_entry(name).config


def names(pattern: str = "*.txt") -> list:
    return sorted(p.stem for p in FIXTURE_DIR.glob(pattern))


def kleinian_names() -> list:
    return [n for pair in HM_PAIRS for n in pair] + names("kleinian*.txt")


def multi_orthogonal_names() -> list:
    """Non-Kleinian quasi-thin schemes of degree at least 9 with several orthogonals."""
    return names("polygon-*.txt")


def scheme_names() -> list:
    """Every fixture holding a coherent scheme (the closure seed is excluded)."""
    return [n for n in names() if n != "c5-seed"]


def catalog_entries(degree=None) -> list:
    from ..io import load_entry as _load

    pattern = f"deg{degree}-*.txt" if degree is not None else "deg*.txt"
    return [_load(p) for p in sorted(CATALOG_DIR.glob(pattern))]
