import json

import numpy as np
import pytest
from hypothesis import given

from conftest import closures
from qtschemes import fixtures
from qtschemes.cli import EXIT_PARSE, EXIT_USAGE, main
from qtschemes.constructions import trivial_scheme
from qtschemes.io import ParseError, build_report, emit_matrix, emit_report, load_entry, parse_relation_matrix


def test_parse_trivial():
    e = parse_relation_matrix("2\n0 1\n1 0\n")
    assert e.config.same_partition(trivial_scheme(2)) and e.coherent and not e.diagnostics


def test_parse_packed_rows():
    e = fixtures.load_entry("klein-packed")
    assert e.config.degree == 4 and e.config.rank == 4 and e.coherent


def test_comments_and_declared_id():
    e = parse_relation_matrix("# id: 3-1\n# more\n\n3\n0 1 1\n1 0 1\n1 1 0\n")
    assert e.declared_id == "3-1" and e.declared_degree == 3


@pytest.mark.parametrize(
    "text",
    ["", "# only comments\n", "x\n0 1\n1 0\n", "3\n0 1 1\n1 0 1\n", "2\n0 1\n1 a\n", "2\n0 1 2\n1 0\n", "0\n"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_relation_matrix(text)


def test_gap_and_coherence_diagnostics():
    e = parse_relation_matrix("2\n0 5\n5 0\n")
    assert any("gaps" in d for d in e.diagnostics)
    e = parse_relation_matrix("3\n0 1 2\n1 0 2\n2 1 0\n")
    assert not e.coherent and any("not coherent" in d for d in e.diagnostics)


@given(closures(max_degree=7))
def test_emit_parse_round_trip(x):
    text = emit_matrix(x, ["round trip"])
    y = parse_relation_matrix(text).config
    assert np.array_equal(y.matrix, x.matrix)
    assert emit_matrix(y, ["round trip"]) == text


def test_report_trivial():
    rep = build_report(trivial_scheme(3))
    assert rep["properties"]["rank"] == 2 and rep["schurian"] is True
    assert list(rep)[:3] == ["name", "properties", "quasi_thin"]


def test_report_non_schurian(hm):
    rep = build_report(hm["hm16-173"])
    assert rep["kleinian"]["kleinian"] and rep["kleinian"]["index"] == 4
    assert rep["kleinian"]["geometry"] == "affine-plane-2"
    assert rep["schurian"] is False


def test_report_is_deterministic(hm):
    x = hm["hm28-176"]
    a = emit_report(build_report(x, [hm["hm28-175"]]))
    b = emit_report(build_report(x, [hm["hm28-175"]]))
    assert a == b
    j = json.loads(emit_report(build_report(x), "json"))
    assert j["automorphisms"]["order"] == 8
    with pytest.raises(ValueError):
        emit_report(build_report(x), "xml")


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_analyze(capsys):
    code, out, _ = _run(capsys, "analyze", fixtures.path("hm16-173"))
    assert code == 0 and "schurian = false" in out and "[kleinian]" in out and "index = 4" in out
    code, out, _ = _run(capsys, "analyze", fixtures.path("hm16-173"), "--json", "--timing")
    assert code == 0 and "timing" in json.loads(out)


def test_cli_analyze_separability(capsys):
    code, out, _ = _run(capsys, "analyze", fixtures.path("hm28-176"), "--partners", fixtures.path("hm28-175"))
    assert code == 0 and "[separability]" in out and "all_realized = false" in out


def test_cli_compare(capsys):
    a, b = fixtures.path("hm28-175"), fixtures.path("hm28-176")
    code, out, _ = _run(capsys, "compare", a, b, "--algebraic", "--realize")
    assert code == 0
    assert "isomorphic = false" in out and "found = true" in out and "count = 12" in out and "realized = 0" in out
    # the degree-16 fixtures have no algebraic isomorphism between them (see README)
    code, out, _ = _run(capsys, "compare", fixtures.path("hm16-172"), fixtures.path("hm16-173"), "--algebraic")
    assert code == 0 and "found = false" in out
    code, out, _ = _run(capsys, "compare", a, a)
    assert "isomorphic = true" in out


def test_cli_closure(capsys):
    code, out, _ = _run(capsys, "closure", fixtures.path("c5-seed"))
    assert code == 0 and out.strip().endswith("rank = 3")


def test_cli_extend(capsys):
    code, out, _ = _run(capsys, "extend", fixtures.path("polygon-10"), "--point", 0)
    assert code == 0 and "1-regular = true" in out
    code, _, err = _run(capsys, "extend", fixtures.path("polygon-10"), "--point", 99)
    assert code == EXIT_USAGE and "out of range" in err


def test_cli_catalog(capsys, tmp_path):
    for name in ("polygon-9", "kleinian12-1", "klein-packed"):
        (tmp_path / f"{name}.txt").write_text(fixtures.path(name).read_text())
    code, out, _ = _run(capsys, "catalog", tmp_path)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].split()[0] == "name"
    assert [ln.split()[0] for ln in lines[1:]] == ["klein-packed.txt", "kleinian12-1.txt", "polygon-9.txt"]
    code, out, _ = _run(capsys, "catalog", tmp_path, "--filter", "kleinian")
    assert [ln.split()[0] for ln in out.strip().splitlines()[1:]] == ["kleinian12-1.txt"]
    code, out2, _ = _run(capsys, "catalog", tmp_path, "--filter", "kleinian", "--jobs", 2)
    assert out2 == out


def test_cli_exit_codes(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["extend", str(fixtures.path("polygon-9"))])
    assert exc.value.code == EXIT_USAGE
    assert main(["analyze", str(tmp_path / "missing.txt")]) == EXIT_PARSE
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n0 1\n")
    assert main(["analyze", str(bad)]) == EXIT_PARSE
    assert main(["catalog", str(bad)]) == EXIT_PARSE
    capsys.readouterr()


def test_cli_selftest_single_criterion(capsys):
    code, out, _ = _run(capsys, "selftest", "--criterion", 7)
    assert code == 0 and "PASS criterion 7" in out and out.strip().endswith("0 check(s) failed")
