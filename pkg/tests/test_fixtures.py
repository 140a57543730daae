import pytest

from qtschemes import fixtures
from qtschemes.config import verify_coherence
from qtschemes.perm import find_isomorphism

# number of schemes of each degree 1..8 up to isomorphism
CATALOG_COUNTS = [1, 1, 2, 4, 3, 8, 4, 21]


@pytest.mark.parametrize("degree", range(1, 9))
def test_catalog_counts(degree):
    entries = fixtures.catalog_entries(degree)
    assert len(entries) == CATALOG_COUNTS[degree - 1]
    assert [e.declared_id for e in entries] == [f"{degree}-{k}" for k in range(1, len(entries) + 1)]


@pytest.mark.parametrize("degree", [4, 6, 8])
def test_catalog_is_pairwise_non_isomorphic(degree):
    cfgs = [e.config for e in fixtures.catalog_entries(degree)]
    for i, a in enumerate(cfgs):
        for b in cfgs[i + 1:]:
            if a.rank == b.rank:
                assert find_isomorphism(a, b) is None


@pytest.mark.parametrize("name", fixtures.names())
def test_fixtures_parse_cleanly_with_provenance(name):
    entry = fixtures.load_entry(name)
    assert fixtures.path(name).read_text().startswith("#")
    assert not [d for d in entry.diagnostics if "gaps" in d]
    if name != "c5-seed":
        assert entry.coherent and verify_coherence(entry.config)


def test_catalog_entries_coherent():
    assert all(e.coherent for e in fixtures.catalog_entries())


def test_unknown_fixture():
    with pytest.raises(FileNotFoundError):
        fixtures.path("no-such-fixture")
