import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsseval.baselines import (
    FieldBaseline,
    MissingBaseline,
    Unclassifiable,
    classify_researcher,
    compute_baselines,
    hca_threshold,
    is_hca,
    normalized_citation,
    read_baselines_csv,
    realized_hca_share,
    write_baselines_csv,
)

from conftest import make_corpus, pub, researcher


def brute_threshold(values, top_share):
    """Scan every integer v from 0 upward."""
    n = len(values)
    v = 0
    while sum(1 for c in values if c >= v) / n > top_share:
        v += 1
    return v


def cell(counts, field="F1", year=2012):
    return FieldBaseline.from_counts(field, year, counts)


def test_c_bar_over_cited_only():
    b = cell([0, 5, 10, 15])
    assert b.c_bar == 10.0
    assert (b.cited_count, b.total_count) == (3, 4)
    assert b.citation_values == (0, 5, 10, 15)


def test_single_cited():
    assert cell([7]).c_bar == 7.0


def test_uncited_cell_has_no_c_bar():
    b = cell([0, 0])
    assert b.c_bar is None
    assert b.cited_count == 0 and b.total_count == 2


def test_compute_baselines_cells():
    c = make_corpus(
        [pub("P1", 0, "R1"), pub("P2", 5, "R1"), pub("P3", 10, "R1"), pub("P4", 15, "R1"),
         pub("P5", 3, "R1", field="F2"), pub("P6", 8, "R1", year=2013)],
        [researcher("R1")],
    )
    b = compute_baselines(c)
    assert set(b) == {("F1", 2012), ("F2", 2012), ("F1", 2013)}
    assert b[("F1", 2012)].c_bar == 10.0
    assert b[("F2", 2012)].c_bar == 3.0


def test_normalized_citation():
    base = {("F1", 2012): cell([0, 5, 10, 15]), ("F2", 2012): cell([0, 0])}
    assert normalized_citation(pub("a", 10, "R"), base) == 1.0
    assert normalized_citation(pub("b", 5, "R"), base) == 0.5
    assert normalized_citation(pub("c", 0, "R"), base) == 0.0
    assert normalized_citation(pub("d", 0, "R", field="F2"), base) == 0.0
    with pytest.raises(MissingBaseline):
        normalized_citation(pub("e", 3, "R", field="F2"), base)
    with pytest.raises(MissingBaseline):
        normalized_citation(pub("f", 3, "R", field="F9"), base)


def test_hca_threshold_one_to_hundred():
    b = cell(range(1, 101))
    assert hca_threshold(b, 0.10) == brute_threshold(b.citation_values, 0.10) == 91
    assert sum(1 for c in b.citation_values if c >= 91) == 10
    assert realized_hca_share(b, 0.10) == 0.10


def test_hca_threshold_all_tied():
    b = cell([5, 5, 5, 5])
    v = hca_threshold(b, 0.10)
    assert v == brute_threshold(b.citation_values, 0.10) == 6
    assert not is_hca(pub("x", 5, "R"), {("F1", 2012): b}, 0.10)


def test_hca_threshold_uncited_cell():
    b = cell([0, 0, 0])
    for share in (0.01, 0.1, 0.5, 0.99):
        assert not is_hca(pub("x", 0, "R"), {("F1", 2012): b}, share)
    assert realized_hca_share(b, 0.5) == 0.0


def test_hca_threshold_rejects_share():
    for bad in (0, 1, -0.1, 1.5):
        with pytest.raises(ValueError):
            hca_threshold(cell([1, 2]), bad)


def test_hca_threshold_gap():
    # smallest integer, not the next present value
    assert hca_threshold(cell([1, 10]), 0.5) == 2


def test_imported_baseline_has_no_distribution(tmp_path):
    base = {("F1", 2012): cell([0, 5, 10, 15]), ("F2", 2013): cell([0], "F2", 2013)}
    write_baselines_csv(base, tmp_path / "b.csv")
    back = read_baselines_csv(tmp_path / "b.csv")
    assert back[("F1", 2012)].c_bar == 10.0
    assert back[("F2", 2013)].c_bar is None
    assert normalized_citation(pub("a", 5, "R"), back) == 0.5
    with pytest.raises(MissingBaseline):
        hca_threshold(back[("F1", 2012)], 0.1)
    buf = io.StringIO()
    write_baselines_csv(base, buf)
    assert buf.getvalue() == (tmp_path / "b.csv").read_text()


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 60), min_size=1, max_size=1000),
       st.floats(0.001, 0.999))
def test_hca_threshold_matches_brute_force(values, share):
    b = cell(values)
    assert hca_threshold(b, share) == brute_threshold(b.citation_values, share)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 500), min_size=1, max_size=200), st.integers(1, 50))
def test_scaling_invariance(values, k):
    base = {("F1", 2012): cell(values)}
    scaled = {("F1", 2012): cell([v * k for v in values])}
    for i, v in enumerate(values):
        a = normalized_citation(pub(f"p{i}", v, "R"), base)
        b = normalized_citation(pub(f"p{i}", v * k, "R"), scaled)
        assert a == pytest.approx(b, rel=1e-12, abs=0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 10_000), min_size=1, max_size=300))
def test_mean_normalization_identity(values):
    b = cell(values)
    total = sum(v / b.c_bar for v in values if v > 0) if b.c_bar else 0
    assert total == pytest.approx(b.cited_count, rel=1e-12)


def test_classify_explicit_and_mode():
    c = make_corpus(
        [pub("P1", 1, "R2", field="A"), pub("P2", 1, "R2", field="A"), pub("P3", 1, "R2", field="B"),
         pub("P4", 1, "R3", field="A", year=2012), pub("P5", 1, "R3", field="B", year=2014),
         pub("P6", 1, "R4", field="Z", year=2013), pub("P7", 1, "R4", field="C", year=2013)],
        [researcher("R1", field="MAT/05"), researcher("R2", field=None),
         researcher("R3", field=None), researcher("R4", field=None), researcher("R5", field=None)],
    )
    assert classify_researcher(c, "R1") == "MAT/05"
    assert classify_researcher(c, "R2") == "A"
    assert classify_researcher(c, "R3") == "B"  # tie, most recent wins
    assert classify_researcher(c, "R4") == "C"  # tie on recency too, lexicographic
    with pytest.raises(Unclassifiable):
        classify_researcher(c, "R5")


def test_baseline_invariants():
    with pytest.raises(ValueError):
        FieldBaseline("F", 2012, None, 1, 1)
    with pytest.raises(ValueError):
        FieldBaseline("F", 2012, 2.0, 3, 2)
    with pytest.raises(ValueError):
        FieldBaseline("F", 2012, 2.0, 0, 2)
