"""Exit criteria. Each test records its criterion; the terminal summary
prints one PASS/FAIL line per criterion."""

from __future__ import annotations

import math
import random
import time
from collections import Counter
from decimal import Decimal
from fractions import Fraction

import pytest

from fsseval.baselines import FieldBaseline, compute_baselines, normalized_citation
from fsseval.cli import main
from fsseval.corpus import AuthorSlot, Corpus, PublicationRecord, ResearcherRecord, Window, load_corpus
from fsseval.credit import EQUAL_SPLIT, FIRST_LAST_EMPHASIS, PolicyConfig, byline_weights
from fsseval.indicators import (
    fss_researcher,
    fss_unit,
    h_index,
    mncs,
    productive_field_means,
    score_all,
)
from fsseval.paradox import paradox_demo
from fsseval.ranking import rank_all_fields
from fsseval.synth import SynthConfig, generate, lotka_slope

WINDOW = (2010, 2014)


@pytest.fixture
def criterion(record_property):
    def _set(name):
        record_property("criterion", name)
    return _set


@pytest.fixture(scope="module")
def synth_10k(tmp_path_factory):
    """Seed-fixed 10,000-researcher corpus, loaded and scored once."""
    d = tmp_path_factory.mktemp("synth10k")
    cfg = SynthConfig(n_researchers=10_000, seed=20240601, p_missing_salary=0.05)
    pubs, res = generate(cfg, d)
    corpus = load_corpus(pubs, res, cfg.window)
    baselines = compute_baselines(corpus)
    policy = PolicyConfig({"F01": FIRST_LAST_EMPHASIS, "F02": FIRST_LAST_EMPHASIS})
    scores = score_all(corpus, baselines, policy)
    return corpus, baselines, policy, scores


def brute_h(counts):
    best = 0
    for h in range(len(counts) + 1):
        if sum(1 for c in counts if c >= h) >= h:
            best = h
    return best


def test_ac1_paradox_reproduction(criterion):
    criterion("AC1 paradox: MNCS 0.75, HCA share 0.75, impact 1.50, FSS 1.50, < 1 s")
    t0 = time.perf_counter()
    r = paradox_demo()
    elapsed = time.perf_counter() - t0
    assert r.mncs_ratio == Fraction(3, 4)
    assert r.hca_a == (10, 100) and r.hca_b == (15, 200)
    assert r.hca_share_ratio == Fraction(3, 4)
    assert r.impact_ratio == Fraction(3, 2)
    assert r.fss_ratio == Fraction(3, 2)
    assert elapsed < 1.0


def _random_byline(rng, rid, n):
    pos = rng.randint(1, n)
    insts = [rng.choice("IJ") for _ in range(n)]
    return tuple(
        AuthorSlot(k, rid if k == pos else "-", insts[k - 1]) for k in range(1, n + 1)
    )


def test_ac2_fss_monotonicity(criterion):
    criterion("AC2 FSS never decreases when a publication is appended (10,000 trials, < 10 s)")
    rng = random.Random(2)
    # baselines are a fixed reference population, independent of the portfolio
    base = {(f, y): FieldBaseline.from_counts(f, y, [0, 1, 3, 8, 20, 55])
            for f in ("A", "B") for y in range(2010, 2015)}
    policies = [PolicyConfig(), PolicyConfig({"A": FIRST_LAST_EMPHASIS})]
    t0 = time.perf_counter()
    violations = 0
    for trial in range(10_000):
        res = (ResearcherRecord("R", "U", "A", rng.uniform(0.5, 3), rng.choice([1, 2.5, 5])),)
        pubs = [
            PublicationRecord(f"P{i}", rng.randint(2010, 2014), rng.choice("AB"),
                              rng.randint(0, 200), _random_byline(rng, "R", rng.randint(1, 8)))
            for i in range(rng.randint(0, 12))
        ]
        new = PublicationRecord(f"P{rng.randint(0, 99):02d}x", rng.randint(2010, 2014), rng.choice("AB"),
                                rng.randint(0, 200), _random_byline(rng, "R", rng.randint(1, 8)))
        policy = policies[trial % 2]
        before = fss_researcher(Corpus(tuple(pubs), res, Window(*WINDOW)), base, policy, "R").fss
        after = fss_researcher(Corpus(tuple(pubs) + (new,), res, Window(*WINDOW)), base, policy, "R").fss
        violations += after < before
    assert violations == 0
    assert time.perf_counter() - t0 < 10


def test_ac3_mncs_axiom_violation(criterion):
    criterion("AC3 MNCS strictly drops on appending a below-mean publication (10,000 trials)")
    rng = random.Random(3)
    base = {("A", 2012): FieldBaseline.from_counts("A", 2012, [4, 16])}  # c_bar 10

    def p(i, c):
        return PublicationRecord(f"P{i}", 2012, "A", c, (AuthorSlot(1, "R", "I"),))

    drops = trials = 0
    while trials < 10_000:
        pubs = [p(i, rng.randint(0, 300)) for i in range(rng.randint(1, 40))]
        m = mncs(pubs, base)
        if m * 10 < 1:
            continue
        extra = p(len(pubs), rng.randint(0, math.ceil(m * 10) - 1))
        assert normalized_citation(extra, base) < m
        trials += 1
        drops += mncs(pubs + [extra], base) < m
    assert drops == trials == 10_000


def test_ac4_h_index_oracle(criterion):
    criterion("AC4 h-index equals brute force on 1,000 random lists (N <= 500)")
    rng = random.Random(4)
    mismatches = 0
    for _ in range(1000):
        n = rng.randint(0, 500)
        hi = rng.choice([5, 50, 500, 5000])
        counts = [rng.randint(0, hi) for _ in range(n)]
        mismatches += h_index(counts) != brute_h(counts)
    assert mismatches == 0


def test_ac5_credit_weights(criterion):
    criterion("AC5 credit weights sum to 1 within 1e-12; n=5 intramural and n=6 extramural tables")
    for n in range(1, 51):
        for same in (True, False):
            byline = tuple(
                AuthorSlot(k, f"A{k}", "X" if (k == 1 and not same) else "I") for k in range(1, n + 1)
            )
            for policy in (EQUAL_SPLIT, FIRST_LAST_EMPHASIS):
                assert abs(math.fsum(byline_weights(byline, policy)) - 1) <= 1e-12
    intra5 = tuple(AuthorSlot(k, f"A{k}", "I") for k in range(1, 6))
    extra6 = tuple(AuthorSlot(k, f"A{k}", "X" if k == 1 else "I") for k in range(1, 7))
    w5 = byline_weights(intra5, FIRST_LAST_EMPHASIS)
    w6 = byline_weights(extra6, FIRST_LAST_EMPHASIS)
    for got, want in zip(w5, (0.40, 0.20 / 3, 0.20 / 3, 0.20 / 3, 0.40)):
        assert abs(got - want) <= 1e-12
    for got, want in zip(w6, (0.30, 0.15, 0.05, 0.05, 0.15, 0.30)):
        assert abs(got - want) <= 1e-12


def test_ac6_standardization_identity(criterion, synth_10k):
    criterion("AC6 mean ratio_to_avg over productive = 1 (1e-9); single-researcher fss_u = fss/mean (1e-12)")
    corpus, _, _, scores = synth_10k
    ranked = rank_all_fields(scores)
    assert len(ranked) == 5
    for rl in ranked:
        ratios = [e.ratio_to_avg for e in rl.entries if e.fss > 0]
        assert abs(math.fsum(ratios) / len(ratios) - 1) <= 1e-9
    means = productive_field_means(scores)
    for s in scores:
        u = fss_unit(s.researcher_id, [s], means)
        assert abs(u.fss_u - s.fss / means[s.field_id]) <= 1e-12


def test_ac7_invariance(criterion, synth_10k):
    criterion("AC7 salary rescaling keeps ranks/percentiles/ratios; citation rescaling keeps normalized scores (1e-12)")
    corpus, baselines, policy, scores = synth_10k
    target = "F03"
    before = {rl.field_id: rl for rl in rank_all_fields(scores)}[target]

    def rescale(salary, k):
        # as if the roster file were rewritten with every salary times k
        return float(Decimal(repr(1.0 if salary is None else salary)) * Decimal(k))

    for k in ("1.37", "1000", "0.25"):
        rescaled = tuple(
            ResearcherRecord(r.researcher_id, r.unit_id, r.field_id,
                             rescale(r.salary, k) if r.field_id == target else r.salary,
                             r.active_years)
            for r in corpus.researchers
        )
        c2 = Corpus(corpus.publications, rescaled, corpus.window)
        after = {rl.field_id: rl for rl in rank_all_fields(score_all(c2, baselines, policy))}[target]
        assert [e.researcher_id for e in before.entries] == [e.researcher_id for e in after.entries]
        for a, b in zip(before.entries, after.entries):
            assert a.percentile == b.percentile
            assert abs(a.ratio_to_avg - b.ratio_to_avg) <= 1e-12 * max(1.0, a.ratio_to_avg)

    cell = Counter((p.field_id, p.year) for p in corpus.publications).most_common(1)[0][0]
    for m in (2, 7, 13):
        pubs = tuple(
            PublicationRecord(p.pub_id, p.year, p.field_id, p.citations * m, p.byline)
            if (p.field_id, p.year) == cell else p
            for p in corpus.publications
        )
        b2 = compute_baselines(Corpus(pubs, corpus.researchers, corpus.window))
        for old, new in zip(corpus.publications, pubs):
            if (old.field_id, old.year) == cell:
                assert abs(normalized_citation(old, baselines) - normalized_citation(new, b2)) <= 1e-12


def test_ac8_lotka_fidelity(criterion, tmp_path):
    criterion("AC8 Lotka slope within 2.0 +/- 0.3 at 10,000 researchers; seed gives byte-identical files; < 30 s")
    t0 = time.perf_counter()
    cfg = SynthConfig(n_researchers=10_000, lotka_exponent=2.0, seed=42)
    generate(cfg, tmp_path / "a")
    generate(cfg, tmp_path / "b")
    for name in ("publications.csv", "researchers.csv", "synth_meta.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    corpus = load_corpus(tmp_path / "a/publications.csv", tmp_path / "a/researchers.csv", cfg.window)
    per_researcher = Counter(s.researcher_id for p in corpus.publications for s in p.byline if s.matched)
    slope = lotka_slope(per_researcher.values())
    assert abs(slope - -2.0) <= 0.3
    assert time.perf_counter() - t0 < 30


def test_ac9_end_to_end_determinism(criterion, tmp_path):
    criterion("AC9 synth -> ingest -> baseline -> score -> rank twice gives identical reports")
    outputs = []
    for run in ("one", "two"):
        d = tmp_path / run
        assert main(["synth", "--out", str(d / "data"), "--seed", "99", "--researchers", "1500"]) == 0
        data = ["--pubs", str(d / "data/publications.csv"), "--res", str(d / "data/researchers.csv"),
                "--window", "2010:2014", "--policy", "F02=FirstLastEmphasis"]
        assert main(["ingest", *data]) == 0
        assert main(["baseline", *data, "--out", str(d / "out")]) == 0
        assert main(["score", *data, "--out", str(d / "out"), "--jobs", "2"]) == 0
        assert main(["rank", *data, "--out", str(d / "out"), "--jobs", "2"]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted((d / "out").iterdir())})
    assert set(outputs[0]) == {"baselines.csv", "scores.csv", "field_rankings.csv", "unit_rankings.csv"}
    assert outputs[0] == outputs[1]
