"""Researcher and unit productivity (FSS) plus the size-independent contrast indicators."""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .baselines import (
    BaselineMap,
    Unclassifiable,
    classify_researcher,
    is_hca,
    normalized_citation,
    normalized_citation_exact,
)
from .corpus import Corpus, PublicationRecord, decimal_fraction, researcher_publications
from .credit import PolicyConfig, byline_weights_exact

log = logging.getLogger(__name__)


class EmptyPortfolio(ValueError):
    pass


@dataclass(frozen=True)
class ResearcherScore:
    researcher_id: str
    field_id: str | None
    fss: float
    n_pubs: int
    unit_id: str = ""
    percentile: float | None = None
    ratio_to_avg: float | None = None

    @property
    def productive(self) -> bool:
        return self.fss > 0


@dataclass(frozen=True)
class UnitScore:
    unit_id: str
    fss_u: float
    rs: int
    # field_id -> (staff count, sum of standardized FSS)
    by_field: Mapping[str, tuple[int, float]] = field(default_factory=dict)
    # staff whose field has no productive researcher (or no field at all)
    flagged: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rs < 1:
            raise ValueError("rs must be >= 1")


# --------------------------------------------------------------------------
# FSS

def fss_researcher(
    corpus: Corpus,
    baselines: BaselineMap,
    policy_config: PolicyConfig,
    researcher_id: str,
) -> ResearcherScore:
    """Salary- and time-normalized sum of fractionalized, field-normalized citations."""
    rec = corpus.researcher(researcher_id)
    pubs = researcher_publications(corpus, researcher_id)
    # Exact arithmetic, one rounding at the end: mathematically equal
    # productivities come out bit-identical, so rankings tie them reliably.
    impact = sum(
        (
            normalized_citation_exact(pub, baselines)
            * byline_weights_exact(pub.byline, policy_config.policy_for(pub.field_id))[position - 1]
            for pub, position in pubs
        ),
        Fraction(0),
    )
    # salaries and years are read as the decimals written in the roster
    cost = decimal_fraction(corpus.salary(researcher_id)) * decimal_fraction(
        corpus.active_years(researcher_id)
    )
    fss = float(impact / cost)
    try:
        field_id = classify_researcher(corpus, researcher_id)
    except Unclassifiable:
        field_id = None
    return ResearcherScore(researcher_id, field_id, fss, len(pubs), rec.unit_id)


def _score_chunk(args):
    corpus, baselines, policy_config, ids = args
    return [fss_researcher(corpus, baselines, policy_config, rid) for rid in ids]


def score_all(
    corpus: Corpus,
    baselines: BaselineMap,
    policy_config: PolicyConfig,
    jobs: int = 1,
) -> list[ResearcherScore]:
    """Score every researcher in roster order. Output order ignores ``jobs``."""
    ids = list(corpus.researcher_ids)
    if jobs <= 1 or len(ids) < 2:
        return _score_chunk((corpus, baselines, policy_config, ids))
    size = -(-len(ids) // (jobs * 4))
    chunks = [ids[i:i + size] for i in range(0, len(ids), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(
            _score_chunk, [(corpus, dict(baselines), policy_config, c) for c in chunks]
        )
        return [s for part in parts for s in part]


def productive_field_means(scores: Iterable[ResearcherScore]) -> dict[str, float]:
    """Mean FSS per field over researchers with FSS above zero."""
    acc: dict[str, list[float]] = defaultdict(list)
    for s in scores:
        if s.field_id is not None and s.fss > 0:
            acc[s.field_id].append(s.fss)
    return {f: sum(v) / len(v) for f, v in sorted(acc.items())}


def fss_unit(
    unit_id: str,
    staff: Sequence[ResearcherScore],
    field_means: Mapping[str, float],
) -> UnitScore:
    """Mean over the unit's staff of FSS divided by the staff member's field mean.

    Unproductive staff count in the headcount with a zero term. Staff whose
    field has no productive researcher also add zero and are flagged.
    """
    if not staff:
        raise ValueError(f"unit {unit_id!r} has an empty roster")
    total = 0.0
    by_field: dict[str, list] = {}
    flagged = []
    for s in staff:
        mean = field_means.get(s.field_id) if s.field_id is not None else None
        if mean is None:
            flagged.append(s.researcher_id)
            term = 0.0
        else:
            term = s.fss / mean
        total += term
        key = s.field_id if s.field_id is not None else ""
        slot = by_field.setdefault(key, [0, 0.0])
        slot[0] += 1
        slot[1] += term
    return UnitScore(
        unit_id,
        total / len(staff),
        len(staff),
        {f: (c, v) for f, (c, v) in sorted(by_field.items())},
        tuple(flagged),
    )


def score_units(
    scores: Sequence[ResearcherScore], field_means: Mapping[str, float] | None = None
) -> list[UnitScore]:
    """Group researcher scores by ``unit_id`` and score each unit."""
    if field_means is None:
        field_means = productive_field_means(scores)
    rosters: dict[str, list[ResearcherScore]] = defaultdict(list)
    for s in scores:
        rosters[s.unit_id].append(s)
    return [fss_unit(u, rosters[u], field_means) for u in sorted(rosters)]


# --------------------------------------------------------------------------
# contrast indicators

def h_index(citation_counts: Iterable[int]) -> int:
    """Largest h such that h of the counts are at least h."""
    h = 0
    for i, c in enumerate(sorted(citation_counts, reverse=True), 1):
        if c < i:
            break
        h = i
    return h


def total_normalized_impact(
    pubs: Iterable[PublicationRecord], baselines: BaselineMap
) -> float:
    return sum(normalized_citation(p, baselines) for p in pubs)


def mncs(pubs: Sequence[PublicationRecord], baselines: BaselineMap) -> float:
    """Mean normalized citation score of a portfolio."""
    if not pubs:
        raise EmptyPortfolio("mncs of an empty portfolio")
    return total_normalized_impact(pubs, baselines) / len(pubs)


def hca_share(
    pubs: Sequence[PublicationRecord], baselines: BaselineMap, top_share: float = 0.10
) -> tuple[int, float]:
    """(count, share) of publications in the top ``top_share`` of their cell."""
    if not pubs:
        raise EmptyPortfolio("hca_share of an empty portfolio")
    count = sum(1 for p in pubs if is_hca(p, baselines, top_share))
    return count, count / len(pubs)


@dataclass(frozen=True)
class IndicatorRow:
    researcher_id: str
    field_id: str | None
    fss: float
    n_pubs: int
    h_index: int
    mncs: float | None
    hca_count: int
    hca_share: float | None
    total_normalized_impact: float


def indicator_rows(
    corpus: Corpus,
    baselines: BaselineMap,
    scores: Sequence[ResearcherScore],
    top_share: float = 0.10,
) -> list[IndicatorRow]:
    """FSS next to h-index, MNCS and HCA share for every scored researcher.

    MNCS and HCA share are blank for researchers without publications. HCA
    columns need baselines that carry the citation distribution.
    """
    rows = []
    for s in scores:
        pubs = [p for p, _ in researcher_publications(corpus, s.researcher_id)]
        if pubs:
            m = mncs(pubs, baselines)
            count, share = hca_share(pubs, baselines, top_share)
        else:
            m, count, share = None, 0, None
        rows.append(IndicatorRow(
            s.researcher_id,
            s.field_id,
            s.fss,
            s.n_pubs,
            h_index(p.citations for p in pubs),
            m,
            count,
            share,
            total_normalized_impact(pubs, baselines),
        ))
    return rows
