"""Two-university fixture showing size-independent indicators penalizing extra output.

University A and B have identical staff, salaries and years. B publishes
everything A does plus additional, less-cited work. MNCS and HCA share
rank B lower; total impact and FSS rank it higher.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .baselines import FieldBaseline, compute_baselines
from .corpus import AuthorSlot, Corpus, PublicationRecord, ResearcherRecord, Window
from .credit import PolicyConfig
from .indicators import (
    fss_researcher,
    hca_share,
    mncs,
    productive_field_means,
    score_units,
    total_normalized_impact,
)

FIELD = "F1"
YEAR = 2015
STAFF = 10
TOP_SHARE = 0.10

# Reference cell whose cited-publication mean is 10 citations.
REFERENCE_BASELINE = FieldBaseline.from_counts(FIELD, YEAR, [0, 5, 15])


def _solo(pub_id: str, citations: int, rid: str, unit: str) -> PublicationRecord:
    return PublicationRecord(pub_id, YEAR, FIELD, citations, (AuthorSlot(1, rid, unit),))


def _university(unit: str, cited: list[int]) -> tuple[list[ResearcherRecord], list[PublicationRecord]]:
    """Spread ``cited`` round-robin over STAFF solo-authoring researchers."""
    staff = [
        ResearcherRecord(f"{unit}{k:02d}", unit, FIELD, salary=1.0, active_years=1.0)
        for k in range(STAFF)
    ]
    pubs = [
        _solo(f"{unit}-P{i:03d}", c, staff[i % STAFF].researcher_id, unit)
        for i, c in enumerate(cited)
    ]
    return staff, pubs


def impact_fixture() -> tuple[Corpus, dict]:
    """A: 100 articles at 10 citations. B: those plus 100 at 5 citations."""
    ra, pa = _university("A", [10] * 100)
    rb, pb = _university("B", [10] * 100 + [5] * 100)
    corpus = Corpus(tuple(pa + pb), tuple(ra + rb), Window(YEAR, YEAR))
    return corpus, {(FIELD, YEAR): REFERENCE_BASELINE}


def hca_fixture() -> tuple[Corpus, dict]:
    """A: 10 highly cited out of 100. B: 15 out of 200. Baselines pooled from A and B."""
    ra, pa = _university("A", [40] * 10 + [5] * 90)
    rb, pb = _university("B", [40] * 15 + [5] * 185)
    corpus = Corpus(tuple(pa + pb), tuple(ra + rb), Window(YEAR, YEAR))
    return corpus, compute_baselines(corpus)


@dataclass(frozen=True)
class ParadoxReport:
    mncs_a: float
    mncs_b: float
    hca_a: tuple[int, int]
    hca_b: tuple[int, int]
    impact_a: float
    impact_b: float
    fss_a: float
    fss_b: float
    fss_u_a: float
    fss_u_b: float

    @property
    def mncs_ratio(self) -> Fraction:
        return Fraction(self.mncs_b) / Fraction(self.mncs_a)

    @property
    def hca_share_ratio(self) -> Fraction:
        return Fraction(*self.hca_b) / Fraction(*self.hca_a)

    @property
    def impact_ratio(self) -> Fraction:
        return Fraction(self.impact_b) / Fraction(self.impact_a)

    @property
    def fss_ratio(self) -> Fraction:
        return Fraction(self.fss_b) / Fraction(self.fss_a)

    def table(self) -> str:
        lines = [
            f"{'indicator':<28}{'A':>12}{'B':>12}{'B/A':>8}",
            f"{'MNCS':<28}{self.mncs_a:>12.4f}{self.mncs_b:>12.4f}{float(self.mncs_ratio):>8.2f}",
            f"{'HCA share (top 10%)':<28}"
            f"{f'{self.hca_a[0]}/{self.hca_a[1]}':>12}{f'{self.hca_b[0]}/{self.hca_b[1]}':>12}"
            f"{float(self.hca_share_ratio):>8.2f}",
            f"{'total normalized impact':<28}{self.impact_a:>12.4f}{self.impact_b:>12.4f}"
            f"{float(self.impact_ratio):>8.2f}",
            f"{'FSS (mean over staff)':<28}{self.fss_a:>12.4f}{self.fss_b:>12.4f}"
            f"{float(self.fss_ratio):>8.2f}",
            f"{'FSS_U (standardized)':<28}{self.fss_u_a:>12.4f}{self.fss_u_b:>12.4f}"
            f"{self.fss_u_b / self.fss_u_a:>8.2f}",
        ]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "mncs": {"A": self.mncs_a, "B": self.mncs_b, "ratio": float(self.mncs_ratio)},
            "hca_share": {
                "A": list(self.hca_a), "B": list(self.hca_b),
                "ratio": float(self.hca_share_ratio),
            },
            "total_normalized_impact": {
                "A": self.impact_a, "B": self.impact_b, "ratio": float(self.impact_ratio),
            },
            "fss": {"A": self.fss_a, "B": self.fss_b, "ratio": float(self.fss_ratio)},
            "fss_u": {"A": self.fss_u_a, "B": self.fss_u_b},
        }


def _unit_pubs(corpus: Corpus, unit: str) -> list[PublicationRecord]:
    return [p for p in corpus.publications if p.byline[0].institution_id == unit]


def paradox_demo() -> ParadoxReport:
    corpus, base = impact_fixture()
    pa, pb = _unit_pubs(corpus, "A"), _unit_pubs(corpus, "B")

    policy = PolicyConfig()
    scores = [fss_researcher(corpus, base, policy, r) for r in corpus.researcher_ids]
    fss = {u: sum(s.fss for s in scores if s.unit_id == u) / STAFF for u in "AB"}
    units = {u.unit_id: u for u in score_units(scores, productive_field_means(scores))}

    hcorpus, hbase = hca_fixture()
    ha, _ = hca_share(_unit_pubs(hcorpus, "A"), hbase, TOP_SHARE)
    hb, _ = hca_share(_unit_pubs(hcorpus, "B"), hbase, TOP_SHARE)

    return ParadoxReport(
        mncs_a=mncs(pa, base),
        mncs_b=mncs(pb, base),
        hca_a=(ha, len(_unit_pubs(hcorpus, "A"))),
        hca_b=(hb, len(_unit_pubs(hcorpus, "B"))),
        impact_a=total_normalized_impact(pa, base),
        impact_b=total_normalized_impact(pb, base),
        fss_a=fss["A"],
        fss_b=fss["B"],
        fss_u_a=units["A"].fss_u,
        fss_u_b=units["B"].fss_u,
    )
