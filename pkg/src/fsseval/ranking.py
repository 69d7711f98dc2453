"""Within-field percentile / ratio rankings and unit rankings.

Unit aggregation only ever reads standardized FSS. Percentiles are
ordinal and are never summed or averaged across researchers.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .indicators import ResearcherScore, UnitScore


@dataclass(frozen=True)
class RankEntry:
    researcher_id: str
    fss: float
    percentile: float
    ratio_to_avg: float | None


@dataclass(frozen=True)
class RankedList:
    field_id: str
    entries: tuple[RankEntry, ...]
    productive_mean: float | None

    @property
    def ratio_defined(self) -> bool:
        return self.productive_mean is not None


def _percentiles(values: Sequence[float]) -> list[float]:
    """Midrank percentile on 0..100 (worst to best) for every value."""
    n = len(values)
    if n == 1:
        return [100.0]
    ordered = sorted(values)
    out = []
    for v in values:
        lower = bisect.bisect_left(ordered, v)
        tied = bisect.bisect_right(ordered, v) - lower - 1
        out.append(100.0 * (lower + 0.5 * tied) / (n - 1))
    return out


def rank_field(scores: Sequence[ResearcherScore]) -> RankedList:
    """Rank one field's researchers by FSS.

    ``ratio_to_avg`` divides by the mean FSS of the productive researchers
    and is ``None`` when the field has none.
    """
    if not scores:
        raise ValueError("rank_field needs at least one score")
    fields = {s.field_id for s in scores}
    if len(fields) != 1:
        raise ValueError(f"scores span several fields: {sorted(map(str, fields))}")
    productive = [s.fss for s in scores if s.fss > 0]
    mean = sum(productive) / len(productive) if productive else None
    pct = _percentiles([s.fss for s in scores])
    entries = [
        RankEntry(s.researcher_id, s.fss, p, None if mean is None else s.fss / mean)
        for s, p in zip(scores, pct)
    ]
    entries.sort(key=lambda e: (-e.fss, e.researcher_id))
    return RankedList(str(fields.pop()), tuple(entries), mean)


def rank_all_fields(scores: Iterable[ResearcherScore]) -> list[RankedList]:
    """One ranked list per field, fields in sorted order.

    Researchers without a field cannot be compared and are left out.
    """
    groups: dict[str, list[ResearcherScore]] = defaultdict(list)
    for s in scores:
        if s.field_id is not None:
            groups[s.field_id].append(s)
    return [rank_field(groups[f]) for f in sorted(groups)]


def annotate(scores: Iterable[ResearcherScore], ranked: Iterable[RankedList]) -> list[ResearcherScore]:
    """Copy percentile and ratio_to_avg from the ranked lists onto the scores."""
    lookup = {e.researcher_id: e for rl in ranked for e in rl.entries}
    out = []
    for s in scores:
        e = lookup.get(s.researcher_id)
        out.append(s if e is None else replace(s, percentile=e.percentile, ratio_to_avg=e.ratio_to_avg))
    return out


@dataclass(frozen=True)
class UnitReportRow:
    rank: int
    unit: UnitScore


@dataclass(frozen=True)
class UnitReport:
    rows: tuple[UnitReportRow, ...]
    # names of the researcher-level quantities aggregation consumed
    provenance: tuple[str, ...] = ("fss", "field_mean_fss")


def rank_units(unit_scores: Sequence[UnitScore]) -> UnitReport:
    """Order units by FSS_U descending, ties by unit_id."""
    if not unit_scores:
        raise ValueError("rank_units needs at least one unit")
    ordered = sorted(unit_scores, key=lambda u: (-u.fss_u, u.unit_id))
    return UnitReport(tuple(UnitReportRow(i, u) for i, u in enumerate(ordered, 1)))
