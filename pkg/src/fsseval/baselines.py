"""Per-(field, year) citation baselines, HCA thresholds and field classification."""

from __future__ import annotations

import bisect
import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .corpus import Corpus, PublicationRecord, researcher_publications

BASELINE_COLUMNS = ("field_id", "year", "c_bar", "cited_count", "total_count")
# appended column; optional on import
CITED_SUM = "cited_sum"

BaselineMap = Mapping[tuple[str, int], "FieldBaseline"]


class MissingBaseline(LookupError):
    def __init__(self, field_id: str, year: int, reason: str = "no baseline"):
        self.field_id = field_id
        self.year = year
        super().__init__(f"MissingBaseline({field_id!r}, {year}): {reason}")


class Unclassifiable(LookupError):
    pass


@dataclass(frozen=True)
class FieldBaseline:
    """Citation scaling factor of one (field, year) cell.

    ``c_bar`` is the mean over *cited* publications only and is ``None`` when
    the cell has none. ``citation_values`` is empty for baselines imported
    from file, which then support normalization but not HCA thresholds.
    """

    field_id: str
    year: int
    c_bar: float | None
    cited_count: int
    total_count: int
    citation_values: tuple[int, ...] = ()
    cited_sum: int | None = None

    def __post_init__(self):
        if self.cited_count > self.total_count:
            raise ValueError("cited_count exceeds total_count")
        if self.cited_count > 0 and not (self.c_bar is not None and self.c_bar > 0):
            raise ValueError(f"({self.field_id}, {self.year}): c_bar must be > 0")
        if self.cited_count == 0 and self.c_bar is not None:
            raise ValueError(f"({self.field_id}, {self.year}): c_bar set for an uncited cell")
        if self.citation_values:
            if len(self.citation_values) != self.total_count:
                raise ValueError("citation_values length differs from total_count")
            if list(self.citation_values) != sorted(self.citation_values):
                raise ValueError("citation_values must be sorted ascending")

    @property
    def c_bar_exact(self) -> Fraction | None:
        if self.c_bar is None:
            return None
        if self.cited_sum is not None:
            return Fraction(self.cited_sum, self.cited_count)
        return Fraction(self.c_bar)

    @classmethod
    def from_counts(cls, field_id: str, year: int, counts) -> "FieldBaseline":
        values = tuple(sorted(int(c) for c in counts))
        cited = [c for c in values if c > 0]
        total = sum(cited)
        c_bar = total / len(cited) if cited else None
        return cls(field_id, year, c_bar, len(cited), len(values), values, total)


def compute_baselines(corpus: Corpus) -> dict[tuple[str, int], FieldBaseline]:
    cells: dict[tuple[str, int], list[int]] = defaultdict(list)
    for pub in corpus.publications:
        cells[(pub.field_id, pub.year)].append(pub.citations)
    return {
        key: FieldBaseline.from_counts(key[0], key[1], counts)
        for key, counts in sorted(cells.items())
    }


def baseline_for(pub: PublicationRecord, baselines: BaselineMap) -> FieldBaseline:
    try:
        return baselines[(pub.field_id, pub.year)]
    except KeyError:
        raise MissingBaseline(pub.field_id, pub.year) from None


def normalized_citation(pub: PublicationRecord, baselines: BaselineMap) -> float:
    """Citations of ``pub`` divided by the mean of cited publications in its cell."""
    base = baseline_for(pub, baselines)
    if pub.citations == 0:
        return 0.0
    if base.c_bar is None:
        raise MissingBaseline(pub.field_id, pub.year, "cell has no cited publications")
    return pub.citations / base.c_bar


def normalized_citation_exact(pub: PublicationRecord, baselines: BaselineMap) -> Fraction:
    """Rational form of :func:`normalized_citation`."""
    base = baseline_for(pub, baselines)
    if pub.citations == 0:
        return Fraction(0)
    if base.c_bar is None:
        raise MissingBaseline(pub.field_id, pub.year, "cell has no cited publications")
    return pub.citations / base.c_bar_exact


def hca_threshold(baseline: FieldBaseline, top_share: float) -> int:
    """Smallest citation count v with share(citations >= v) <= top_share.

    A publication is highly cited iff its citations are >= v and v > 0.
    """
    if not 0 < top_share < 1:
        raise ValueError(f"top_share must lie in (0, 1), got {top_share}")
    values = baseline.citation_values
    if not values:
        if baseline.total_count == 0:
            raise ValueError("empty baseline cell")
        raise MissingBaseline(
            baseline.field_id, baseline.year, "citation distribution not available"
        )
    n = len(values)
    # share(>= v) only changes just above a present value, so the answer is
    # (largest present value whose share(>= value) exceeds top_share) + 1.
    i = n - 1
    while True:
        v = values[i]
        first = bisect.bisect_left(values, v)
        if (n - first) / n > top_share:
            return v + 1
        i = first - 1  # i >= 0: share(>= values[0]) is 1 > top_share


def is_hca(pub: PublicationRecord, baselines: BaselineMap, top_share: float) -> bool:
    v = hca_threshold(baseline_for(pub, baselines), top_share)
    return v > 0 and pub.citations >= v


def realized_hca_share(baseline: FieldBaseline, top_share: float) -> float:
    """Fraction of the cell that qualifies as HCA under :func:`hca_threshold`."""
    v = hca_threshold(baseline, top_share)
    if v <= 0:
        return 0.0
    values = baseline.citation_values
    return (len(values) - bisect.bisect_left(values, v)) / len(values)


def classify_researcher(corpus: Corpus, researcher_id: str) -> str:
    """Explicit field if set, else the predominant field of the output.

    Ties go to the field of the most recent tied publication, then to the
    lexicographically smallest field_id.
    """
    rec = corpus.researcher(researcher_id)
    if rec.field_id:
        return rec.field_id
    pubs = researcher_publications(corpus, researcher_id)
    if not pubs:
        raise Unclassifiable(researcher_id)
    counts = Counter(p.field_id for p, _ in pubs)
    top = max(counts.values())
    tied = {f for f, c in counts.items() if c == top}
    if len(tied) == 1:
        return tied.pop()
    latest: dict[str, int] = {}
    for p, _ in pubs:
        if p.field_id in tied:
            latest[p.field_id] = max(latest.get(p.field_id, p.year), p.year)
    newest = max(latest.values())
    return min(f for f, y in latest.items() if y == newest)


def write_baselines_csv(baselines: BaselineMap, dest) -> None:
    """Write the baseline table to a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_baselines(baselines, dest)
        return
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        _write_baselines(baselines, fh)


def _write_baselines(baselines: BaselineMap, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BASELINE_COLUMNS + (CITED_SUM,))
    for key in sorted(baselines):
        b = baselines[key]
        w.writerow([
            b.field_id,
            b.year,
            "" if b.c_bar is None else repr(b.c_bar),
            b.cited_count,
            b.total_count,
            "" if b.cited_sum is None else b.cited_sum,
        ])


def read_baselines_csv(path) -> dict[tuple[str, int], FieldBaseline]:
    """Import an external baseline table (normalization only, no HCA data)."""
    out: dict[tuple[str, int], FieldBaseline] = {}
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(ln for ln in fh if not ln.startswith("#"))
        missing = [c for c in BASELINE_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        for row in reader:
            key = (row["field_id"], int(row["year"]))
            if key in out:
                raise ValueError(f"{path}:{reader.line_num}: duplicate cell {key}")
            c_bar = float(row["c_bar"]) if row["c_bar"].strip() else None
            cited_sum = (row.get(CITED_SUM) or "").strip()
            out[key] = FieldBaseline(
                key[0], key[1], c_bar, int(row["cited_count"]), int(row["total_count"]),
                cited_sum=int(cited_sum) if cited_sum else None,
            )
    return out
