"""Domain records and loaders for publication / researcher files.

Publications come as CSV or JSON-lines; researchers as CSV or JSON-lines.
The loaded :class:`Corpus` is frozen and indexed for the scoring modules.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple

# Byline slot whose author is not in the researcher roster.
UNMATCHED = "-"

PUB_COLUMNS = ("pub_id", "year", "field_id", "citations", "byline")
RES_COLUMNS = ("researcher_id", "unit_id", "field_id", "salary", "active_years")


def decimal_fraction(x: float) -> Fraction:
    """Exact rational of the shortest decimal form of ``x`` (1.35 -> 27/20)."""
    return Fraction(repr(float(x)))


class CorpusError(ValueError):
    """Base class for ingestion failures."""


class MalformedRow(CorpusError):
    def __init__(self, path, line: int, reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class DuplicateId(CorpusError):
    def __init__(self, ident: str):
        self.ident = ident
        super().__init__(f"DuplicateId({ident!r})")


class YearOutOfWindow(CorpusError):
    def __init__(self, pub_id: str, year: int):
        self.pub_id = pub_id
        self.year = year
        super().__init__(f"YearOutOfWindow({pub_id!r}, {year})")


class EmptyByline(CorpusError):
    def __init__(self, pub_id: str):
        self.pub_id = pub_id
        super().__init__(f"EmptyByline({pub_id!r})")


class UnknownResearcher(KeyError):
    pass


class Window(NamedTuple):
    """Inclusive range of publication years."""

    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def __contains__(self, year) -> bool:  # type: ignore[override]
        return self.start <= year <= self.end

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse ``"2010:2014"`` (``-`` is accepted as separator too)."""
        sep = ":" if ":" in text else "-"
        try:
            a, b = (int(x) for x in text.split(sep))
        except ValueError:
            raise ValueError(f"bad window {text!r}, expected Y1:Y2") from None
        return cls.of(a, b)

    @classmethod
    def of(cls, start: int, end: int) -> "Window":
        if end < start:
            raise ValueError(f"window end {end} precedes start {start}")
        return cls(start, end)


@dataclass(frozen=True)
class AuthorSlot:
    position: int
    researcher_id: str
    institution_id: str

    @property
    def matched(self) -> bool:
        return self.researcher_id != UNMATCHED


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    year: int
    field_id: str
    citations: int
    byline: tuple[AuthorSlot, ...]

    def __post_init__(self):
        if self.citations < 0:
            raise ValueError(f"{self.pub_id}: negative citations")
        if not self.byline:
            raise EmptyByline(self.pub_id)
        positions = [s.position for s in self.byline]
        if positions != list(range(1, len(positions) + 1)):
            raise ValueError(f"{self.pub_id}: byline positions {positions} are not 1..n")

    @property
    def n_authors(self) -> int:
        return len(self.byline)


@dataclass(frozen=True)
class ResearcherRecord:
    researcher_id: str
    unit_id: str
    field_id: str | None = None
    salary: float | None = None
    active_years: float | None = None

    def __post_init__(self):
        if self.salary is not None and not self.salary > 0:
            raise ValueError(f"{self.researcher_id}: salary must be > 0")
        if self.active_years is not None and not self.active_years > 0:
            raise ValueError(f"{self.researcher_id}: active_years must be > 0")


@dataclass(frozen=True)
class Corpus:
    publications: tuple[PublicationRecord, ...]
    researchers: tuple[ResearcherRecord, ...]
    window: Window
    _by_researcher: Mapping[str, tuple[tuple[PublicationRecord, int], ...]] = field(
        init=False, repr=False, compare=False
    )
    _researcher_index: Mapping[str, ResearcherRecord] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        seen: set[str] = set()
        for pub in self.publications:
            if pub.pub_id in seen:
                raise DuplicateId(pub.pub_id)
            seen.add(pub.pub_id)
            if pub.year not in self.window:
                raise YearOutOfWindow(pub.pub_id, pub.year)
        index: dict[str, ResearcherRecord] = {}
        for res in self.researchers:
            if res.researcher_id in index:
                raise DuplicateId(res.researcher_id)
            index[res.researcher_id] = res

        by_res: dict[str, list[tuple[PublicationRecord, int]]] = {r: [] for r in index}
        for pub in sorted(self.publications, key=lambda p: (p.year, p.pub_id)):
            for slot in pub.byline:
                if slot.researcher_id in by_res:
                    by_res[slot.researcher_id].append((pub, slot.position))
        object.__setattr__(self, "_researcher_index", MappingProxyType(index))
        object.__setattr__(
            self,
            "_by_researcher",
            MappingProxyType({k: tuple(v) for k, v in by_res.items()}),
        )

    def __reduce__(self):
        # indexes are rebuilt on unpickle (mapping proxies don't pickle)
        return (type(self), (self.publications, self.researchers, self.window))

    def researcher(self, researcher_id: str) -> ResearcherRecord:
        try:
            return self._researcher_index[researcher_id]
        except KeyError:
            raise UnknownResearcher(researcher_id) from None

    def __contains__(self, researcher_id) -> bool:
        return researcher_id in self._researcher_index

    @property
    def researcher_ids(self) -> tuple[str, ...]:
        return tuple(r.researcher_id for r in self.researchers)

    def salary(self, researcher_id: str) -> float:
        """Yearly salary; 1.0 when the roster leaves it blank."""
        s = self.researcher(researcher_id).salary
        return 1.0 if s is None else s

    def active_years(self, researcher_id: str) -> float:
        """Years of activity in the window; the window length when blank."""
        t = self.researcher(researcher_id).active_years
        return float(self.window.length) if t is None else t

    @property
    def matched_slots(self) -> int:
        return sum(1 for p in self.publications for s in p.byline if s.matched)

    @property
    def unmatched_slots(self) -> int:
        return sum(1 for p in self.publications for s in p.byline if not s.matched)

    def defaults_report(self) -> dict:
        """Which cost-normalization inputs fell back to their defaults."""
        no_salary = sum(1 for r in self.researchers if r.salary is None)
        no_years = sum(1 for r in self.researchers if r.active_years is None)
        return {
            "salary_defaulted": no_salary,
            "active_years_defaulted": no_years,
            "salary_normalization_active": no_salary == 0,
        }

    def stats(self) -> dict:
        return {
            "window": f"{self.window.start}:{self.window.end}",
            "publications": len(self.publications),
            "researchers": len(self.researchers),
            "matched_slots": self.matched_slots,
            "unmatched_slots": self.unmatched_slots,
            **self.defaults_report(),
        }


def researcher_publications(
    corpus: Corpus, researcher_id: str
) -> list[tuple[PublicationRecord, int]]:
    """All (publication, byline position) pairs of one researcher.

    Ordered by (year, pub_id). Raises :class:`UnknownResearcher`.
    """
    if researcher_id not in corpus:
        raise UnknownResearcher(researcher_id)
    return list(corpus._by_researcher[researcher_id])


# --------------------------------------------------------------------------
# file parsing

def _is_jsonl(path: Path) -> bool:
    return path.suffix.lower() in (".jsonl", ".ndjson", ".json")


def _csv_rows(path: Path, required: Iterable[str]) -> Iterator[tuple[int, dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (ln for ln in fh if not ln.startswith("#"))
        reader = csv.DictReader(lines)
        if reader.fieldnames is None:
            raise MalformedRow(path, 1, "missing header row")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise MalformedRow(path, 1, f"missing columns {missing}")
        for row in reader:
            if None in row or any(v is None for v in row.values()):
                raise MalformedRow(path, reader.line_num, "wrong number of fields")
            yield reader.line_num, row


def _jsonl_rows(path: Path, required: Iterable[str]) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRow(path, lineno, f"invalid JSON: {exc.msg}") from None
            if not isinstance(row, dict):
                raise MalformedRow(path, lineno, "expected a JSON object")
            missing = [c for c in required if c not in row]
            if missing:
                raise MalformedRow(path, lineno, f"missing keys {missing}")
            yield lineno, row


def _rows(path: Path, required) -> Iterator[tuple[int, dict]]:
    if _is_jsonl(path):
        return _jsonl_rows(path, required)
    return _csv_rows(path, required)


def _int(value, what: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{what} must be an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    try:
        return int(str(value).strip())
    except ValueError:
        raise ValueError(f"{what} must be an integer, got {value!r}") from None


def _opt_float(value, what: str) -> float | None:
    if value is None or (isinstance(value, str) and not value.strip()):
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{what} must be a number, got {value!r}") from None


def _parse_byline_csv(text: str) -> list[tuple[int, str, str]]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ValueError(f"byline entry {chunk!r} is not position:researcher:institution")
        out.append((_int(parts[0], "byline position"), parts[1].strip(), parts[2].strip()))
    return out


def _parse_byline_json(items) -> list[tuple[int, str, str]]:
    if not isinstance(items, list):
        raise ValueError("byline must be an array")
    out = []
    for item in items:
        if not isinstance(item, dict):
            raise ValueError("byline entries must be objects")
        rid = item.get("researcher_id")
        out.append((
            _int(item.get("position"), "byline position"),
            UNMATCHED if rid in (None, "") else str(rid),
            str(item.get("institution_id", "")),
        ))
    return out


def _build_slots(triples, known: Mapping[str, object]) -> tuple[AuthorSlot, ...]:
    triples = sorted(triples)
    positions = [p for p, _, _ in triples]
    if positions != list(range(1, len(triples) + 1)):
        raise ValueError(f"byline positions {positions} must be exactly 1..{len(triples)}")
    ids = [r for _, r, _ in triples if r in known]
    if len(ids) != len(set(ids)):
        raise ValueError("researcher listed twice in one byline")
    return tuple(
        AuthorSlot(p, r if r in known else UNMATCHED, inst) for p, r, inst in triples
    )


def load_researchers(path) -> tuple[ResearcherRecord, ...]:
    path = Path(path)
    out: list[ResearcherRecord] = []
    seen: set[str] = set()
    for lineno, row in _rows(path, ("researcher_id", "unit_id")):
        rid = str(row["researcher_id"]).strip()
        if not rid or rid == UNMATCHED:
            raise MalformedRow(path, lineno, "empty researcher_id")
        if rid in seen:
            raise DuplicateId(rid)
        seen.add(rid)
        fid = row.get("field_id")
        fid = str(fid).strip() if fid not in (None, "") else None
        try:
            rec = ResearcherRecord(
                researcher_id=rid,
                unit_id=str(row["unit_id"]).strip(),
                field_id=fid or None,
                salary=_opt_float(row.get("salary"), "salary"),
                active_years=_opt_float(row.get("active_years"), "active_years"),
            )
        except ValueError as exc:
            raise MalformedRow(path, lineno, str(exc)) from None
        out.append(rec)
    return tuple(out)


def load_publications(
    path, window: Window, known_researchers: Mapping[str, object]
) -> tuple[PublicationRecord, ...]:
    path = Path(path)
    jsonl = _is_jsonl(path)
    out: list[PublicationRecord] = []
    seen: set[str] = set()
    for lineno, row in _rows(path, PUB_COLUMNS):
        pub_id = str(row["pub_id"]).strip()
        if not pub_id:
            raise MalformedRow(path, lineno, "empty pub_id")
        if pub_id in seen:
            raise DuplicateId(pub_id)
        seen.add(pub_id)
        try:
            year = _int(row["year"], "year")
            citations = _int(row["citations"], "citations")
            if citations < 0:
                raise ValueError("citations must be >= 0")
            field_id = str(row["field_id"]).strip()
            if not field_id:
                raise ValueError("empty field_id")
            if jsonl:
                triples = _parse_byline_json(row["byline"])
            else:
                triples = _parse_byline_csv(row["byline"])
        except ValueError as exc:
            raise MalformedRow(path, lineno, str(exc)) from None
        if not triples:
            raise EmptyByline(pub_id)
        if year not in window:
            raise YearOutOfWindow(pub_id, year)
        try:
            slots = _build_slots(triples, known_researchers)
        except ValueError as exc:
            raise MalformedRow(path, lineno, str(exc)) from None
        out.append(PublicationRecord(pub_id, year, field_id, citations, slots))
    return tuple(out)


def load_corpus(pub_path, res_path, window: Window | tuple[int, int]) -> Corpus:
    """Load and validate a corpus.

    Byline researcher ids absent from the researcher file are rewritten to
    :data:`UNMATCHED`; they still count toward byline length.
    """
    window = Window.of(*window)
    researchers = load_researchers(res_path)
    known = {r.researcher_id: r for r in researchers}
    pubs = load_publications(pub_path, window, known)
    return Corpus(pubs, researchers, window)


# --------------------------------------------------------------------------
# writers (used by the generator and for round-trips)

def format_byline(byline: Iterable[AuthorSlot]) -> str:
    return ";".join(f"{s.position}:{s.researcher_id}:{s.institution_id}" for s in byline)


def _fmt_opt(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def write_publications_csv(pubs: Iterable[PublicationRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PUB_COLUMNS)
        for p in pubs:
            w.writerow([p.pub_id, p.year, p.field_id, p.citations, format_byline(p.byline)])


def write_publications_jsonl(pubs: Iterable[PublicationRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pubs:
            row = {
                "pub_id": p.pub_id,
                "year": p.year,
                "field_id": p.field_id,
                "citations": p.citations,
                "byline": [
                    {
                        "position": s.position,
                        "researcher_id": s.researcher_id,
                        "institution_id": s.institution_id,
                    }
                    for s in p.byline
                ],
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def write_researchers_csv(researchers: Iterable[ResearcherRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RES_COLUMNS)
        for r in researchers:
            w.writerow([
                r.researcher_id,
                r.unit_id,
                r.field_id or "",
                _fmt_opt(r.salary),
                _fmt_opt(r.active_years),
            ])
