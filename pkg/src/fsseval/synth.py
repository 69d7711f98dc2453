"""Synthetic corpora with Lotka-distributed researcher output.

Every researcher draws a publication quota n with P(n) proportional to
n**-exponent. Bylines are assembled so that each researcher appears in
exactly its quota of publications, co-authored ones included, which keeps
the productivity histogram on the configured power law.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (
    UNMATCHED,
    AuthorSlot,
    PublicationRecord,
    ResearcherRecord,
    Window,
    write_publications_csv,
    write_publications_jsonl,
    write_researchers_csv,
)

SALARY_LEVELS = (1.0, 1.35, 1.8)  # assistant / associate / full, arbitrary units


@dataclass(frozen=True)
class SynthConfig:
    n_researchers: int = 1000
    n_fields: int = 5
    n_units: int = 10
    lotka_exponent: float = 2.0
    max_pubs: int = 1000
    # per-field mean citations; drawn log-uniformly from citation_range when empty
    citation_means: tuple[float, ...] = ()
    citation_range: tuple[float, float] = (2.0, 40.0)
    citation_sigma: float = 1.1
    # byline size = 1 + Poisson(coauthor_mean), capped at max_authors
    coauthor_mean: float = 2.5
    max_authors: int = 30
    p_matched_coauthor: float = 0.5
    p_intramural: float = 0.6
    p_cross_field: float = 0.1
    p_missing_salary: float = 0.0
    p_partial_years: float = 0.1
    window: tuple[int, int] = (2010, 2014)
    seed: int = 0

    def __post_init__(self):
        for name in ("n_researchers", "n_fields", "n_units", "max_pubs", "max_authors"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.lotka_exponent > 1:
            raise ValueError("lotka_exponent must be > 1")
        if self.citation_means and len(self.citation_means) != self.n_fields:
            raise ValueError("citation_means needs one entry per field")
        if any(m <= 0 for m in self.citation_means):
            raise ValueError("citation means must be positive")
        for name in ("p_matched_coauthor", "p_intramural", "p_cross_field",
                     "p_missing_salary", "p_partial_years"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.coauthor_mean < 0 or self.citation_sigma < 0:
            raise ValueError("coauthor_mean and citation_sigma must be >= 0")
        Window.of(*self.window)
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthConfig":
        known = cls.__dataclass_fields__
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown synth keys: {sorted(unknown)}")
        kw = dict(data)
        for key in ("citation_means", "citation_range", "window"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)


def lotka_pmf(exponent: float, max_n: int) -> np.ndarray:
    n = np.arange(1, max_n + 1, dtype=float)
    w = n ** -exponent
    return w / w.sum()


def lotka_slope(pub_counts, min_freq: int = 5) -> float:
    """Least-squares slope of log(frequency) against log(n).

    The fit uses n = 1, 2, ... up to the first n whose frequency drops
    below ``min_freq``; the sparse tail is excluded.
    """
    counts = np.asarray([c for c in pub_counts if c > 0], dtype=int)
    freq = np.bincount(counts)
    xs, ys = [], []
    for n in range(1, len(freq)):
        if freq[n] < min_freq:
            break
        xs.append(math.log(n))
        ys.append(math.log(freq[n]))
    if len(xs) < 2:
        raise ValueError("too few populated productivity classes to fit a slope")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


@dataclass
class _Pool:
    """Researcher ids with remaining quota, sampled with rejection."""

    ids: list[str] = field(default_factory=list)

    def draw(self, rng, quota: dict, exclude: set, tries: int = 4) -> str | None:
        if not self.ids:
            return None
        for _ in range(tries):
            rid = self.ids[int(rng.integers(len(self.ids)))]
            if quota[rid] > 0 and rid not in exclude:
                return rid
        return None


def _field_ids(n: int) -> list[str]:
    return [f"F{i + 1:02d}" for i in range(n)]


def _unit_ids(n: int) -> list[str]:
    return [f"U{i + 1:03d}" for i in range(n)]


def build(config: SynthConfig) -> tuple[list[PublicationRecord], list[ResearcherRecord], dict]:
    """Generate records in memory. Returns (publications, researchers, metadata)."""
    rng = np.random.default_rng(config.seed)
    window = Window.of(*config.window)
    fields = _field_ids(config.n_fields)
    units = _unit_ids(config.n_units)

    if config.citation_means:
        means = list(config.citation_means)
    else:
        lo, hi = config.citation_range
        means = [float(x) for x in np.exp(rng.uniform(math.log(lo), math.log(hi), config.n_fields))]

    n = config.n_researchers
    r_fields = rng.integers(config.n_fields, size=n)
    r_units = rng.integers(config.n_units, size=n)
    quotas = rng.choice(
        np.arange(1, config.max_pubs + 1), size=n, p=lotka_pmf(config.lotka_exponent, config.max_pubs)
    )
    salaries = rng.choice(SALARY_LEVELS, size=n)
    no_salary = rng.random(n) < config.p_missing_salary
    partial = rng.random(n) < config.p_partial_years
    partial_years = rng.integers(1, window.length + 1, size=n)

    researchers = []
    quota: dict[str, int] = {}
    unit_of: dict[str, str] = {}
    field_of: dict[str, int] = {}
    by_unit: dict[str, _Pool] = {u: _Pool() for u in units}
    by_field: dict[int, _Pool] = {f: _Pool() for f in range(config.n_fields)}
    for i in range(n):
        rid = f"R{i + 1:06d}"
        unit = units[r_units[i]]
        researchers.append(ResearcherRecord(
            rid,
            unit,
            fields[r_fields[i]],
            salary=None if no_salary[i] else float(salaries[i]),
            active_years=float(partial_years[i]) if partial[i] else None,
        ))
        quota[rid] = int(quotas[i])
        unit_of[rid] = unit
        field_of[rid] = int(r_fields[i])
        by_unit[unit].ids.append(rid)
        by_field[int(r_fields[i])].ids.append(rid)

    pubs: list[PublicationRecord] = []
    ext = 0

    def external() -> str:
        nonlocal ext
        ext += 1
        return f"X{ext:06d}"

    for rec in researchers:
        lead = rec.researcher_id
        while quota[lead] > 0:
            quota[lead] -= 1
            size = min(config.max_authors, 1 + int(rng.poisson(config.coauthor_mean)))
            intramural = bool(rng.random() < config.p_intramural)
            home = unit_of[lead]
            fidx = field_of[lead]
            if rng.random() < config.p_cross_field:
                fidx = int(rng.integers(config.n_fields))
            members = {lead}
            slots = [(lead, home)]
            for pos in range(2, size + 1):
                last = pos == size
                rid = None
                if rng.random() < config.p_matched_coauthor:
                    pool = by_unit[home] if (last and intramural) else by_field[field_of[lead]]
                    rid = pool.draw(rng, quota, members)
                    if rid is not None and last and not intramural and unit_of[rid] == home:
                        rid = None
                if rid is not None:
                    quota[rid] -= 1
                    members.add(rid)
                    slots.append((rid, unit_of[rid]))
                elif last and intramural:
                    slots.append((UNMATCHED, home))
                else:
                    slots.append((UNMATCHED, external()))
            year = window.start + int(rng.integers(window.length))
            mu = means[fidx]
            sigma = config.citation_sigma
            c = int(math.floor(math.exp(rng.normal(math.log(mu) - sigma * sigma / 2, sigma))))
            byline = tuple(AuthorSlot(k, r, inst) for k, (r, inst) in enumerate(slots, 1))
            pubs.append(PublicationRecord(f"P{len(pubs) + 1:07d}", year, fields[fidx], c, byline))

    meta = {
        "generator": "fsseval.synth",
        "config": _config_dict(config),
        "citation_model": {
            "kind": "floor(lognormal)",
            "sigma": config.citation_sigma,
            "field_means": {f: m for f, m in zip(fields, means)},
        },
        "productivity_model": {"kind": "lotka", "exponent": config.lotka_exponent,
                               "max_pubs": config.max_pubs},
        "counts": {"researchers": len(researchers), "publications": len(pubs)},
    }
    return pubs, researchers, meta


def _config_dict(config: SynthConfig) -> dict:
    d = asdict(config)
    for k, v in d.items():
        if isinstance(v, tuple):
            d[k] = list(v)
    return d


def generate(config: SynthConfig, out_dir, fmt: str = "csv") -> tuple[Path, Path]:
    """Write ``publications.{csv,jsonl}``, ``researchers.csv`` and ``synth_meta.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pubs, researchers, meta = build(config)
    if fmt == "csv":
        pub_path = out / "publications.csv"
        write_publications_csv(pubs, pub_path)
    elif fmt == "jsonl":
        pub_path = out / "publications.jsonl"
        write_publications_jsonl(pubs, pub_path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    res_path = out / "researchers.csv"
    write_researchers_csv(researchers, res_path)
    with open(out / "synth_meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return pub_path, res_path
