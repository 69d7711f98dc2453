"""fsseval command line.

Examples:
  fsseval synth --out data/ --seed 42 --researchers 2000
  fsseval ingest --pubs data/publications.csv --res data/researchers.csv --window 2010:2014
  fsseval score --pubs p.csv --res r.csv --window 2010:2014 --out results/
  fsseval rank --pubs p.csv --res r.csv --window 2010:2014 --policy BIO/10=FirstLastEmphasis
  fsseval paradox-demo

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .baselines import (
    MissingBaseline,
    Unclassifiable,
    compute_baselines,
    read_baselines_csv,
    write_baselines_csv,
)
from .corpus import CorpusError, UnknownResearcher, Window, load_corpus
from .credit import BylinePolicy, PolicyConfig, PolicyKind
from .indicators import EmptyPortfolio, indicator_rows, productive_field_means, score_all, score_units
from .paradox import paradox_demo
from .ranking import annotate, rank_all_fields, rank_units
from .synth import SynthConfig, generate

log = logging.getLogger("fsseval")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

SCORE_COLUMNS = ("researcher_id", "field_id", "unit_id", "fss", "n_pubs")
INDICATOR_COLUMNS = (
    "researcher_id", "field_id", "fss", "n_pubs", "h_index", "mncs",
    "hca_count", "hca_share", "total_normalized_impact",
)
RANK_COLUMNS = ("field_id", "rank", "researcher_id", "fss", "percentile", "ratio_to_avg")
UNIT_COLUMNS = ("rank", "unit_id", "fss_u", "rs", "n_flagged", "by_field")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    pubs: Path | None = None
    res: Path | None = None
    window: Window | None = None
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    top_share: float = 0.10
    fmt: str = "csv"
    out: Path | None = None
    baselines: Path | None = None
    jobs: int = 1
    seed: int | None = None
    synth: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.top_share < 1:
            raise UsageError(f"--top-share must lie in (0, 1), got {self.top_share}")

    def hash_payload(self) -> dict:
        return {
            "window": None if self.window is None else list(self.window),
            "policy": self.policy.to_dict(),
            "top_share": self.top_share,
        }


def config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


# --------------------------------------------------------------------------
# argument handling

def _parse_policy_flag(text: str) -> tuple[str, BylinePolicy]:
    if "=" not in text:
        raise UsageError(f"--policy expects FIELD=KIND, got {text!r}")
    fid, kind = text.split("=", 1)
    try:
        return fid.strip(), BylinePolicy(PolicyKind(kind.strip()))
    except ValueError:
        kinds = ", ".join(k.value for k in PolicyKind)
        raise UsageError(f"unknown policy kind {kind!r} (choose from {kinds})") from None


def build_run_config(args) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{args.config}: invalid JSON config ({exc.msg})") from None

    policy = PolicyConfig.from_dict(data.get("policy", {}))
    overrides = dict(policy.by_field)
    for text in getattr(args, "policy", None) or ():
        fid, pol = _parse_policy_flag(text)
        overrides[fid] = pol
    policy = PolicyConfig(overrides, policy.default)

    def pick(name, key=None):
        v = getattr(args, name, None)
        return v if v is not None else data.get(key or name)

    window = pick("window")
    pubs, res, out, base = pick("pubs"), pick("res"), pick("out"), pick("baselines")
    jobs = pick("jobs")
    return RunConfig(
        pubs=Path(pubs) if pubs else None,
        res=Path(res) if res else None,
        window=Window.parse(str(window)) if window else None,
        policy=policy,
        top_share=float(pick("top_share") or 0.10),
        fmt=pick("format") or "csv",
        out=Path(out) if out else None,
        baselines=Path(base) if base else None,
        jobs=int(jobs) if jobs else (os.cpu_count() or 1),
        seed=pick("seed"),
        synth=data.get("synth", {}),
    )


def _require_inputs(cfg: RunConfig, command: str) -> None:
    missing = [f for f, v in (("--pubs", cfg.pubs), ("--res", cfg.res), ("--window", cfg.window)) if v is None]
    if missing:
        raise UsageError(f"{command} requires {' '.join(missing)}")


# --------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Emitter:
    """Writes tables with a metadata header to --out or stdout."""

    def __init__(self, cfg: RunConfig, metadata: dict, stdout=None):
        self.cfg = cfg
        self.metadata = metadata
        self.stdout = stdout or sys.stdout
        self.written: list[Path] = []

    def table(self, name: str, columns, rows) -> None:
        rows = [[r[c] if isinstance(r, dict) else r[i] for i, c in enumerate(columns)] for r in rows]
        if self.cfg.fmt == "json":
            payload = {
                "metadata": self.metadata,
                "columns": list(columns),
                "rows": [dict(zip(columns, r)) for r in rows],
            }
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
            ext = "json"
        else:
            buf = io.StringIO()
            for key in sorted(self.metadata):
                buf.write(f"# {key}: {json.dumps(self.metadata[key], sort_keys=True)}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
            text = buf.getvalue()
            ext = "csv"
        if self.cfg.out is None:
            self.stdout.write(text)
            return
        self.cfg.out.mkdir(parents=True, exist_ok=True)
        path = self.cfg.out / f"{name}.{ext}"
        path.write_text(text, encoding="utf-8")
        self.written.append(path)


def _metadata(cfg: RunConfig, corpus=None, extra: dict | None = None) -> dict:
    meta = {
        "tool": f"fsseval {__version__}",
        "config_hash": config_hash(cfg.hash_payload()),
        "window": None if cfg.window is None else f"{cfg.window.start}:{cfg.window.end}",
        "top_share": cfg.top_share,
        "policy": cfg.policy.to_dict(),
    }
    if cfg.pubs is not None:
        meta["inputs"] = {"pubs_sha256": _file_digest(cfg.pubs), "res_sha256": _file_digest(cfg.res)}
    meta["baselines_source"] = "external:" + _file_digest(cfg.baselines) if cfg.baselines else "corpus"
    if corpus is not None:
        meta.update(corpus.defaults_report())
    if extra:
        meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# commands

def _load(cfg: RunConfig, command: str):
    _require_inputs(cfg, command)
    corpus = load_corpus(cfg.pubs, cfg.res, cfg.window)
    if cfg.baselines:
        baselines = read_baselines_csv(cfg.baselines)
    else:
        baselines = compute_baselines(corpus)
    return corpus, baselines


def cmd_ingest(cfg: RunConfig, stdout) -> int:
    _require_inputs(cfg, "ingest")
    corpus = load_corpus(cfg.pubs, cfg.res, cfg.window)
    stats = corpus.stats()
    if cfg.fmt == "json":
        stdout.write(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    else:
        for k, v in stats.items():
            stdout.write(f"{k}: {v}\n")
    return EXIT_OK


def cmd_baseline(cfg: RunConfig, stdout) -> int:
    _require_inputs(cfg, "baseline")
    corpus = load_corpus(cfg.pubs, cfg.res, cfg.window)
    baselines = compute_baselines(corpus)
    if cfg.out is None:
        write_baselines_csv(baselines, stdout)
    else:
        cfg.out.mkdir(parents=True, exist_ok=True)
        write_baselines_csv(baselines, cfg.out / "baselines.csv")
    return EXIT_OK


def _scores(cfg: RunConfig, command: str):
    corpus, baselines = _load(cfg, command)
    scores = score_all(corpus, baselines, cfg.policy, jobs=cfg.jobs)
    return corpus, baselines, scores


def cmd_score(cfg: RunConfig, stdout) -> int:
    corpus, _, scores = _scores(cfg, "score")
    em = Emitter(cfg, _metadata(cfg, corpus), stdout)
    em.table("scores", SCORE_COLUMNS, [
        [s.researcher_id, s.field_id, s.unit_id, s.fss, s.n_pubs] for s in scores
    ])
    return EXIT_OK


def cmd_rank(cfg: RunConfig, stdout) -> int:
    corpus, _, scores = _scores(cfg, "rank")
    ranked = rank_all_fields(scores)
    means = productive_field_means(scores)
    report = rank_units(score_units(annotate(scores, ranked), means))
    meta = _metadata(cfg, corpus, {"unit_aggregation_inputs": list(report.provenance)})
    em = Emitter(cfg, meta, stdout)
    rows = []
    for rl in ranked:
        for i, e in enumerate(rl.entries, 1):
            rows.append([rl.field_id, i, e.researcher_id, e.fss, e.percentile, e.ratio_to_avg])
    em.table("field_rankings", RANK_COLUMNS, rows)
    em.table("unit_rankings", UNIT_COLUMNS, [
        [
            r.rank, r.unit.unit_id, r.unit.fss_u, r.unit.rs, len(r.unit.flagged),
            ";".join(f"{f}:{c}:{_fmt(v)}" for f, (c, v) in r.unit.by_field.items()),
        ]
        for r in report.rows
    ])
    return EXIT_OK


def cmd_indicators(cfg: RunConfig, stdout) -> int:
    corpus, baselines, scores = _scores(cfg, "indicators")
    rows = indicator_rows(corpus, baselines, scores, cfg.top_share)
    em = Emitter(cfg, _metadata(cfg, corpus), stdout)
    em.table("indicators", INDICATOR_COLUMNS, [
        [getattr(r, c) for c in INDICATOR_COLUMNS] for r in rows
    ])
    return EXIT_OK


def cmd_synth(cfg: RunConfig, stdout, args) -> int:
    if cfg.out is None:
        raise UsageError("synth requires --out DIR")
    data = dict(cfg.synth)
    for flag, key in (("researchers", "n_researchers"), ("fields", "n_fields"),
                      ("units", "n_units"), ("exponent", "lotka_exponent")):
        v = getattr(args, flag, None)
        if v is not None:
            data[key] = v
    if cfg.seed is not None:
        data["seed"] = int(cfg.seed)
    if cfg.window is not None:
        data["window"] = list(cfg.window)
    try:
        synth_cfg = SynthConfig.from_dict(data)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    fmt = "jsonl" if cfg.fmt == "json" else "csv"
    pub_path, res_path = generate(synth_cfg, cfg.out, fmt)
    stdout.write(f"wrote {pub_path}\nwrote {res_path}\n")
    return EXIT_OK


def cmd_paradox(cfg: RunConfig, stdout) -> int:
    report = paradox_demo()
    if cfg.fmt == "json":
        stdout.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    else:
        stdout.write(report.table() + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fsseval",
        description="Research productivity (FSS) scoring and ranking",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n", 2)[2],
    )
    parser.add_argument("--version", action="version", version=f"fsseval {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, data=True):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--out", help="output directory (stdout when omitted)")
        if data:
            p.add_argument("--pubs", help="publications file (.csv or .jsonl)")
            p.add_argument("--res", help="researchers file (.csv or .jsonl)")
            p.add_argument("--window", help="inclusive year range Y1:Y2")
            p.add_argument("--policy", action="append", metavar="FIELD=KIND",
                           help="byline policy for a field (repeatable)")
            p.add_argument("--top-share", dest="top_share", type=float,
                           help="HCA top share (default 0.10)")
            p.add_argument("--baselines", help="import baselines CSV instead of computing them")
            p.add_argument("--jobs", type=int, help="worker processes for scoring")
        return p

    common(sub.add_parser("ingest", help="validate inputs and report corpus statistics"))
    common(sub.add_parser("baseline", help="emit per-(field, year) citation baselines"))
    common(sub.add_parser("score", help="researcher FSS scores"))
    common(sub.add_parser("rank", help="field percentile/ratio rankings and unit rankings"))
    common(sub.add_parser("indicators", help="FSS next to h-index, MNCS and HCA share"))

    sp = common(sub.add_parser("synth", help="write a synthetic corpus"), data=False)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--window", help="inclusive year range Y1:Y2")
    sp.add_argument("--researchers", type=int)
    sp.add_argument("--fields", type=int)
    sp.add_argument("--units", type=int)
    sp.add_argument("--exponent", type=float, help="Lotka exponent (default 2.0)")

    pd = sub.add_parser("paradox-demo", help="size-independent indicators vs FSS on a fixture")
    pd.add_argument("--format", choices=["csv", "json"])
    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "baseline": cmd_baseline,
    "score": cmd_score,
    "rank": cmd_rank,
    "indicators": cmd_indicators,
    "paradox-demo": cmd_paradox,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_run_config(args)
        if args.command == "synth":
            return cmd_synth(cfg, stdout, args)
        return COMMANDS[args.command](cfg, stdout)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fsseval {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CorpusError, MissingBaseline, Unclassifiable, UnknownResearcher,
            EmptyPortfolio, ValueError) as exc:
        print(f"fsseval {args.command}: validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"fsseval {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
