"""Batch command-line front end.

Exit codes: 0 success, 2 configuration/usage error, 3 corpus validation
error, 4 computation error.  Failures write one JSON error record to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from . import __version__
from .bonus import BONUS_COLUMNS, Grouping, UndefinedBonusError, fcb_breakdown
from .corpus import (
    DEFAULT_DOC_TYPES,
    CorpusParseError,
    CorpusValidationError,
    Level,
    load_corpus,
    resolve_all,
    scan_corpus,
    write_corpus,
)
from .counting import WEIGHT_COLUMNS, CountingUsageError, Method, compute_weights, methods_for
from .indicators import Indicator, UndefinedAverageError, comparison_table, profile, unit_indicators, world_average
from .normalization import STATS_COLUMNS, Mode, normalize
from .reports import provenance, write_table
from .simulate import ConfigError, SimulationConfig, simulate_corpus

logger = logging.getLogger("fraccount")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CORPUS = 3
EXIT_COMPUTE = 4

COMMANDS = ("validate", "weights", "indicators", "compare", "bonus", "profile", "simulate")


class UsageError(Exception):
    """Command-specific flags are missing or inconsistent."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        _fail(EXIT_CONFIG, "config", message)


def _fail(code: int, kind: str, message: str, **extra: Any):
    record = {"error": kind, "exit_code": code, "message": message, **extra}
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    raise SystemExit(code)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fraccount", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fraccount {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def corpus_cmd(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--corpus", required=True, type=Path)
        p.add_argument(
            "--doc-types",
            default=",".join(sorted(DEFAULT_DOC_TYPES)),
            help="comma-separated document types to keep, or 'all' (default: %(default)s)",
        )
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    levels = [lv.value for lv in Level]
    methods = [m.value for m in Method]

    p = corpus_cmd("validate", "check a corpus file against the record schema and invariants")

    p = corpus_cmd("weights", "per-publication weights under each counting method")
    p.add_argument("--level", action="append", choices=levels)
    p.add_argument("--method", action="append", choices=methods)

    for name, help_ in (
        ("indicators", "per-unit publication counts, MNCS and PP_top10%%"),
        ("compare", "per-unit comparison of counting methods against a baseline"),
        ("profile", "scores by number of co-authoring units"),
        ("bonus", "full counting bonus, optionally broken down by group"),
    ):
        p = corpus_cmd(name, help_)
        p.add_argument("--level", action="append", choices=levels)
        p.add_argument("--mode", choices=[m.value for m in Mode], default="standard")
        p.add_argument(
            "--mode-level",
            choices=levels,
            help="unit level for multiplicative normalization (default: the single --level)",
        )
        if name in ("indicators", "compare"):
            p.add_argument("--method", action="append", choices=methods)
        if name == "indicators":
            p.add_argument("--stats-out", type=Path, help="also write the field-year reference table")
        if name == "compare":
            p.add_argument("--baseline", choices=methods, default="full")
            p.add_argument("--top-n", type=int)
        if name == "bonus":
            p.add_argument("--indicator", action="append", choices=[i.value for i in Indicator])
            p.add_argument("--group-by", choices=[g.value for g in Grouping], default="all")
            p.add_argument("--broad-field-map", type=Path)

    p = sub.add_parser("simulate", help="generate a synthetic corpus")
    p.add_argument("--config", type=Path, help="generator config (JSON); defaults if omitted")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)
    return parser


def _doc_types(arg: str):
    if arg == "all":
        return None
    return frozenset(t.strip() for t in arg.split(",") if t.strip())


_NOT_ECHOED = ("out", "stats_out")


def _config_echo(args: argparse.Namespace) -> dict[str, Any]:
    """Arguments as given, minus output locations; paths reduced to file names."""
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _NOT_ECHOED:
            continue
        if isinstance(v, Path):
            v = v.name
        elif isinstance(v, list):
            v = [str(x) for x in v]
        out[k] = v
    return out


@contextmanager
def _output(path: Path | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _levels(args, default_all: bool = True, single: bool = False) -> list[Level]:
    if not args.level:
        if single:
            raise UsageError(f"{args.command} needs --level")
        return list(Level) if default_all else []
    if single and len(args.level) > 1:
        raise UsageError(f"{args.command} takes exactly one --level")
    return [Level(x) for x in dict.fromkeys(args.level)]


def _methods(args, level: Level) -> list[Method]:
    if not args.method:
        return methods_for(level)
    methods = [Method(m) for m in dict.fromkeys(args.method)]
    for m in methods:
        if not m.valid_at(level):
            raise UsageError(f"method {m} is not defined at the {level} level")
    return methods


def _load(args):
    if not args.corpus.is_file():
        raise UsageError(f"corpus file not found: {args.corpus}")
    return resolve_all(load_corpus(args.corpus, _doc_types(args.doc_types)))


def _scores(args, corpus, levels: Sequence[Level]):
    mode = Mode(args.mode)
    mode_level = None
    if mode is Mode.MULTIPLICATIVE:
        if args.mode_level:
            mode_level = Level(args.mode_level)
        elif len(levels) == 1:
            mode_level = levels[0]
        else:
            raise UsageError("multiplicative mode needs a single --level or --mode-level")
    return normalize(corpus, mode, mode_level)


def cmd_validate(args) -> int:
    if not args.corpus.is_file():
        raise UsageError(f"corpus file not found: {args.corpus}")
    report = scan_corpus(args.corpus, _doc_types(args.doc_types))
    prov = provenance("validate", _config_echo(args), {"corpus": args.corpus})
    rows = [(p.line_no, p.record_id, "error", p.rule, p.message) for p in report.problems]
    rows += [(p.line_no, p.record_id, "warning", p.rule, p.message) for p in report.warnings]
    with _output(args.out) as fh:
        write_table(fh, ("line", "record_id", "severity", "rule", "message"), rows, prov, args.format)
    summary = (
        f"{len(report.records)} records, {report.skipped_doc_type} skipped by document type, "
        f"{len(report.problems)} problems, {len(report.warnings)} warnings"
    )
    print(summary, file=sys.stderr if args.out is None else sys.stdout)
    if not report.ok:
        _fail(EXIT_CORPUS, "corpus-validation", summary, problem_count=len(report.problems))
    return EXIT_OK


def cmd_weights(args) -> int:
    levels = _levels(args)
    if args.method:
        # each method is emitted at the levels where it is defined
        for m in map(Method, args.method):
            if not any(m.valid_at(lv) for lv in levels):
                raise UsageError(f"method {m} is not defined at any requested level")
    corpus = _load(args)
    rows = []
    for level in levels:
        methods = methods_for(level)
        if args.method:
            methods = [m for m in methods if m.value in args.method]
        for pub in corpus:
            for m in methods:
                wv = compute_weights(pub, level, m)
                for unit, w in wv.weights.items():
                    rows.append((pub.id, level.value, m.value, unit, w))
    prov = provenance("weights", _config_echo(args), {"corpus": args.corpus})
    with _output(args.out) as fh:
        write_table(fh, WEIGHT_COLUMNS, rows, prov, args.format)
    return EXIT_OK


def cmd_indicators(args) -> int:
    corpus = _load(args)
    levels = _levels(args, single=True)
    level = levels[0]
    stats, scores = _scores(args, corpus, levels)
    rows = []
    for m in _methods(args, level):
        unit_rows = unit_indicators(corpus, scores, level, m)
        for r in unit_rows:
            rows.append((r.unit, level.value, m.value, r.p, r.mncs, r.pp_top10))
        if unit_rows:
            rows.append(
                (
                    "(world)",
                    level.value,
                    m.value,
                    sum(r.p for r in unit_rows),
                    world_average(unit_rows, Indicator.MNCS).value,
                    world_average(unit_rows, Indicator.PP_TOP10).value,
                )
            )
    prov = provenance("indicators", _config_echo(args), {"corpus": args.corpus})
    with _output(args.out) as fh:
        write_table(fh, ("unit", "level", "method", "p", "mncs", "pp_top10"), rows, prov, args.format)
    if args.stats_out:
        stat_rows = [
            (s.field, s.year, s.pub_count, s.mean_citations, s.top10_threshold, s.top10_tie_fraction)
            for s in stats.values()
        ]
        with _output(args.stats_out) as fh:
            write_table(fh, STATS_COLUMNS, stat_rows, prov, args.format)
    return EXIT_OK


def cmd_compare(args) -> int:
    corpus = _load(args)
    levels = _levels(args, single=True)
    level = levels[0]
    methods = _methods(args, level)
    if len(methods) < 2:
        raise UsageError("compare needs at least two --method values")
    baseline = Method(args.baseline)
    if not baseline.valid_at(level):
        raise UsageError(f"baseline {baseline} is not defined at the {level} level")
    _, scores = _scores(args, corpus, levels)
    table = comparison_table(corpus, scores, level, methods, baseline, args.top_n)
    cols = (
        "unit", "method", "p", "mncs", "pp_top10", "p_decrease", "mncs_decrease", "pp_top10_decrease",
    )
    rows = [
        (r.unit, r.method.value, r.p, r.mncs, r.pp_top10, r.p_decrease, r.mncs_decrease, r.pp_top10_decrease)
        for r in table
    ]
    prov = provenance("compare", _config_echo(args), {"corpus": args.corpus})
    with _output(args.out) as fh:
        write_table(fh, cols, rows, prov, args.format)
    return EXIT_OK


def cmd_profile(args) -> int:
    corpus = _load(args)
    levels = _levels(args)
    _, scores = _scores(args, corpus, levels)
    rows = []
    for level in levels:
        for r in profile(corpus, scores, level):
            rows.append((level.value, r.m, r.n_pubs, r.share, r.mean_ncs, r.mean_top10))
    prov = provenance("profile", _config_echo(args), {"corpus": args.corpus})
    with _output(args.out) as fh:
        write_table(fh, ("level", "m", "n_pubs", "share", "mean_ncs", "mean_top10"), rows, prov, args.format)
    return EXIT_OK


def _broad_field_map(path: Path | None):
    if path is None:
        return None
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read broad-field map {path}: {exc}") from exc
    mapping = data.get("fields", data) if isinstance(data, dict) else None
    if not isinstance(mapping, dict) or not all(isinstance(v, str) for v in mapping.values()):
        raise UsageError(f"{path}: expected a JSON object mapping field ids to broad fields")
    return mapping


def cmd_bonus(args) -> int:
    grouping = Grouping(args.group_by)
    if grouping is Grouping.BROAD_FIELD and args.broad_field_map is None:
        raise UsageError("--group-by broad-field needs --broad-field-map")
    mapping = _broad_field_map(args.broad_field_map)
    corpus = _load(args)
    levels = _levels(args)
    indicators = [Indicator(i) for i in dict.fromkeys(args.indicator or [i.value for i in Indicator])]
    _, scores = _scores(args, corpus, levels)
    try:
        reports = fcb_breakdown(corpus, scores, grouping, levels, indicators, mapping)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not reports:
        raise UndefinedBonusError("no group has a publication assignable at the requested levels")
    rows = [
        (
            r.scope,
            r.level.value,
            r.indicator.value,
            r.fcb,
            None if r.fcb_percent is None else r.fcb_percent * 100,
            r.n_included,
            r.n_excluded,
        )
        for r in reports
    ]
    inputs = {"corpus": args.corpus}
    if args.broad_field_map:
        inputs["broad_field_map"] = args.broad_field_map
    prov = provenance("bonus", _config_echo(args), inputs)
    with _output(args.out) as fh:
        write_table(fh, BONUS_COLUMNS, rows, prov, args.format)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.config is not None and not args.config.is_file():
        raise UsageError(f"config file not found: {args.config}")
    cfg = SimulationConfig.from_file(args.config) if args.config else SimulationConfig()
    records = simulate_corpus(cfg, args.seed)
    inputs = {"config": args.config} if args.config else {}
    prov = provenance("simulate", _config_echo(args), inputs)
    prov["generator"] = cfg.to_dict()
    header = json.dumps(prov, sort_keys=True).splitlines()
    write_corpus(records, args.out, header=header)
    print(f"{len(records)} records written to {args.out}")
    return EXIT_OK


HANDLERS = {
    "validate": cmd_validate,
    "weights": cmd_weights,
    "indicators": cmd_indicators,
    "compare": cmd_compare,
    "bonus": cmd_bonus,
    "profile": cmd_profile,
    "simulate": cmd_simulate,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except (UsageError, ConfigError, CountingUsageError) as exc:
        _fail(EXIT_CONFIG, "config", str(exc))
    except CorpusParseError as exc:
        _fail(EXIT_CORPUS, "corpus-parse", str(exc), line=exc.line_no)
    except CorpusValidationError as exc:
        _fail(
            EXIT_CORPUS,
            "corpus-validation",
            str(exc),
            problems=[
                {"line": p.line_no, "record_id": p.record_id, "rule": p.rule, "message": p.message}
                for p in exc.problems
            ],
        )
    except OSError as exc:
        _fail(EXIT_CONFIG, "config", f"{exc.strerror}: {exc.filename}")
    except (UndefinedBonusError, UndefinedAverageError, ArithmeticError, KeyError, ValueError) as exc:
        _fail(EXIT_COMPUTE, "computation", str(exc))
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
