"""``sqltemplate`` command line.

Exit codes: 0 success, 1 usage error, 2 data error (bad SQL, catalog,
records or inventory), 3 internal error.

Every option can also come from the environment as ``SQLTMPL_<OPTION>``,
e.g. ``SQLTMPL_CATALOG=catalogs.json`` or ``SQLTMPL_DEDUP=1``. Flags given on
the command line win.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import powerlaw, stats
from .complexity import profile_tokens
from .corpus import (
    QueryRecord,
    ingest,
    load_inventory,
    match,
    save_inventory,
)
from .errors import MissingCatalog, ParseError, SqlTemplateError
from .lexer import lex
from .report import AnalysisConfig, write_report
from .schema import SchemaCatalog, from_spider_tables, load_catalog_ddl, load_catalogs
from .templatizer import Level, hard_template, soft_template

ENV_PREFIX = "SQLTMPL_"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

# BIRD difficulty labels mapped onto the record format's labels
_DIFFICULTY = {"simple": "easy", "moderate": "medium", "challenging": "difficult",
               "easy": "easy", "medium": "medium", "hard": "difficult", "extra": "difficult"}

log = logging.getLogger("sqltemplate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_targets(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"targets must be comma-separated numbers, got {text!r}") from None
    if not vals or any(not 0 < v <= 100 for v in vals):
        raise argparse.ArgumentTypeError("targets must lie in (0, 100]")
    return tuple(int(v) if v.is_integer() else v for v in vals)


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _resamples(text: str) -> int:
    n = int(text)
    if n != 0 and n < 100:
        raise argparse.ArgumentTypeError(f"resamples must be 0 (skip) or >= 100, got {n}")
    return n


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def _env_defaults(parser: argparse.ArgumentParser) -> None:
    """Let SQLTMPL_* variables supply option defaults."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _env_defaults(sub)
            continue
        longs = [s for s in action.option_strings if s.startswith("--")]
        if not longs or action.dest == "help":
            continue
        value = os.environ.get(ENV_PREFIX + longs[0][2:].replace("-", "_").upper())
        if value is None:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            action.default = _truthy(value)
        else:
            action.default = value  # argparse applies ``type`` to string defaults
        action.required = False


# ---- shared helpers -------------------------------------------------------


def _load_catalog(path: str | None, db: str | None, required: bool = True) -> SchemaCatalog | None:
    if not path:
        if required:
            raise UsageError("--catalog is required")
        return None
    p = Path(path)
    if p.suffix.lower() == ".sql":
        return load_catalog_ddl(p.read_text(encoding="utf-8"), db_id=db or p.stem)
    catalogs = load_catalogs(p)
    if db:
        if db not in catalogs:
            raise MissingCatalog(f"no catalog for db_id {db!r} in {path}")
        return catalogs[db]
    if len(catalogs) > 1:
        raise UsageError(f"{path} holds {len(catalogs)} catalogs; pick one with --db")
    return next(iter(catalogs.values()))


def _sql_text(args) -> str:
    if args.file:
        return sys.stdin.read() if args.file == "-" else Path(args.file).read_text(encoding="utf-8")
    if args.sql is None:
        raise UsageError("give the query as an argument or with --file")
    return args.sql


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


# ---- commands -------------------------------------------------------------


def cmd_templatize(args) -> int:
    catalog = _load_catalog(args.catalog, args.db)
    hard = hard_template(lex(_sql_text(args)), catalog)
    soft = soft_template(hard)
    for w in hard.warnings:
        log.warning(w)
    if args.level in (None, "hard"):
        print(hard.canonical)
    if args.level in (None, "soft"):
        print(soft.canonical)
    return EXIT_OK


def cmd_profile(args) -> int:
    catalog = _load_catalog(args.catalog, args.db, required=False)
    _print_json(profile_tokens(lex(_sql_text(args)), catalog).as_dict())
    return EXIT_OK


def _need(args, *names: str) -> None:
    missing = [n for n in names if not getattr(args, n)]
    if missing:
        raise UsageError(", ".join(f"--{m}" for m in missing) + " required")


def cmd_ingest(args) -> int:
    _need(args, "records", "catalog", "out")
    result = ingest(args.records, args.catalog, dedup=args.dedup, workers=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_inventory(result.hard, out / "hard_inventory.json")
    save_inventory(result.soft, out / "soft_inventory.json")
    with open(out / "failures.jsonl", "w", encoding="utf-8") as fh:
        for f in result.failures:
            fh.write(json.dumps(f.to_json(), sort_keys=True) + "\n")
    _print_json({
        "processed": len(result.processed),
        "failed": len(result.failures),
        "hard_templates": len(result.hard),
        "soft_templates": len(result.soft),
    })
    return EXIT_OK


def cmd_analyze(args) -> int:
    _need(args, "records", "catalog", "out")
    result = ingest(args.records, args.catalog, dedup=args.dedup, workers=args.jobs)
    cfg = AnalysisConfig(
        level=Level(args.level or "soft"),
        window=args.window,
        targets=args.targets,
        seed=args.seed,
        resamples=args.resamples,
        spearman_unit=args.spearman_unit,
    )
    write_report(args.out, result, cfg)
    if result.failures:
        log.warning("%d record(s) skipped; see failures.jsonl", len(result.failures))
    return EXIT_OK


def cmd_coverage(args) -> int:
    _need(args, "inventory")
    rows = stats.coverage_table(load_inventory(args.inventory), args.targets)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["target", "templates_needed", "template_percentage"])
    for row in rows:
        w.writerow([row.target, row.templates_needed, repr(row.template_percentage)])
    return EXIT_OK


def cmd_fit(args) -> int:
    _need(args, "inventory")
    spec = stats.spectrum(load_inventory(args.inventory))
    fit = stats.fit_with_gof(spec, resamples=args.resamples, seed=args.seed, mode=args.mode)
    _print_json({**fit.__dict__, "seed": args.seed})
    return EXIT_OK


def cmd_match(args) -> int:
    _need(args, "inventory")
    catalog = _load_catalog(args.catalog, args.db)
    _print_json(match(_sql_text(args), catalog, load_inventory(args.inventory)).to_json())
    return EXIT_OK


def _load_examples(path: Path) -> list:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(data, list):
        raise ParseError(f"{path}: expected a JSON array of examples")
    return data


def convert_spider(tables_path: Path, data_paths: Sequence[Path], out: Path, source: str = "") -> dict:
    """Turn Spider/BIRD ``tables.json`` plus example files into catalogs.json and records.jsonl.

    Databases whose schema cannot be converted are skipped with a warning;
    their records then fail ingestion as missing catalogs.
    """
    entries = json.loads(tables_path.read_text(encoding="utf-8"))
    if not isinstance(entries, list):
        raise ParseError(f"{tables_path}: expected a JSON array of schema entries")
    catalogs = []
    for entry in entries:
        try:
            catalogs.append(from_spider_tables(entry).to_json())
        except SqlTemplateError as exc:
            log.warning("skipping schema: %s", exc)
    out.mkdir(parents=True, exist_ok=True)
    (out / "catalogs.json").write_text(json.dumps(catalogs, indent=1) + "\n", encoding="utf-8")
    n = 0
    with open(out / "records.jsonl", "w", encoding="utf-8") as fh:
        for path in data_paths:
            for i, ex in enumerate(_load_examples(path)):
                sql = ex.get("query", ex.get("SQL"))
                if not isinstance(sql, str) or not isinstance(ex.get("db_id"), str):
                    log.warning("%s[%d]: no db_id/query, skipped", path.name, i)
                    continue
                rec = QueryRecord(
                    db_id=ex["db_id"],
                    sql=sql,
                    nlq=str(ex.get("question") or ""),
                    source=source or path.stem,
                    difficulty=_DIFFICULTY.get(str(ex.get("difficulty", "")).lower()),
                    record_id=f"{path.stem}-{i}",
                )
                fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
                n += 1
    return {"catalogs": len(catalogs), "records": n}


def cmd_convert(args) -> int:
    _need(args, "tables", "out")
    if not args.data:
        raise UsageError("give at least one train/dev JSON file")
    summary = convert_spider(Path(args.tables), [Path(p) for p in args.data], Path(args.out), args.source)
    _print_json(summary)
    return EXIT_OK


# ---- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqltemplate", description="SQL template extraction and corpus statistics.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def query_args(p):
        p.add_argument("sql", nargs="?", help="SQL text (or use --file)")
        p.add_argument("-f", "--file", help="read the query from a file, '-' for stdin")

    def catalog_args(p):
        p.add_argument("--catalog", help="catalog JSON, collection of catalogs, or .sql DDL")
        p.add_argument("--db", help="db_id to pick from a multi-catalog file")

    def corpus_args(p):
        p.add_argument("--records", help="JSONL records")
        p.add_argument("--catalog", help="catalogs file or directory")
        p.add_argument("--dedup", action="store_true", help="drop repeated (db_id, sql) pairs")
        p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
        p.add_argument("--out", help="output directory")

    def seed_args(p):
        p.add_argument("--seed", type=int, default=powerlaw.DEFAULT_SEED)
        p.add_argument("--resamples", type=_resamples, default=powerlaw.DEFAULT_RESAMPLES,
                       help="bootstrap resamples; 0 skips the goodness-of-fit test")

    p = sub.add_parser("templatize", help="print hard and soft templates of one query")
    query_args(p)
    catalog_args(p)
    p.add_argument("--level", choices=["hard", "soft"], help="print only one level")
    p.set_defaults(func=cmd_templatize)

    p = sub.add_parser("profile", help="print the six complexity proxies of one query")
    query_args(p)
    catalog_args(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("ingest", help="build hard and soft template inventories")
    corpus_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="ingest a corpus and write the statistics report")
    corpus_args(p)
    seed_args(p)
    p.add_argument("--level", choices=["hard", "soft"], default="soft")
    p.add_argument("--window", type=_positive, default=stats.DEFAULT_WINDOW)
    p.add_argument("--targets", type=parse_targets, default=stats.DEFAULT_TARGETS)
    p.add_argument("--spearman-unit", choices=["table_count", "query"], default="table_count",
                   help="correlate per-table-count means (default) or raw per-query values")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("coverage", help="coverage table of a saved inventory as CSV")
    p.add_argument("--inventory", help="inventory JSON written by ingest")
    p.add_argument("--targets", type=parse_targets, default=stats.DEFAULT_TARGETS)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("fit", help="power-law fit of a saved inventory as JSON")
    p.add_argument("--inventory", help="inventory JSON written by ingest")
    p.add_argument("--mode", choices=["rank", "frequency"], default="rank")
    seed_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("match", help="look a query's template up in an inventory")
    query_args(p)
    catalog_args(p)
    p.add_argument("--inventory", help="inventory JSON written by ingest")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("convert", help="convert Spider/BIRD files to catalogs.json + records.jsonl")
    p.add_argument("data", nargs="*", help="train/dev JSON files")
    p.add_argument("--tables", help="tables.json")
    p.add_argument("--source", default="", help="source label (default: file stem)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_convert)

    _env_defaults(parser)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sqltemplate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SqlTemplateError, OSError, UnicodeDecodeError) as exc:
        print(f"sqltemplate {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"sqltemplate {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
