"""Corpus ingestion and template inventories.

Records are JSONL, one object per line::

    {"db_id": "hr", "nlq": "...", "sql": "SELECT ...", "source": "spider",
     "difficulty": "easy", "id": "optional stable id"}

Inventories persist as one JSON document whose entries are sorted by
descending count, then template string, so equal inventories serialize to
identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .complexity import PROXIES, ComplexityProfile, profile_tokens
from .errors import FormatError, LevelMismatch, MissingCatalog, SqlTemplateError
from .lexer import lex
from .schema import SchemaCatalog, load_catalogs
from .templatizer import Level, hard_template, soft_template

log = logging.getLogger(__name__)

INVENTORY_FORMAT = "sqltemplate-inventory"
INVENTORY_VERSION = 1
MAX_EXAMPLES = 5
DIFFICULTIES = ("easy", "medium", "difficult")


@dataclass(frozen=True)
class QueryRecord:
    db_id: str
    sql: str
    nlq: str = ""
    source: str = ""
    difficulty: str | None = None
    record_id: str = ""

    @property
    def key(self) -> str:
        """Stable id: the explicit one, else a digest of (db_id, sql)."""
        if self.record_id:
            return self.record_id
        digest = hashlib.sha1(f"{self.db_id}\0{self.sql}".encode("utf-8")).hexdigest()
        return digest[:12]

    @classmethod
    def from_json(cls, obj: object) -> "QueryRecord":
        if not isinstance(obj, dict):
            raise FormatError("record must be a JSON object")
        db_id, sql = obj.get("db_id"), obj.get("sql")
        if not isinstance(db_id, str) or not isinstance(sql, str):
            raise FormatError("record needs string 'db_id' and 'sql'")
        difficulty = obj.get("difficulty")
        if difficulty is not None and difficulty not in DIFFICULTIES:
            raise FormatError(f"unknown difficulty {difficulty!r}")
        return cls(
            db_id=db_id,
            sql=sql,
            nlq=str(obj.get("nlq") or ""),
            source=str(obj.get("source") or ""),
            difficulty=difficulty,
            record_id=str(obj.get("id") or ""),
        )

    def to_json(self) -> dict:
        out = {"db_id": self.db_id, "nlq": self.nlq, "sql": self.sql, "source": self.source}
        if self.difficulty:
            out["difficulty"] = self.difficulty
        if self.record_id:
            out["id"] = self.record_id
        return out


@dataclass
class InventoryEntry:
    count: int
    proxy_sums: tuple[int, ...] = (0,) * len(PROXIES)
    examples: tuple[str, ...] = ()

    def merged(self, other: "InventoryEntry") -> "InventoryEntry":
        return InventoryEntry(
            self.count + other.count,
            tuple(a + b for a, b in zip(self.proxy_sums, other.proxy_sums)),
            tuple(sorted(set(self.examples) | set(other.examples))[:MAX_EXAMPLES]),
        )


@dataclass
class TemplateInventory:
    level: Level
    entries: dict[str, InventoryEntry] = field(default_factory=dict)

    @property
    def total_queries(self) -> int:
        return sum(e.count for e in self.entries.values())

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, template: str, prof: ComplexityProfile, example: str = "") -> None:
        new = InventoryEntry(1, prof.as_tuple(), (example,) if example else ())
        old = self.entries.get(template)
        self.entries[template] = new if old is None else old.merged(new)

    def counts(self) -> list[int]:
        return sorted((e.count for e in self.entries.values()), reverse=True)

    def ranked(self) -> list[tuple[str, InventoryEntry]]:
        return sorted(self.entries.items(), key=lambda kv: (-kv[1].count, kv[0]))

    def merge(self, other: "TemplateInventory") -> "TemplateInventory":
        return merge_inventories(self, other)

    def to_json(self) -> dict:
        return {
            "format": INVENTORY_FORMAT,
            "version": INVENTORY_VERSION,
            "level": self.level.value,
            "total_queries": self.total_queries,
            "proxies": list(PROXIES),
            "entries": [
                {
                    "template": t,
                    "count": e.count,
                    "proxy_sums": dict(zip(PROXIES, e.proxy_sums)),
                    "examples": list(e.examples),
                }
                for t, e in self.ranked()
            ],
        }

    @classmethod
    def from_json(cls, obj: object) -> "TemplateInventory":
        try:
            level = Level(obj["level"])  # type: ignore[index]
            inv = cls(level)
            for item in obj["entries"]:  # type: ignore[index]
                count = int(item["count"])
                if count < 1:
                    raise FormatError(f"entry count must be >= 1, got {count}")
                sums = tuple(int(item.get("proxy_sums", {}).get(p, 0)) for p in PROXIES)
                template = item["template"]
                if template in inv.entries:
                    raise FormatError(f"duplicate template entry {template!r}")
                inv.entries[template] = InventoryEntry(count, sums, tuple(item.get("examples", ())))
            declared = obj.get("total_queries")  # type: ignore[union-attr]
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FormatError(f"malformed inventory: {exc!r}") from None
        if declared is not None and declared != inv.total_queries:
            raise FormatError(f"total_queries {declared} != sum of counts {inv.total_queries}")
        return inv

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TemplateInventory):
            return NotImplemented
        return self.to_json() == other.to_json()


def merge_inventories(*inventories: TemplateInventory) -> TemplateInventory:
    if not inventories:
        raise ValueError("nothing to merge")
    level = inventories[0].level
    out = TemplateInventory(level)
    for inv in inventories:
        if inv.level is not level:
            raise LevelMismatch(f"cannot merge {inv.level.value} into {level.value} inventory")
        for template, entry in inv.entries.items():
            old = out.entries.get(template)
            out.entries[template] = entry if old is None else old.merged(entry)
    return out


def save_inventory(inv: TemplateInventory, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inv.to_json(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def load_inventory(path: str | Path) -> TemplateInventory:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read inventory {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(obj, dict) or obj.get("format", INVENTORY_FORMAT) != INVENTORY_FORMAT:
        raise FormatError(f"{path}: not a template inventory")
    return TemplateInventory.from_json(obj)


@dataclass(frozen=True)
class Failure:
    line: int  # 1-based line in the records file, 0 if unknown
    reason: str
    error: str
    db_id: str = ""
    sql: str = ""

    def to_json(self) -> dict:
        return {"line": self.line, "error": self.error, "reason": self.reason, "db_id": self.db_id, "sql": self.sql}


@dataclass(frozen=True)
class ProcessedQuery:
    record: QueryRecord
    hard: str
    soft: str
    profile: ComplexityProfile


@dataclass
class IngestResult:
    hard: TemplateInventory
    soft: TemplateInventory
    processed: list[ProcessedQuery]
    failures: list[Failure]
    catalogs: Mapping[str, SchemaCatalog]

    @property
    def profiles(self) -> list[ComplexityProfile]:
        return [p.profile for p in self.processed]

    def table_counts(self) -> list[int]:
        """Table count of each processed record's database."""
        return [self.catalogs[p.record.db_id].table_count for p in self.processed]


def read_records(path: str | Path) -> Iterator[tuple[int, QueryRecord | Failure]]:
    """Stream (line number, record or failure) pairs from a JSONL file."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, QueryRecord.from_json(json.loads(line))
            except json.JSONDecodeError as exc:
                yield lineno, Failure(lineno, f"invalid JSON: {exc.msg}", "FormatError")
            except FormatError as exc:
                yield lineno, Failure(lineno, str(exc), "FormatError")


def process_query(record: QueryRecord, catalog: SchemaCatalog) -> ProcessedQuery:
    tokens = lex(record.sql)
    hard = hard_template(tokens, catalog)
    soft = soft_template(hard)
    return ProcessedQuery(record, hard.canonical, soft.canonical, profile_tokens(tokens, catalog))


def _process_one(args: tuple[int, QueryRecord, SchemaCatalog]) -> ProcessedQuery | Failure:
    lineno, record, catalog = args
    try:
        return process_query(record, catalog)
    except SqlTemplateError as exc:
        return Failure(lineno, str(exc), type(exc).__name__, record.db_id, record.sql)


def ingest_records(
    records: Iterable[tuple[int, QueryRecord | Failure]],
    catalogs: Mapping[str, SchemaCatalog],
    *,
    dedup: bool = False,
    workers: int = 1,
) -> IngestResult:
    """Templatize and profile every record, skipping and recording failures."""
    failures: list[Failure] = []
    jobs: list[tuple[int, QueryRecord, SchemaCatalog]] = []
    seen: set[tuple[str, str]] = set()
    n_lines = 0
    n_format = 0
    for lineno, item in records:
        n_lines += 1
        if isinstance(item, Failure):
            n_format += 1
            failures.append(item)
            continue
        catalog = catalogs.get(item.db_id)
        if catalog is None:
            failures.append(
                Failure(lineno, f"no catalog for db_id {item.db_id!r}", MissingCatalog.__name__, item.db_id, item.sql)
            )
            continue
        if dedup:
            key = (item.db_id, item.sql)
            if key in seen:
                continue
            seen.add(key)
        jobs.append((lineno, item, catalog))
    if n_lines and n_format == n_lines:
        raise FormatError("every record line is malformed")

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_process_one, jobs, chunksize=256))
    else:
        results = [_process_one(job) for job in jobs]

    hard, soft = TemplateInventory(Level.HARD), TemplateInventory(Level.SOFT)
    processed: list[ProcessedQuery] = []
    for res in results:
        if isinstance(res, Failure):
            failures.append(res)
            continue
        processed.append(res)
        hard.add(res.hard, res.profile, res.record.key)
        soft.add(res.soft, res.profile, res.record.key)
    failures.sort(key=lambda f: (f.line, f.error))
    if failures:
        log.info("%d of %d records failed", len(failures), n_lines)
    return IngestResult(hard, soft, processed, failures, catalogs)


def ingest(
    records_path: str | Path,
    catalogs_path: str | Path | Mapping[str, SchemaCatalog],
    *,
    dedup: bool = False,
    workers: int = 1,
) -> IngestResult:
    if isinstance(catalogs_path, Mapping):
        catalogs = catalogs_path
    else:
        catalogs = load_catalogs(catalogs_path)
    return ingest_records(read_records(records_path), catalogs, dedup=dedup, workers=workers)


@dataclass(frozen=True)
class MatchResult:
    hit: bool
    rank: int | None = None
    frequency: int | None = None
    template: str = ""

    def to_json(self) -> dict:
        if not self.hit:
            return {"hit": False}
        return {"hit": True, "rank": self.rank, "frequency": self.frequency, "template": self.template}


def dense_ranks(inventory: TemplateInventory) -> dict[str, int]:
    """Rank 1 is the most frequent; equal counts share a rank."""
    distinct = sorted({e.count for e in inventory.entries.values()}, reverse=True)
    rank_of = {c: r for r, c in enumerate(distinct, 1)}
    return {t: rank_of[e.count] for t, e in inventory.entries.items()}


def match(sql_text: str, catalog: SchemaCatalog, inventory: TemplateInventory) -> MatchResult:
    """Templatize at the inventory's level and look the template up."""
    hard = hard_template(lex(sql_text), catalog)
    template = (hard if inventory.level is Level.HARD else soft_template(hard)).canonical
    entry = inventory.entries.get(template)
    if entry is None:
        return MatchResult(False, template=template)
    return MatchResult(True, dense_ranks(inventory)[template], entry.count, template)


def records_from_pairs(pairs: Sequence[tuple[str, str]], source: str = "") -> list[tuple[int, QueryRecord]]:
    """Wrap (db_id, sql) pairs as numbered records; handy for in-memory corpora."""
    return [(i, QueryRecord(db_id, sql, source=source)) for i, (db_id, sql) in enumerate(pairs, 1)]
