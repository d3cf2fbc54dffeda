"""Database catalogs used for schema-aware identifier replacement.

The canonical on-disk format is a JSON object::

    {"db_id": "toy", "tables": {"employees": ["id", "name", "salary"]}}

Unknown keys are ignored. A catalog *collection* file is either a JSON array
of such objects or an object mapping db_id to one; a directory of ``*.json``
files also works (see :func:`load_catalogs`).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DuplicateTable, EmptyCatalog, LexError, ParseError
from .lexer import TokenKind, lex


class NameKind(enum.Enum):
    TABLE = "table"
    COLUMN = "column"
    UNKNOWN = "unknown"


class Clause(enum.Enum):
    """Where an identifier sits, as far as name resolution cares."""

    SELECT = "select"
    FROM = "from"
    JOIN = "join"
    WHERE = "where"
    GROUP_BY = "group_by"
    HAVING = "having"
    ORDER_BY = "order_by"
    OTHER = "other"

    @property
    def is_table_position(self) -> bool:
        return self in (Clause.FROM, Clause.JOIN)


@dataclass(frozen=True)
class SchemaCatalog:
    db_id: str
    columns_by_table: Mapping[str, tuple[str, ...]]
    _tables_lower: frozenset[str] = field(init=False, repr=False, compare=False)
    _columns_lower: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        normalized: dict[str, tuple[str, ...]] = {}
        seen: set[str] = set()
        for table, cols in self.columns_by_table.items():
            key = table.lower()
            if key in seen:
                raise DuplicateTable(f"{self.db_id}: table {table!r} defined twice")
            seen.add(key)
            normalized[table] = tuple(cols)
        object.__setattr__(self, "columns_by_table", normalized)
        object.__setattr__(self, "_tables_lower", frozenset(seen))
        object.__setattr__(
            self,
            "_columns_lower",
            frozenset(c.lower() for cols in normalized.values() for c in cols),
        )

    @property
    def tables(self) -> frozenset[str]:
        return frozenset(self.columns_by_table)

    @property
    def all_columns(self) -> frozenset[str]:
        return frozenset(c for cols in self.columns_by_table.values() for c in cols)

    @property
    def table_count(self) -> int:
        return len(self.columns_by_table)

    def has_table(self, name: str) -> bool:
        return name.lower() in self._tables_lower

    def has_column(self, name: str) -> bool:
        return name.lower() in self._columns_lower

    def lookup(self, name: str, position: Clause = Clause.OTHER) -> NameKind:
        return lookup(self, name, position)

    def to_json(self) -> dict:
        return {"db_id": self.db_id, "tables": {t: list(c) for t, c in self.columns_by_table.items()}}

    def same_names(self, other: "SchemaCatalog") -> bool:
        """Case-insensitive structural equality (ignores db_id)."""

        def norm(cat: SchemaCatalog):
            return {t.lower(): [c.lower() for c in cols] for t, cols in cat.columns_by_table.items()}

        return norm(self) == norm(other)


def lookup(catalog: SchemaCatalog, name: str, position: Clause = Clause.OTHER) -> NameKind:
    """Classify ``name`` against the catalog.

    A name that is both a table and a column resolves to TABLE only in
    FROM/JOIN position; everywhere else the column reading wins.
    """
    is_table = catalog.has_table(name)
    is_column = catalog.has_column(name)
    if is_table and (position.is_table_position or not is_column):
        return NameKind.TABLE
    if is_column:
        return NameKind.COLUMN
    return NameKind.UNKNOWN


def catalog_from_json(obj: object) -> SchemaCatalog:
    if not isinstance(obj, dict):
        raise ParseError("catalog must be a JSON object")
    db_id = obj.get("db_id")
    tables = obj.get("tables")
    if not isinstance(db_id, str):
        raise ParseError("catalog is missing string 'db_id'")
    if not isinstance(tables, dict):
        raise ParseError(f"{db_id}: 'tables' must map table names to column lists")
    if not tables:
        raise EmptyCatalog(f"{db_id}: catalog has no tables")
    for table, cols in tables.items():
        if not isinstance(cols, list) or not all(isinstance(c, str) for c in cols):
            raise ParseError(f"{db_id}: columns of {table!r} must be a list of strings")
    return _from_pairs(db_id, tables.items())


def _from_pairs(db_id: str, pairs: Iterable[tuple[str, Iterable[str]]]) -> SchemaCatalog:
    # dict() would silently merge duplicates, so check them here.
    seen: dict[str, list[str]] = {}
    for table, cols in pairs:
        if table.lower() in {t.lower() for t in seen}:
            raise DuplicateTable(f"{db_id}: table {table!r} defined twice")
        seen[table] = list(cols)
    return SchemaCatalog(db_id, seen)


def _read_json(path: Path) -> object:
    try:
        return json.loads(path.read_text(encoding="utf-8"), object_pairs_hook=_reject_dup_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


class _DupKeys(list):
    pass


def _reject_dup_keys(pairs):
    keys = [k for k, _ in pairs]
    if len(keys) != len(set(keys)):
        return _DupKeys(pairs)
    return dict(pairs)


def _json_catalog(obj: object) -> SchemaCatalog:
    if isinstance(obj, dict) and isinstance(obj.get("tables"), _DupKeys):
        db_id = obj.get("db_id", "?")
        return _from_pairs(str(db_id), obj["tables"])
    return catalog_from_json(obj)


def load_catalog_json(path: str | Path) -> SchemaCatalog:
    """Load a single catalog in the canonical JSON format."""
    return _json_catalog(_read_json(Path(path)))


def load_catalogs(path: str | Path) -> dict[str, SchemaCatalog]:
    """Load every catalog found at ``path``, keyed by db_id.

    Accepts a single catalog file, a JSON array of catalogs, an object
    mapping db_id to catalog, or a directory of ``*.json`` catalog files.
    """
    path = Path(path)
    if path.is_dir():
        found = [load_catalog_json(p) for p in sorted(path.glob("*.json"))]
    else:
        obj = _read_json(path)
        if isinstance(obj, list):
            found = [_json_catalog(o) for o in obj]
        elif isinstance(obj, dict) and "tables" in obj:
            found = [_json_catalog(obj)]
        elif isinstance(obj, dict):
            found = []
            for key, value in obj.items():
                if isinstance(value, dict):
                    value = {"db_id": key, **value}
                found.append(_json_catalog(value))
        else:
            raise ParseError(f"{path}: unrecognized catalog collection")
    catalogs: dict[str, SchemaCatalog] = {}
    for cat in found:
        if cat.db_id in catalogs:
            raise ParseError(f"{path}: db_id {cat.db_id!r} appears twice")
        catalogs[cat.db_id] = cat
    if not catalogs:
        raise EmptyCatalog(f"{path}: no catalogs found")
    return catalogs


_CONSTRAINT_STARTS = {"CONSTRAINT", "PRIMARY", "FOREIGN", "UNIQUE", "CHECK"}


def load_catalog_ddl(ddl_text: str, db_id: str = "ddl") -> SchemaCatalog:
    """Extract table and column names from SQLite ``CREATE TABLE`` statements.

    Types, constraints, indexes and other statements are skipped.
    """
    pairs: list[tuple[str, list[str]]] = []
    for statement in _split_statements(ddl_text):
        try:
            toks = list(lex(statement))
        except LexError as exc:
            raise ParseError(f"bad DDL: {exc}") from None
        if not (toks[0].is_keyword("CREATE") and any(t.is_keyword("TABLE") for t in toks[:4])):
            continue
        i = next(k for k, t in enumerate(toks) if t.is_keyword("TABLE")) + 1
        if i + 2 < len(toks) and toks[i].is_keyword("IF"):
            i += 3  # IF NOT EXISTS
        if i >= len(toks):
            raise ParseError("CREATE TABLE without a name")
        name_tok = toks[i]
        if i + 2 < len(toks) and toks[i + 1].is_punct("."):
            name_tok = toks[i + 2]
            i += 2
        if name_tok.kind not in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
            raise ParseError(f"unexpected table name {name_tok.text!r}")
        i += 1
        if i < len(toks) and toks[i].is_keyword("AS"):
            raise ParseError(f"CREATE TABLE {name_tok.text} AS SELECT is not supported")
        if i >= len(toks) or not toks[i].is_punct("("):
            raise ParseError(f"CREATE TABLE {name_tok.text}: expected column list")
        pairs.append((name_tok.text, _column_names(toks, i, name_tok.text)))
    if not pairs:
        raise EmptyCatalog("DDL contains no CREATE TABLE statements")
    return _from_pairs(db_id, pairs)


def _column_names(toks, open_idx: int, table: str) -> list[str]:
    columns: list[str] = []
    depth = 0
    at_item_start = True
    for tok in toks[open_idx:]:
        if tok.is_punct("("):
            depth += 1
            continue
        if tok.is_punct(")"):
            depth -= 1
            if depth == 0:
                return columns
            continue
        if depth == 1 and tok.is_punct(","):
            at_item_start = True
            continue
        if depth == 1 and at_item_start:
            at_item_start = False
            if tok.kind is TokenKind.KEYWORD and tok.upper in _CONSTRAINT_STARTS:
                continue
            columns.append(tok.text)
    raise ParseError(f"CREATE TABLE {table}: unbalanced parentheses")


def _split_statements(text: str) -> list[str]:
    """Split on semicolons outside quotes and comments."""
    out, buf = [], []
    i, n = 0, len(text)
    quote = None
    while i < n:
        ch = text[i]
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in "'\"`":
            quote = ch
            buf.append(ch)
        elif ch == "[":
            quote = "]"
            buf.append(ch)
        elif text.startswith("--", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        elif text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise ParseError("unterminated comment in DDL")
            i = j + 2
            continue
        elif ch == ";":
            out.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    if quote:
        raise ParseError("unterminated quote in DDL")
    out.append("".join(buf))
    return [s for s in out if s.strip()]


def from_spider_tables(entry: Mapping) -> SchemaCatalog:
    """Convert one entry of a Spider/BIRD ``tables.json`` file."""
    try:
        db_id = entry["db_id"]
        tables = entry.get("table_names_original") or entry["table_names"]
        columns = entry.get("column_names_original") or entry["column_names"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"not a Spider tables.json entry: missing {exc}") from None
    by_table: list[tuple[str, list[str]]] = [(t, []) for t in tables]
    for table_idx, col in columns:
        if table_idx < 0:
            continue  # the synthetic "*" column
        by_table[table_idx][1].append(col)
    return _from_pairs(db_id, by_table)
