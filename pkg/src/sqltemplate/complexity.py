"""Six structural complexity proxies for a single query.

Conventions:

* nesting depth counts enclosing parenthesized queries; the outermost query
  is depth 0 and CTE bodies sit at depth 1;
* a subquery is any SELECT at depth >= 1, so CTE bodies count and the arms
  of a top-level UNION do not;
* comma-separated FROM items count as joins (k items -> k - 1 joins);
* tables are distinct names in FROM/JOIN position, CTE names excluded.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Sequence

from .keywords import AGGREGATES, PERCENTILE_FUNCTIONS, SET_OPERATORS
from .lexer import Token, TokenKind, TokenStream, lex
from .schema import SchemaCatalog
from .structure import Role, Shape, analyze

PROXIES = (
    "num_tables",
    "num_joins",
    "num_subqueries",
    "max_nesting_depth",
    "num_aggs_plus_group_by",
    "advanced_feature_count",
)


@dataclass(frozen=True)
class ComplexityProfile:
    num_tables: int = 0
    num_joins: int = 0
    num_subqueries: int = 0
    max_nesting_depth: int = 0
    num_aggs_plus_group_by: int = 0
    advanced_feature_count: int = 0

    def as_tuple(self) -> tuple[int, ...]:
        return astuple(self)

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _shape(tokens: Sequence[Token], shape: Shape | None) -> Shape:
    return shape if shape is not None else analyze(tokens)


def _calls(tokens: Sequence[Token], names: frozenset[str]) -> int:
    return sum(
        1
        for i, tok in enumerate(tokens[:-1])
        if tok.kind is TokenKind.KEYWORD and tok.upper in names and tokens[i + 1].is_punct("(")
    )


def count_tables(
    tokens: Sequence[Token], catalog: SchemaCatalog | None = None, shape: Shape | None = None
) -> int:
    """Distinct base tables referenced in FROM/JOIN positions.

    Names absent from ``catalog`` still count; the catalog is not needed to
    recognise a table position.
    """
    shape = _shape(tokens, shape)
    ctes = set(shape.names(tokens, Role.CTE_DEF))
    tables = set(shape.names(tokens, Role.TABLE_REF))
    return len(tables - ctes)


def count_joins(tokens: Sequence[Token], shape: Shape | None = None) -> int:
    shape = _shape(tokens, shape)
    return shape.join_keywords + shape.comma_joins


def count_subqueries(tokens: Sequence[Token], shape: Shape | None = None) -> int:
    shape = _shape(tokens, shape)
    return sum(1 for d in shape.select_depths if d >= 1)


def max_nesting_depth(tokens: Sequence[Token], shape: Shape | None = None) -> int:
    shape = _shape(tokens, shape)
    return max(shape.select_depths, default=0)


def count_aggs_group_by(tokens: Sequence[Token]) -> int:
    group_bys = sum(
        1
        for i, tok in enumerate(tokens[:-1])
        if tok.is_keyword("GROUP") and tokens[i + 1].is_keyword("BY")
    )
    return _calls(tokens, AGGREGATES) + group_bys


def count_advanced(tokens: Sequence[Token], shape: Shape | None = None) -> int:
    """OVER clauses, FILTER clauses, set operators, CTE definitions and
    percentile-family calls. ``UNION ALL`` counts once."""
    shape = _shape(tokens, shape)
    total = 0
    for i, tok in enumerate(tokens):
        if tok.kind is not TokenKind.KEYWORD:
            continue
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if tok.upper == "OVER" or tok.upper in SET_OPERATORS:
            total += 1
        elif tok.upper == "FILTER" and nxt is not None and nxt.is_punct("("):
            total += 1
    total += sum(1 for r in shape.roles if r is Role.CTE_DEF)
    total += _calls(tokens, PERCENTILE_FUNCTIONS)
    return total


def profile_tokens(tokens: TokenStream | Sequence[Token], catalog: SchemaCatalog | None = None) -> ComplexityProfile:
    tokens = list(tokens)
    shape = analyze(tokens)
    return ComplexityProfile(
        num_tables=count_tables(tokens, catalog, shape),
        num_joins=count_joins(tokens, shape),
        num_subqueries=count_subqueries(tokens, shape),
        max_nesting_depth=max_nesting_depth(tokens, shape),
        num_aggs_plus_group_by=count_aggs_group_by(tokens),
        advanced_feature_count=count_advanced(tokens, shape),
    )


def profile(sql_text: str, catalog: SchemaCatalog | None = None) -> ComplexityProfile:
    """Lex ``sql_text`` and compute all six proxies."""
    return profile_tokens(lex(sql_text), catalog)
