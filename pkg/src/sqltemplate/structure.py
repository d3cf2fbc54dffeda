"""Shallow structural pass over a token stream.

This is not a grammar. It tracks parenthesis frames and the current clause
well enough to tell table references from column references, find alias and
CTE definitions, and measure SELECT nesting. Both the templatizer and the
complexity counters read its output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .keywords import FUNCTIONS, JOIN_MODIFIERS, SET_OPERATORS
from .lexer import LITERAL_KINDS, Token, TokenKind


class Role(enum.Enum):
    TABLE_REF = "table_ref"
    VIEW_DEF = "view_def"
    TABLE_ALIAS_DEF = "table_alias_def"
    COLUMN_ALIAS_DEF = "column_alias_def"
    CTE_DEF = "cte_def"
    QUALIFIER = "qualifier"
    QUALIFIED_COLUMN = "qualified_column"
    COLUMN_REF = "column_ref"
    FUNCTION = "function"
    TYPE_NAME = "type_name"


class Paren(enum.Enum):
    CALL = "call"  # function arguments
    QUERY = "query"  # subquery, derived table or CTE body
    GROUP = "group"  # plain grouping, IN lists, column lists
    TABLE_GROUP = "table_group"  # parenthesized join in FROM
    CTE_COLUMNS = "cte_columns"
    WINDOW = "window"  # OVER (...) / FILTER (...)

    @property
    def compact(self) -> bool:
        return self is not Paren.QUERY


_QUERY_STARTERS = ("SELECT", "WITH", "VALUES")
_CLAUSE_KEYWORDS = {
    "WHERE": "WHERE",
    "HAVING": "HAVING",
    "LIMIT": "LIMIT",
    "OFFSET": "LIMIT",
    "WINDOW": "WINDOW",
    "SET": "SET",
    "VALUES": "VALUES",
    "RETURNING": "RETURNING",
}
# Keywords that may sit between a table reference and JOIN without ending
# the FROM item.
_TABLE_TRAILERS = JOIN_MODIFIERS | {"JOIN", "AS"}


@dataclass
class _Frame:
    kind: Paren | None  # None for the statement frame
    depth: int  # number of enclosing QUERY frames, including this one
    clause: str | None = None
    state: str | None = None
    call_name: str = ""
    last_table: int | None = None  # token index of the FROM item, None = subquery


@dataclass
class Shape:
    roles: list[Role | None]
    parens: dict[int, Paren]  # index of '(' and of its matching ')'
    select_depths: list[int]
    join_keywords: int = 0
    comma_joins: int = 0
    implicit_alias: set[int] = field(default_factory=set)
    # alias -> "@<table name>" or "subquery"
    alias_target: dict[str, str] = field(default_factory=dict)

    def names(self, tokens: Sequence[Token], role: Role) -> list[str]:
        """Distinct lower-cased names with ``role``, in first-appearance order."""
        out: list[str] = []
        for tok, r in zip(tokens, self.roles):
            if r is role and tok.text.lower() not in out:
                out.append(tok.text.lower())
        return out


def _next(tokens: Sequence[Token], i: int) -> Token | None:
    return tokens[i + 1] if i + 1 < len(tokens) else None


def _prev(tokens: Sequence[Token], i: int) -> Token | None:
    return tokens[i - 1] if i > 0 else None


def _ends_expression(tok: Token | None, role: Role | None) -> bool:
    if tok is None:
        return False
    if tok.kind in LITERAL_KINDS:
        return True
    if tok.kind is TokenKind.IDENTIFIER:
        return role in (Role.COLUMN_REF, Role.QUALIFIED_COLUMN)
    if tok.is_punct(")"):
        return True
    return tok.is_keyword("END")


def analyze(tokens: Sequence[Token]) -> Shape:
    """Assign roles to identifiers and classify every parenthesis."""
    n = len(tokens)
    shape = Shape(roles=[None] * n, parens={}, select_depths=[])
    roles = shape.roles
    stack: list[_Frame] = [_Frame(kind=None, depth=0)]

    for i, tok in enumerate(tokens):
        frame = stack[-1]
        nxt = _next(tokens, i)

        if tok.is_punct("("):
            kind = _classify_paren(tokens, i, frame, roles)
            shape.parens[i] = kind
            depth = frame.depth + 1 if kind is Paren.QUERY else frame.depth
            new = _Frame(kind=kind, depth=depth)
            if kind is Paren.TABLE_GROUP:
                new.clause, new.state = "FROM", "expect_table"
            elif kind is Paren.CALL:
                prev = _prev(tokens, i)
                new.call_name = prev.upper if prev is not None else ""
            stack.append(new)
            continue

        if tok.is_punct(")"):
            if len(stack) == 1:
                continue  # unbalanced; ignore
            closed = stack.pop()
            shape.parens[i] = closed.kind  # type: ignore[assignment]
            parent = stack[-1]
            if parent.state == "expect_table":
                # derived table or parenthesized join: an alias may follow
                parent.state = "after_table"
                parent.last_table = None
            elif parent.state == "cte_body":
                parent.state = "cte_done"
            continue

        if tok.kind is TokenKind.KEYWORD:
            _keyword(tok, nxt, frame, shape, i)
            continue

        if tok.is_punct(","):
            if frame.clause == "FROM" and frame.kind is not Paren.CALL:
                shape.comma_joins += 1
                frame.state = "expect_table"
            elif frame.clause == "WITH" and frame.state == "cte_done":
                frame.state = "cte_name"
            elif frame.state not in ("cte_after_name",):
                frame.state = None
            continue

        if tok.is_punct("."):
            continue

        if tok.kind is TokenKind.STAR:
            prev = _prev(tokens, i)
            if prev is not None and prev.is_punct("."):
                roles[i] = Role.QUALIFIED_COLUMN
            continue

        if tok.kind is TokenKind.IDENTIFIER:
            _identifier(tokens, i, frame, shape)
            continue

        # literals, operators, params
        if frame.state in ("after_table", "after_alias"):
            frame.state = None

    return shape


def _classify_paren(tokens, i, frame: _Frame, roles) -> Paren:
    nxt = _next(tokens, i)
    prev = _prev(tokens, i)
    starts_query = nxt is not None and nxt.kind is TokenKind.KEYWORD and nxt.upper in _QUERY_STARTERS
    if frame.state == "expect_table":
        return Paren.QUERY if starts_query else Paren.TABLE_GROUP
    if frame.state == "cte_after_name":
        return Paren.CTE_COLUMNS
    if frame.state == "cte_body" or starts_query:
        return Paren.QUERY
    if prev is not None and prev.is_keyword("OVER", "FILTER"):
        return Paren.WINDOW
    if prev is not None and prev.kind is TokenKind.KEYWORD and (
        prev.upper in FUNCTIONS or prev.upper == "CAST"
    ):
        return Paren.CALL
    if prev is not None and prev.kind is TokenKind.IDENTIFIER:
        role = roles[i - 1]
        if role in (None, Role.COLUMN_REF):
            roles[i - 1] = Role.FUNCTION
            return Paren.CALL
    return Paren.GROUP


def _keyword(tok: Token, nxt: Token | None, frame: _Frame, shape: Shape, i: int) -> None:
    word = tok.upper
    state = frame.state

    if word == "SELECT":
        shape.select_depths.append(frame.depth)
        frame.clause, frame.state = "SELECT", None
    elif word == "FROM":
        if frame.kind is not Paren.CALL:
            frame.clause, frame.state = "FROM", "expect_table"
    elif word == "JOIN":
        shape.join_keywords += 1
        frame.clause, frame.state = "FROM", "expect_table"
    elif word in ("ON", "USING"):
        frame.state = None
    elif word in ("GROUP", "ORDER", "PARTITION") and nxt is not None and nxt.is_keyword("BY"):
        frame.clause, frame.state = word + " BY", None
    elif word in SET_OPERATORS:
        frame.clause, frame.state = None, None
    elif word == "WITH":
        frame.clause, frame.state = "WITH", "cte_name"
    elif word == "RECURSIVE" and state == "cte_name":
        pass
    elif word == "AS":
        if state in ("after_table", "after_alias"):
            frame.state = "expect_alias"
        elif state == "cte_after_name":
            frame.state = "cte_body"
        elif state == "view_name":
            frame.state = None
        elif frame.kind is Paren.CALL and frame.call_name == "CAST":
            frame.state = "type_name"
        elif frame.clause == "SELECT" and frame.kind in (None, Paren.QUERY):
            frame.state = "expect_col_alias"
        else:
            frame.state = None
    elif word in ("NOT", "MATERIALIZED") and state == "cte_body":
        pass
    elif word in ("INTO", "UPDATE", "TABLE"):
        frame.clause, frame.state = "FROM", "expect_table"
        if word == "UPDATE":
            frame.clause = "UPDATE"
    elif word == "VIEW":
        frame.clause, frame.state = "VIEW", "expect_view"
    elif word == "COLLATE":
        frame.state = "type_name"
    elif word in ("IF", "EXISTS") and state in ("expect_table", "expect_view"):
        pass
    elif word in _CLAUSE_KEYWORDS:
        frame.clause, frame.state = _CLAUSE_KEYWORDS[word], None
    elif state in ("after_table", "after_alias") and word in _TABLE_TRAILERS:
        pass
    elif word == "NOT" and state in ("expect_table", "expect_view"):
        pass
    else:
        if state not in ("cte_name", "expect_table", "expect_view"):
            frame.state = None


def _identifier(tokens, i: int, frame: _Frame, shape: Shape) -> None:
    roles = shape.roles
    nxt = _next(tokens, i)
    prev = _prev(tokens, i)
    state = frame.state

    if prev is not None and prev.is_punct(".") and i >= 2 and roles[i - 2] in (
        Role.QUALIFIER,
        Role.TABLE_REF,
    ):
        if roles[i - 2] is Role.TABLE_REF:
            # schema-qualified table name: the qualifier was a database name
            roles[i - 2] = None
            roles[i] = Role.TABLE_REF
            frame.last_table = i
        else:
            roles[i] = Role.QUALIFIED_COLUMN
        return

    if state == "expect_table":
        roles[i] = Role.TABLE_REF
        frame.last_table = i
        frame.state = "after_table"
        return
    if state == "expect_view":
        roles[i] = Role.VIEW_DEF
        frame.state = "view_name"
        return
    if state in ("after_table", "expect_alias"):
        roles[i] = Role.TABLE_ALIAS_DEF
        if state == "after_table":
            shape.implicit_alias.add(i)
        if frame.last_table is None:
            target = "subquery"
        else:
            target = "@" + tok_lower(tokens[frame.last_table])
        shape.alias_target.setdefault(tok_lower(tokens[i]), target)
        frame.state = "after_alias"
        return
    if state == "cte_name":
        roles[i] = Role.CTE_DEF
        frame.state = "cte_after_name"
        return
    if state == "expect_col_alias":
        roles[i] = Role.COLUMN_ALIAS_DEF
        frame.state = None
        return
    if state == "type_name":
        roles[i] = Role.TYPE_NAME
        frame.state = None
        return

    if nxt is not None and nxt.is_punct("."):
        roles[i] = Role.QUALIFIER
        return

    if (
        frame.clause == "SELECT"
        and frame.kind in (None, Paren.QUERY)
        and _ends_expression(prev, roles[i - 1] if i else None)
        and (nxt is None or not nxt.is_punct("("))
    ):
        roles[i] = Role.COLUMN_ALIAS_DEF
        shape.implicit_alias.add(i)
        return

    roles[i] = Role.COLUMN_REF


def tok_lower(tok: Token) -> str:
    return tok.text.lower()
