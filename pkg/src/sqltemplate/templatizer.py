"""Staged abstraction: SQL -> hard template -> soft template.

Hard templates replace literals with typed placeholders and identifiers with
role placeholders (``table_name``, ``col_name``, ``table_alias0``,
``column_alias0``, ``CTE0``, ``new_table``/``new_view``/``new_column``).
Soft templates then collapse every identifier placeholder, qualified pairs
included, to ``variable``.

Canonical rendering (the identity key of a template):

* keywords upper case, one space between tokens, no trailing semicolon;
* ``,`` attaches to the token before it, ``.`` binds without spaces;
* parentheses around a subquery are spaced (``( SELECT ... )``), all other
  parentheses are tight (``COUNT(*)``, ``IN (num, num)``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .errors import WrongLevel
from .keywords import SOFT_KEYWORDS
from .lexer import Token, TokenKind, TokenStream, classify_literal, lex
from .schema import Clause, NameKind, SchemaCatalog, lookup
from .structure import Paren, Role, Shape, analyze


class Level(str, enum.Enum):
    HARD = "hard"
    SOFT = "soft"


class Part(enum.Enum):
    KEYWORD = "keyword"
    IDENT = "ident"  # identifier placeholder
    LITERAL = "literal"  # typed literal placeholder
    SYMBOL = "symbol"  # operators, punctuation, star, params


@dataclass(frozen=True)
class TemplateToken:
    text: str
    part: Part
    glue: bool = False  # render without a space before this token


IDENT_PLACEHOLDERS = ("table_name", "col_name", "new_table", "new_view", "new_column")
LITERAL_PLACEHOLDERS = ("num", "string", "date", "boolean", "jsonb", "others")
SOFT_VARIABLE = "variable"


@dataclass(frozen=True)
class Template:
    level: Level
    tokens: tuple[TemplateToken, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def canonical(self) -> str:
        return render_tokens(self.tokens)

    def __str__(self) -> str:
        return self.canonical


def render_tokens(tokens: Sequence[TemplateToken]) -> str:
    out: list[str] = []
    for i, tok in enumerate(tokens):
        if i and not tok.glue:
            out.append(" ")
        out.append(tok.text)
    return "".join(out)


@dataclass
class AliasEnvironment:
    """First-appearance numbering of table aliases, column aliases and CTEs."""

    table_alias_order: dict[str, int] = field(default_factory=dict)
    column_alias_order: dict[str, int] = field(default_factory=dict)
    cte_order: dict[str, int] = field(default_factory=dict)
    alias_target: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_shape(cls, tokens: Sequence[Token], shape: Shape) -> "AliasEnvironment":
        env = cls(alias_target=dict(shape.alias_target))
        for tok, role in zip(tokens, shape.roles):
            key = tok.text.lower()
            if role is Role.TABLE_ALIAS_DEF:
                env.table_alias_order.setdefault(key, len(env.table_alias_order))
            elif role is Role.COLUMN_ALIAS_DEF:
                env.column_alias_order.setdefault(key, len(env.column_alias_order))
            elif role is Role.CTE_DEF:
                env.cte_order.setdefault(key, len(env.cte_order))
        return env

    def table_alias(self, name: str) -> str | None:
        idx = self.table_alias_order.get(name.lower())
        return None if idx is None else f"table_alias{idx}"

    def column_alias(self, name: str) -> str | None:
        idx = self.column_alias_order.get(name.lower())
        return None if idx is None else f"column_alias{idx}"

    def cte(self, name: str) -> str | None:
        idx = self.cte_order.get(name.lower())
        return None if idx is None else f"CTE{idx}"

    def alias_is_derived(self, name: str) -> bool:
        """True when the alias names a subquery or a CTE rather than a base table."""
        target = self.alias_target.get(name.lower(), "")
        return target == "subquery" or target[1:] in self.cte_order


class _HardRenderer:
    def __init__(self, tokens: Sequence[Token], catalog: SchemaCatalog):
        self.tokens = tokens
        self.catalog = catalog
        self.shape = analyze(tokens)
        self.env = AliasEnvironment.from_shape(tokens, self.shape)
        self.warnings: list[str] = []
        self.out: list[TemplateToken] = []

    def run(self) -> Template:
        tokens, shape = self.tokens, self.shape
        for i, tok in enumerate(tokens):
            glue = self._glue(i)
            if i in shape.implicit_alias:
                self.out.append(TemplateToken("AS", Part.KEYWORD, glue))
                glue = False
            self.out.append(self._convert(i, tok, glue))
        return Template(Level.HARD, tuple(self.out), tuple(self.warnings))

    def _glue(self, i: int) -> bool:
        if i == 0:
            return False
        tok, prev = self.tokens[i], self.tokens[i - 1]
        parens = self.shape.parens
        if tok.is_punct(",") or tok.is_punct(".") or prev.is_punct("."):
            return True
        if tok.is_punct("("):
            return parens.get(i) in (Paren.CALL, Paren.CTE_COLUMNS)
        if tok.is_punct(")"):
            return parens.get(i, Paren.GROUP).compact
        if prev.is_punct("("):
            return parens.get(i - 1, Paren.GROUP).compact
        return False

    def _convert(self, i: int, tok: Token, glue: bool) -> TemplateToken:
        kind = tok.kind
        if kind is TokenKind.KEYWORD:
            return TemplateToken(tok.upper, Part.KEYWORD, glue)
        if tok.is_literal:
            return TemplateToken(classify_literal(tok), Part.LITERAL, glue)
        if kind is TokenKind.PARAM:
            return TemplateToken("?", Part.SYMBOL, glue)
        if kind is TokenKind.STAR:
            return TemplateToken("*", Part.SYMBOL, glue)
        if kind in (TokenKind.OPERATOR, TokenKind.PUNCT):
            return TemplateToken(tok.text, Part.SYMBOL, glue)
        return self._identifier(i, tok, glue)

    def _identifier(self, i: int, tok: Token, glue: bool) -> TemplateToken:
        role = self.shape.roles[i]
        env, name = self.env, tok.text

        def ident(text: str) -> TemplateToken:
            return TemplateToken(text, Part.IDENT, glue)

        if role is Role.CTE_DEF:
            return ident(env.cte(name))  # type: ignore[arg-type]
        if role is Role.TABLE_ALIAS_DEF:
            return ident(env.table_alias(name))  # type: ignore[arg-type]
        if role is Role.COLUMN_ALIAS_DEF:
            return ident(env.column_alias(name))  # type: ignore[arg-type]
        if role in (Role.FUNCTION, Role.TYPE_NAME):
            return TemplateToken(name.upper(), Part.KEYWORD, glue)
        if role is Role.TABLE_REF:
            cte = env.cte(name)
            if cte:
                return ident(cte)
            if self.catalog.has_table(name):
                return ident("table_name")
            return ident("new_table")
        if role is Role.VIEW_DEF:
            return ident("table_name" if self.catalog.has_table(name) else "new_view")
        if role is Role.QUALIFIER:
            return ident(self._qualifier(name))
        if role is Role.QUALIFIED_COLUMN:
            return ident(self._qualified_column(i, name))
        return self._column_ref(tok, glue)

    def _qualifier(self, name: str) -> str:
        env = self.env
        placeholder = env.table_alias(name) or env.cte(name)
        if placeholder:
            return placeholder
        if self.catalog.has_table(name):
            return "table_name"
        self.warnings.append(f"unresolvable qualifier {name!r}; using new_table")
        return "new_table"

    def _qualified_column(self, i: int, name: str) -> str:
        qualifier = self.tokens[i - 2].text
        env = self.env
        derived = env.alias_is_derived(qualifier) or env.cte(qualifier) is not None
        alias = env.column_alias(name)
        if derived and alias:
            return alias
        if self.catalog.has_column(name):
            return "col_name"
        return alias or "new_column"

    def _column_ref(self, tok: Token, glue: bool) -> TemplateToken:
        env, name = self.env, tok.text
        kind = lookup(self.catalog, name, Clause.OTHER)
        if kind is NameKind.COLUMN:
            return TemplateToken("col_name", Part.IDENT, glue)
        placeholder = env.column_alias(name) or env.cte(name) or env.table_alias(name)
        if placeholder:
            return TemplateToken(placeholder, Part.IDENT, glue)
        if kind is NameKind.TABLE:
            return TemplateToken("table_name", Part.IDENT, glue)
        if tok.quote == '"':
            # SQLite reads an unresolvable double-quoted name as a string.
            return TemplateToken(classify_literal(tok), Part.LITERAL, glue)
        if tok.quote is None and name.upper() in SOFT_KEYWORDS:
            return TemplateToken(name.upper(), Part.KEYWORD, glue)
        return TemplateToken("new_column", Part.IDENT, glue)


def hard_template(tokens: TokenStream | Sequence[Token], catalog: SchemaCatalog) -> Template:
    """Abstract literals and schema identifiers, keeping alias/CTE structure."""
    return _HardRenderer(list(tokens), catalog).run()


def _collapse(tokens: Sequence[TemplateToken]) -> tuple[TemplateToken, ...]:
    out: list[TemplateToken] = []
    i, n = 0, len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.part is Part.IDENT:
            # swallow a qualified chain X.Y (or X.*) into one variable
            j = i
            while j + 2 < n and tokens[j + 1].text == "." and tokens[j + 2].part is Part.IDENT:
                j += 2
            out.append(TemplateToken(SOFT_VARIABLE, Part.IDENT, tok.glue))
            if j + 2 < n and tokens[j + 1].text == "." and tokens[j + 2].text == "*":
                out.extend(tokens[j + 1 : j + 3])
                j += 2
            i = j + 1
            continue
        out.append(tok)
        i += 1
    return tuple(out)


def soft_template(hard: Template) -> Template:
    """Collapse every identifier placeholder of a hard template to ``variable``."""
    if hard.level is not Level.HARD:
        raise WrongLevel(f"soft_template expects a HARD template, got {hard.level.value}")
    return Template(Level.SOFT, _collapse(hard.tokens), hard.warnings)


def templatize(sql_text: str, catalog: SchemaCatalog) -> tuple[Template, Template]:
    """Lex ``sql_text`` and return its (hard, soft) templates."""
    hard = hard_template(lex(sql_text), catalog)
    return hard, soft_template(hard)


def normalize_spacing(text: str) -> str:
    """Whitespace-insensitive form used to compare against hand-written templates."""
    return "".join(text.split())
