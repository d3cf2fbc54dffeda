"""SQLite-dialect tokenizer.

Comments are dropped, string literals are typed (plain string vs. date),
quoted names become identifiers, and a single trailing semicolon is allowed.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    EmptyInput,
    MultipleStatements,
    UnexpectedCharacter,
    UnterminatedComment,
    UnterminatedString,
)
from .keywords import FUNCTIONS, RESERVED


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    NUMBER_LITERAL = "number"
    STRING_LITERAL = "string"
    DATE_LITERAL = "date"
    BOOLEAN_LITERAL = "boolean"
    NULL_LITERAL = "null"
    OPERATOR = "operator"
    PUNCT = "punct"
    STAR = "star"
    PARAM = "param"


LITERAL_KINDS = frozenset(
    {
        TokenKind.NUMBER_LITERAL,
        TokenKind.STRING_LITERAL,
        TokenKind.DATE_LITERAL,
        TokenKind.BOOLEAN_LITERAL,
        TokenKind.NULL_LITERAL,
    }
)

# YYYY-MM-DD with an optional " HH:MM" or " HH:MM:SS" suffix.
DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}(?: \d{2}:\d{2}(?::\d{2})?)?")

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<line_comment>--[^\n]*)
    | (?P<block_comment>/\*.*?\*/)
    | (?P<open_comment>/\*)
    | (?P<blob>[xX]'[0-9a-fA-F]*')
    | (?P<string>'(?:[^']|'')*')
    | (?P<dquote>"(?:[^"]|"")*")
    | (?P<backtick>`(?:[^`]|``)*`)
    | (?P<bracket>\[[^\]]*\])
    | (?P<open_quote>['"`\[])
    | (?P<number>0[xX][0-9a-fA-F]+|(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<param>\?\d*|[:@$][A-Za-z_][A-Za-z0-9_]*)
    | (?P<word>[A-Za-z_\u0080-￿][A-Za-z0-9_$\u0080-￿]*)
    | (?P<op>->>|->|\|\||<<|>>|<=|>=|==|!=|<>|[-+/%<>=~&|])
    | (?P<star>\*)
    | (?P<punct>[(),;.])
    """,
    re.VERBOSE | re.DOTALL,
)

_QUOTE_CLOSERS = {'"': '"', "`": "`", "[": "]"}

# Tokens after which a '-'/'+' is binary rather than a sign.
_OPERAND_KINDS = LITERAL_KINDS | {TokenKind.IDENTIFIER, TokenKind.PARAM, TokenKind.STAR}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    start: int = 0
    end: int = 0
    quote: str | None = None  # opening quote char for quoted names/strings

    @property
    def upper(self) -> str:
        return self.text.upper()

    def is_keyword(self, *words: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.upper in words

    def is_punct(self, char: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.text == char

    @property
    def is_literal(self) -> bool:
        return self.kind in LITERAL_KINDS


@dataclass(frozen=True)
class TokenStream(Sequence[Token]):
    tokens: tuple[Token, ...]
    source: str = ""

    @property
    def source_span_map(self) -> list[tuple[int, int]]:
        return [(t.start, t.end) for t in self.tokens]

    def __getitem__(self, index):  # type: ignore[override]
        return self.tokens[index]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def kinds(self) -> list[TokenKind]:
        return [t.kind for t in self.tokens]


def _unquote(body: str, quote: str) -> str:
    return body.replace(quote * 2, quote)


def _string_kind(value: str) -> TokenKind:
    return TokenKind.DATE_LITERAL if DATE_RE.fullmatch(value) else TokenKind.STRING_LITERAL


def _scan(sql: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(sql)
    while pos < n:
        m = _TOKEN_RE.match(sql, pos)
        if m is None:
            raise UnexpectedCharacter(f"unexpected character {sql[pos]!r}", pos)
        group = m.lastgroup
        text = m.group()
        start, end = m.span()
        pos = end
        if group in ("ws", "line_comment", "block_comment"):
            continue
        if group == "open_comment":
            raise UnterminatedComment("unterminated block comment", start)
        if group == "open_quote":
            raise UnterminatedString(f"unterminated quote {text!r}", start)
        if group == "string":
            value = _unquote(text[1:-1], "'")
            tokens.append(Token(_string_kind(value), value, start, end, "'"))
        elif group == "blob":
            tokens.append(Token(TokenKind.STRING_LITERAL, text, start, end))
        elif group in ("dquote", "backtick", "bracket"):
            opener = text[0]
            value = text[1:-1]
            if opener != "[":
                value = _unquote(value, _QUOTE_CLOSERS[opener])
            tokens.append(Token(TokenKind.IDENTIFIER, value, start, end, opener))
        elif group == "number":
            tokens.append(Token(TokenKind.NUMBER_LITERAL, text, start, end))
        elif group == "param":
            tokens.append(Token(TokenKind.PARAM, text, start, end))
        elif group == "word":
            tokens.append(Token(_word_kind(text, sql, end), text, start, end))
        elif group == "op":
            tokens.append(Token(TokenKind.OPERATOR, text, start, end))
        elif group == "star":
            tokens.append(Token(TokenKind.STAR, text, start, end))
        else:
            tokens.append(Token(TokenKind.PUNCT, text, start, end))
    return tokens


def _word_kind(word: str, sql: str, end: int) -> TokenKind:
    upper = word.upper()
    if upper in ("TRUE", "FALSE"):
        return TokenKind.BOOLEAN_LITERAL
    if upper == "NULL":
        return TokenKind.NULL_LITERAL
    if upper in RESERVED:
        return TokenKind.KEYWORD
    if upper in FUNCTIONS:
        rest = sql[end:].lstrip()
        if rest.startswith("("):
            return TokenKind.KEYWORD
    return TokenKind.IDENTIFIER


def _fold_signs(tokens: list[Token]) -> list[Token]:
    """Merge a unary sign directly attached to a number into the literal."""
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if (
            tok.kind is TokenKind.OPERATOR
            and tok.text in "-+"
            and nxt is not None
            and nxt.kind is TokenKind.NUMBER_LITERAL
            and nxt.start == tok.end
            and not _ends_operand(out[-1] if out else None)
        ):
            out.append(Token(TokenKind.NUMBER_LITERAL, tok.text + nxt.text, tok.start, nxt.end))
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _ends_operand(prev: Token | None) -> bool:
    if prev is None:
        return False
    if prev.kind in _OPERAND_KINDS:
        return True
    if prev.is_punct(")"):
        return True
    return prev.is_keyword("END", "CURRENT_DATE", "CURRENT_TIME", "CURRENT_TIMESTAMP")


def lex(sql_text: str) -> TokenStream:
    """Tokenize one SQLite statement.

    Raises :class:`UnterminatedString`, :class:`UnterminatedComment`,
    :class:`MultipleStatements` or :class:`EmptyInput`.
    """
    if isinstance(sql_text, bytes):
        sql_text = sql_text.decode("utf-8")
    tokens = _fold_signs(_scan(sql_text))

    # Only trailing semicolons are tolerated.
    body: list[Token] = []
    for i, tok in enumerate(tokens):
        if tok.is_punct(";"):
            if any(not t.is_punct(";") for t in tokens[i + 1 :]):
                raise MultipleStatements("more than one statement in input", tok.start)
            break
        body.append(tok)
    if not body:
        raise EmptyInput("no SQL tokens in input")
    return TokenStream(tuple(body), sql_text)


def classify_literal(token: Token | str) -> str:
    """Map a literal to its placeholder: num, string, date, boolean or others.

    Accepts a :class:`Token` or raw lexeme text (quotes included for strings).
    """
    if isinstance(token, Token):
        kind = token.kind
        if kind is TokenKind.IDENTIFIER and token.quote == '"':
            kind = _string_kind(token.text)
        return _LITERAL_PLACEHOLDER[kind]
    text = token.strip()
    upper = text.upper()
    if upper in ("TRUE", "FALSE"):
        return "boolean"
    if upper == "NULL":
        return "others"
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return _LITERAL_PLACEHOLDER[_string_kind(_unquote(text[1:-1], text[0]))]
    return "num"


_LITERAL_PLACEHOLDER = {
    TokenKind.NUMBER_LITERAL: "num",
    TokenKind.STRING_LITERAL: "string",
    TokenKind.DATE_LITERAL: "date",
    TokenKind.BOOLEAN_LITERAL: "boolean",
    TokenKind.NULL_LITERAL: "others",
}


def render(stream: Sequence[Token]) -> str:
    """Re-serialize tokens, one space apart, restoring quotes."""
    parts = []
    for tok in stream:
        if tok.quote == "'":
            parts.append("'" + tok.text.replace("'", "''") + "'")
        elif tok.quote == "[":
            parts.append("[" + tok.text + "]")
        elif tok.quote:
            q = tok.quote
            parts.append(q + tok.text.replace(q, q * 2) + q)
        else:
            parts.append(tok.text)
    return " ".join(parts)
