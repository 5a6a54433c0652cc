"""Lossless tokenization of C-family source text.

The tokenizer is total: any byte sequence tokenizes without error, unknown
bytes become ``unknown-byte`` tokens, and concatenating the ``text`` of every
token reproduces the input exactly. That round-trip property is what lets
later stages skip, lazily re-parse, or quote verbatim any region of source
they never analyzed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import UnbalancedDelimiter

IDENTIFIER = "identifier"
KEYWORD = "keyword"
NUMBER = "number-literal"
STRING = "string-literal"
CHAR = "char-literal"
PUNCT = "punctuator"
COMMENT = "comment"
WHITESPACE = "whitespace"
NEWLINE = "newline"
UNKNOWN = "unknown-byte"

TRIVIA = frozenset((COMMENT, WHITESPACE, NEWLINE))

KEYWORDS = frozenset(
    """
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Bool _Static_assert
    """.split()
)

# Ordered longest-first so multi-character punctuators win.
PUNCTUATORS = (
    "<<=", ">>=", "...",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "##",
    "[", "]", "(", ")", "{", "}", ".", "&", "*", "+", "-", "~", "!",
    "/", "%", "<", ">", "^", "|", "?", ":", ";", "=", ",", "#", "\\",
)

_LETTER = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_DIGIT = frozenset("0123456789")
_NUMBER_CONT = _LETTER | _DIGIT | {"."}
_SPACE = frozenset(" \t\r\f\v")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    byte_offset: int
    line: int       # 1-based
    column: int     # 1-based
    synthetic: bool = False  # product of macro expansion, offsets borrowed


def _scan_quoted(src: str, i: int, quote: str) -> int:
    # Unterminated literals end at the newline (or EOF) to stay total.
    n = len(src)
    i += 1
    while i < n:
        c = src[i]
        if c == "\\":
            i += 2
        elif c == quote:
            return min(i + 1, n)
        elif c == "\n":
            return i
        else:
            i += 1
    return n


def _scan_number(src: str, i: int) -> int:
    n = len(src)
    i += 1
    while i < n and src[i] in _NUMBER_CONT:
        i += 1
    return i


def tokenize(source, file_id: str = "<memory>") -> list[Token]:
    """Tokenize ``source`` (str or bytes) into a lossless token sequence.

    ``file_id`` is accepted for symmetry with the rest of the pipeline; the
    tokens themselves carry only positions.
    """
    if isinstance(source, (bytes, bytearray)):
        source = bytes(source).decode("latin-1")
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        start = i
        if c == "\n":
            kind, i = NEWLINE, i + 1
        elif c in _SPACE:
            while i < n and source[i] in _SPACE:
                i += 1
            kind = WHITESPACE
        elif c == "/" and source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            kind = COMMENT
        elif c == "/" and source.startswith("/*", i):
            end = source.find("*/", i + 2)
            i = n if end < 0 else end + 2
            kind = COMMENT
        elif c == '"':
            i, kind = _scan_quoted(source, i, '"'), STRING
        elif c == "'":
            i, kind = _scan_quoted(source, i, "'"), CHAR
        elif c in _DIGIT:
            i, kind = _scan_number(source, i), NUMBER
        elif c in _LETTER:
            while i < n and (source[i] in _LETTER or source[i] in _DIGIT):
                i += 1
            kind = KEYWORD if source[start:i] in KEYWORDS else IDENTIFIER
        else:
            for p in PUNCTUATORS:
                if source.startswith(p, i):
                    i += len(p)
                    kind = PUNCT
                    break
            else:
                i += 1
                kind = UNKNOWN
        text = source[start:i]
        tokens.append(Token(kind, text, start, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rindex("\n")
        else:
            col += len(text)
    return tokens


@dataclass
class Cursor:
    """A position within a token sequence.

    ``limit`` bounds the cursor to a sub-range (a hole); ``file_id`` names the
    file the tokens came from so parse results can point back at it.
    """

    tokens: list[Token]
    index: int = 0
    skip_trivia: bool = True
    limit: int | None = None
    file_id: str = "<memory>"

    def __post_init__(self):
        if self.limit is None:
            self.limit = len(self.tokens)

    def _skip(self, j: int) -> int:
        if self.skip_trivia:
            while j < self.limit and self.tokens[j].kind in TRIVIA:
                j += 1
        return j

    def at_end(self) -> bool:
        return self._skip(self.index) >= self.limit

    def peek(self) -> Token | None:
        j = self._skip(self.index)
        return self.tokens[j] if j < self.limit else None

    def peek_index(self) -> int:
        return self._skip(self.index)

    def advanced_to(self, index: int) -> "Cursor":
        return Cursor(self.tokens, index, self.skip_trivia, self.limit, self.file_id)


def skip_trivia(tokens: list[Token], j: int, limit: int) -> int:
    while j < limit and tokens[j].kind in TRIVIA:
        j += 1
    return j


def find_balanced_span(cursor: Cursor, open_text: str, close_text: str) -> tuple[int, int]:
    """Return the inclusive token index range from ``open_text`` at the cursor
    through its matching ``close_text``.

    Only the chosen delimiter pair is counted; everything in between may be
    arbitrary tokens as long as that one pair balances. Delimiters inside
    string, char, or comment tokens are invisible because they never form
    punctuator tokens of their own.
    """
    toks = cursor.tokens
    start = cursor.peek_index()
    if start >= cursor.limit or toks[start].text != open_text:
        raise UnbalancedDelimiter(
            f"expected {open_text!r} at token {start}",
            line=toks[start].line if start < len(toks) else None,
        )
    depth = 0
    j = start
    while j < cursor.limit:
        t = toks[j]
        if t.kind == PUNCT:
            if t.text == open_text:
                depth += 1
            elif t.text == close_text:
                depth -= 1
                if depth == 0:
                    return (start, j)
        j += 1
    raise UnbalancedDelimiter(
        f"unbalanced {open_text!r} opened at line {toks[start].line}",
        line=toks[start].line,
    )


def text_of_range(tokens: list[Token], start: int, end: int) -> str:
    """Exact source text for tokens[start:end], byte for byte."""
    return "".join(t.text for t in tokens[start:end])


def compact_text(tokens: list[Token], start: int, end: int) -> str:
    """Non-trivia token texts joined by single spaces."""
    return " ".join(t.text for t in tokens[start:end] if t.kind not in TRIVIA)


def synthetic_copy(token: Token, site: Token) -> Token:
    """Copy of ``token`` positioned at a macro use site."""
    return replace(
        token,
        byte_offset=site.byte_offset,
        line=site.line,
        column=site.column,
        synthetic=True,
    )
