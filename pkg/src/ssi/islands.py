"""Compositional statement parsing with holes.

Statement rules match coarse shapes (a keyword followed by balanced delimiter
spans) and never descend into the spans they capture. The captured spans are
Holes: they are re-parsed only when execution actually reaches them, so code
that never runs is never analyzed beyond delimiter balance. This is what makes
the parser indifferent to unresolvable headers, unknown macros, or outright
garbage in untaken branches.

Brace-less dependent statements (``if (x) y = 1;``) are supported when the
dependent statement is itself terminated by a top-level ``;``. ``else if``
chains are captured as a single else-hole and rediscovered lazily, so rules
never recurse into one another.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

from . import macros as mc
from . import tokens as tk
from .errors import NoRuleMatched, UnbalancedDelimiter


@dataclass
class Hole:
    """A delimited, unanalyzed token range ``[start, end)`` of one file."""

    file_id: str
    start: int
    end: int
    nodes: list | None = field(default=None, repr=False)  # memoized parse

    def is_empty_of_code(self, tokens: list[tk.Token]) -> bool:
        return all(t.kind in tk.TRIVIA for t in tokens[self.start : self.end])


@dataclass
class Node:
    file_id: str
    line: int
    start: int
    end: int  # token span [start, end)


@dataclass
class IfNode(Node):
    cond: Hole = None
    then: Hole = None
    orelse: Hole | None = None


@dataclass
class WhileNode(Node):
    cond: Hole = None
    body: Hole = None


@dataclass
class DoWhileNode(Node):
    body: Hole = None
    cond: Hole = None


@dataclass
class ForNode(Node):
    init: Hole = None
    cond: Hole = None
    step: Hole = None
    body: Hole = None


@dataclass
class ReturnNode(Node):
    expr: Hole | None = None


@dataclass
class BreakNode(Node):
    pass


@dataclass
class ContinueNode(Node):
    pass


@dataclass
class BlockNode(Node):
    body: Hole = None


@dataclass
class SwitchNode(Node):
    subject: Hole = None
    body: Hole = None


@dataclass
class GotoNode(Node):
    label: str = ""


@dataclass
class LabelNode(Node):
    name: str | None = None
    case_expr: Hole | None = None
    is_default: bool = False


@dataclass
class DeclarationNode(Node):
    """A statement that unambiguously starts with a type or storage keyword."""


@dataclass
class ExpressionStatementNode(Node):
    """A ``;``-terminated statement; may turn out to be a typedef-led
    declaration once the interpreter's type environment is consulted."""


@dataclass
class RawNode(Node):
    directive: bool = False


@dataclass
class FunctionDefNode(Node):
    name: str = ""
    params: Hole = None
    body: Hole = None


DECL_KEYWORDS = frozenset(
    """
    static extern register const volatile inline typedef
    struct union enum void char short int long float double signed unsigned
    _Bool
    """.split()
)


def _balanced_end(toks, j, limit, file_id):
    open_text = toks[j].text
    close_text = {"(": ")", "{": "}", "[": "]"}[open_text]
    cur = tk.Cursor(toks, j, limit=limit, file_id=file_id)
    a, b = tk.find_balanced_span(cur, open_text, close_text)
    return b + 1


def _statement_span(toks, i, limit):
    """End (exclusive) of a plain statement: through the next ``;`` at
    delimiter depth 0, stopping before a ``}`` that closes an enclosing
    block. A stray leading ``}`` is consumed alone to guarantee progress."""
    depth = 0
    j = i
    while j < limit:
        t = toks[j]
        if t.kind == tk.PUNCT:
            c = t.text
            if c in "([{":
                depth += 1
            elif c == "}":
                if depth == 0:
                    return j + 1 if j == i else j
                depth -= 1
            elif c in ")]":
                if depth > 0:
                    depth -= 1
            elif c == ";" and depth == 0:
                return j + 1
        j += 1
    return limit


def _substatement(toks, k, limit, file_id):
    """Hole + end index for a dependent statement: a braced block's contents
    or a simple ``;``-terminated span."""
    k = tk.skip_trivia(toks, k, limit)
    if k < limit and toks[k].kind == tk.PUNCT and toks[k].text == "{":
        end = _balanced_end(toks, k, limit, file_id)
        return Hole(file_id, k + 1, end - 1), end
    end = _statement_span(toks, k, limit)
    return Hole(file_id, k, end), end


def _else_part(toks, k, limit, file_id):
    """Hole + end for what follows ``else``; an ``if`` chain is captured
    whole, to be re-parsed lazily as a nested if."""
    k = tk.skip_trivia(toks, k, limit)
    if k >= limit:
        return Hole(file_id, k, k), k
    if toks[k].kind == tk.PUNCT and toks[k].text == "{":
        end = _balanced_end(toks, k, limit, file_id)
        return Hole(file_id, k + 1, end - 1), end
    if not (toks[k].kind == tk.KEYWORD and toks[k].text == "if"):
        end = _statement_span(toks, k, limit)
        return Hole(file_id, k, end), end
    start = k
    j = k  # at an 'if' keyword
    while True:
        p = tk.skip_trivia(toks, j + 1, limit)
        if p >= limit or not _punct(toks[p], "("):
            j = _statement_span(toks, p, limit)
            break
        p = _balanced_end(toks, p, limit, file_id)
        _, p = _substatement(toks, p, limit, file_id)
        q = tk.skip_trivia(toks, p, limit)
        if q < limit and _kw(toks[q], "else"):
            r = tk.skip_trivia(toks, q + 1, limit)
            if r < limit and _kw(toks[r], "if"):
                j = r
                continue
            _, p = _substatement(toks, r, limit, file_id)
        j = p
        break
    return Hole(file_id, start, j), j


def _kw(t, word):
    return t is not None and t.kind == tk.KEYWORD and t.text == word


def _punct(t, text):
    return t is not None and t.kind == tk.PUNCT and t.text == text


def _match_if(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "if"):
        return None
    j = tk.skip_trivia(toks, i + 1, limit)
    if j >= limit or not _punct(toks[j], "("):
        return None
    cond_end = _balanced_end(toks, j, limit, fid)
    cond = Hole(fid, j + 1, cond_end - 1)
    then, k = _substatement(toks, cond_end, limit, fid)
    orelse = None
    k2 = tk.skip_trivia(toks, k, limit)
    if k2 < limit and _kw(toks[k2], "else"):
        orelse, k = _else_part(toks, k2 + 1, limit, fid)
    return IfNode(fid, toks[i].line, i, k, cond=cond, then=then, orelse=orelse)


def _match_while(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "while"):
        return None
    j = tk.skip_trivia(toks, i + 1, limit)
    if j >= limit or not _punct(toks[j], "("):
        return None
    cend = _balanced_end(toks, j, limit, fid)
    body, k = _substatement(toks, cend, limit, fid)
    return WhileNode(fid, toks[i].line, i, k, cond=Hole(fid, j + 1, cend - 1), body=body)


def _match_do(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "do"):
        return None
    body, k = _substatement(toks, i + 1, limit, fid)
    k = tk.skip_trivia(toks, k, limit)
    if k >= limit or not _kw(toks[k], "while"):
        return None
    j = tk.skip_trivia(toks, k + 1, limit)
    if j >= limit or not _punct(toks[j], "("):
        return None
    cend = _balanced_end(toks, j, limit, fid)
    k2 = tk.skip_trivia(toks, cend, limit)
    if k2 < limit and _punct(toks[k2], ";"):
        k2 += 1
    return DoWhileNode(fid, toks[i].line, i, k2, body=body, cond=Hole(fid, j + 1, cend - 1))


def _match_for(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "for"):
        return None
    j = tk.skip_trivia(toks, i + 1, limit)
    if j >= limit or not _punct(toks[j], "("):
        return None
    pend = _balanced_end(toks, j, limit, fid)
    # Split the header on top-level semicolons.
    parts = []
    depth = 0
    seg_start = j + 1
    for x in range(j + 1, pend - 1):
        t = toks[x]
        if t.kind == tk.PUNCT:
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            elif t.text == ";" and depth == 0:
                parts.append((seg_start, x))
                seg_start = x + 1
    parts.append((seg_start, pend - 1))
    while len(parts) < 3:
        parts.append((pend - 1, pend - 1))
    body, k = _substatement(toks, pend, limit, fid)
    (a0, a1), (b0, b1), (c0, c1) = parts[:3]
    return ForNode(
        fid, toks[i].line, i, k,
        init=Hole(fid, a0, a1), cond=Hole(fid, b0, b1), step=Hole(fid, c0, c1),
        body=body,
    )


def _match_return(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "return"):
        return None
    end = _statement_span(toks, i + 1, limit)
    expr_end = end - 1 if end > i + 1 and _punct(toks[end - 1], ";") else end
    expr = Hole(fid, i + 1, expr_end)
    if expr.is_empty_of_code(toks):
        expr = None
    return ReturnNode(fid, toks[i].line, i, end, expr=expr)


def _match_simple_kw(word, cls):
    def match(cur: tk.Cursor):
        toks, limit, fid = cur.tokens, cur.limit, cur.file_id
        i = cur.peek_index()
        if i >= limit or not _kw(toks[i], word):
            return None
        j = tk.skip_trivia(toks, i + 1, limit)
        end = j + 1 if j < limit and _punct(toks[j], ";") else i + 1
        return cls(fid, toks[i].line, i, end)

    return match


def _match_goto(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "goto"):
        return None
    j = tk.skip_trivia(toks, i + 1, limit)
    if j >= limit or toks[j].kind != tk.IDENTIFIER:
        return None
    end = _statement_span(toks, j, limit)
    return GotoNode(fid, toks[i].line, i, end, label=toks[j].text)


def _match_label(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit:
        return None
    t = toks[i]
    if _kw(t, "default"):
        j = tk.skip_trivia(toks, i + 1, limit)
        if j < limit and _punct(toks[j], ":"):
            return LabelNode(fid, t.line, i, j + 1, is_default=True)
        return None
    if _kw(t, "case"):
        j = i + 1
        depth = 0
        while j < limit:
            x = toks[j]
            if x.kind == tk.PUNCT:
                if x.text in "([{":
                    depth += 1
                elif x.text in ")]}":
                    depth -= 1
                elif x.text == ":" and depth == 0:
                    return LabelNode(fid, t.line, i, j + 1, case_expr=Hole(fid, i + 1, j))
                elif x.text == ";" and depth == 0:
                    return None
            j += 1
        return None
    if t.kind == tk.IDENTIFIER:
        j = tk.skip_trivia(toks, i + 1, limit)
        if j < limit and _punct(toks[j], ":"):
            return LabelNode(fid, t.line, i, j + 1, name=t.text)
    return None


def _match_block(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _punct(toks[i], "{"):
        return None
    end = _balanced_end(toks, i, limit, fid)
    return BlockNode(fid, toks[i].line, i, end, body=Hole(fid, i + 1, end - 1))


def _match_switch(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _kw(toks[i], "switch"):
        return None
    j = tk.skip_trivia(toks, i + 1, limit)
    if j >= limit or not _punct(toks[j], "("):
        return None
    send = _balanced_end(toks, j, limit, fid)
    k = tk.skip_trivia(toks, send, limit)
    if k >= limit or not _punct(toks[k], "{"):
        return None
    bend = _balanced_end(toks, k, limit, fid)
    return SwitchNode(
        fid, toks[i].line, i, bend,
        subject=Hole(fid, j + 1, send - 1), body=Hole(fid, k + 1, bend - 1),
    )


def _match_directive(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit or not _punct(toks[i], "#"):
        return None
    j = i
    while j < limit:
        if toks[j].kind == tk.NEWLINE:
            prev = j - 1
            while prev > i and toks[prev].kind == tk.WHITESPACE:
                prev -= 1
            if toks[prev].kind == tk.PUNCT and toks[prev].text == "\\":
                j += 1
                continue
            break
        j += 1
    return RawNode(fid, toks[i].line, i, j, directive=True)


def _match_declaration(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit:
        return None
    t = toks[i]
    if t.kind != tk.KEYWORD or t.text not in DECL_KEYWORDS:
        return None
    end = _statement_span(toks, i, limit)
    return DeclarationNode(fid, t.line, i, end)


def _match_fallback(cur: tk.Cursor):
    toks, limit, fid = cur.tokens, cur.limit, cur.file_id
    i = cur.peek_index()
    if i >= limit:
        return None
    if _punct(toks[i], "}"):
        return RawNode(fid, toks[i].line, i, i + 1)
    end = _statement_span(toks, i, limit)
    return ExpressionStatementNode(fid, toks[i].line, i, end)


class RuleRegistry:
    """Ordered statement matchers; the first match by (priority, insertion
    order) wins. User rules may be registered at any priority to shadow the
    built-ins for exactly the tokens they consume."""

    def __init__(self, defaults: bool = True):
        self._entries: list[tuple[int, int, str, object]] = []
        self._seq = 0
        if defaults:
            self._install_defaults()

    def register(self, name: str, matcher, priority: int = 500):
        bisect.insort(self._entries, (priority, self._seq, name, matcher))
        self._seq += 1

    def _install_defaults(self):
        defaults = [
            ("directive", _match_directive),
            ("label", _match_label),
            ("if", _match_if),
            ("while", _match_while),
            ("do-while", _match_do),
            ("for", _match_for),
            ("switch", _match_switch),
            ("return", _match_return),
            ("break", _match_simple_kw("break", BreakNode)),
            ("continue", _match_simple_kw("continue", ContinueNode)),
            ("goto", _match_goto),
            ("block", _match_block),
            ("declaration", _match_declaration),
        ]
        for n, (name, fn) in enumerate(defaults):
            self.register(name, fn, priority=100 + n)
        self.register("raw", _match_fallback, priority=1000)

    def __iter__(self):
        return iter(self._entries)


def parse_next_statement(cursor: tk.Cursor, rules: RuleRegistry, on_parse=None):
    """Produce exactly one statement Node at the cursor and the advanced
    cursor. Rules capture balanced spans without recursing into them."""
    if cursor.at_end():
        raise NoRuleMatched("cursor at end of input")
    for _prio, _seq, _name, matcher in rules:
        node = matcher(cursor)
        if node is not None:
            if on_parse:
                on_parse(node)
            return node, cursor.advanced_to(node.end)
    raise NoRuleMatched(f"no rule matched at token {cursor.peek_index()}")


def parse_hole_as_block(corpus: "Corpus", hole: Hole, rules: RuleRegistry, on_parse=None):
    """Parse the statements inside a hole, memoized per hole.

    Called only when execution reaches the hole; nested holes stay unparsed.
    """
    if hole.nodes is not None:
        return hole.nodes
    toks = corpus.tokens(hole.file_id)
    cur = tk.Cursor(toks, hole.start, limit=hole.end, file_id=hole.file_id)
    nodes = []
    while not cur.at_end():
        node, cur = parse_next_statement(cur, rules, on_parse)
        nodes.append(node)
    hole.nodes = nodes
    return nodes


class Corpus:
    """The tokenized source files of one module, in deterministic order."""

    def __init__(self):
        self._tokens: dict[str, list[tk.Token]] = {}
        self._sources: dict[str, str] = {}
        self._scratch_tokens: dict[str, list[tk.Token]] = {}
        self._scratch_sources: dict[str, str] = {}
        self.macros: dict[str, mc.MacroDef] = {}
        self._fn_cache: dict[str, FunctionDefNode | None] = {}

    @classmethod
    def from_sources(cls, named_sources) -> "Corpus":
        corpus = cls()
        for file_id, text in named_sources.items():
            corpus.add_file(file_id, text)
        return corpus

    @classmethod
    def from_paths(cls, paths) -> "Corpus":
        corpus = cls()
        for p in paths:
            with open(p, "rb") as f:
                data = f.read()
            corpus.add_file(str(getattr(p, "name", p)), data.decode("latin-1"))
        return corpus

    def add_file(self, file_id: str, text):
        if isinstance(text, (bytes, bytearray)):
            text = bytes(text).decode("latin-1")
        self._sources[file_id] = text
        toks = tokenize_cached(text, file_id)
        self._tokens[file_id] = toks
        self.macros.update(mc.scan_defines(toks, file_id))

    def add_scratch(self, file_id: str, text: str) -> list[tk.Token]:
        """Register tokens for a transient buffer (snippets); scratch files
        are reachable by file id but excluded from corpus scans."""
        toks = tk.tokenize(text, file_id)
        self._scratch_tokens[file_id] = toks
        self._scratch_sources[file_id] = text
        return toks

    @property
    def files(self):
        return list(self._tokens.keys())

    def tokens(self, file_id: str) -> list[tk.Token]:
        if file_id in self._tokens:
            return self._tokens[file_id]
        return self._scratch_tokens[file_id]

    def source(self, file_id: str) -> str:
        if file_id in self._sources:
            return self._sources[file_id]
        return self._scratch_sources[file_id]

    def find_function(self, name: str) -> FunctionDefNode | None:
        if name in self._fn_cache:
            return self._fn_cache[name]
        node = find_function_definition(self, name)
        self._fn_cache[name] = node
        return node


def tokenize_cached(text: str, file_id: str) -> list[tk.Token]:
    return tk.tokenize(text, file_id)


def find_function_definition(corpus: Corpus, name: str) -> FunctionDefNode | None:
    """Scan for ``name`` followed by a balanced paren span followed by ``{``.

    Only token-level scanning happens here; the parameter list and body stay
    holes until executed. Returns the first match in file order, or None.
    """
    if name in corpus.macros:
        return None
    for file_id in corpus.files:
        toks = corpus.tokens(file_id)
        n = len(toks)
        for i, t in enumerate(toks):
            if t.kind != tk.IDENTIFIER or t.text != name:
                continue
            prev = i - 1
            while prev >= 0 and toks[prev].kind in tk.TRIVIA:
                prev -= 1
            if prev >= 0 and toks[prev].kind == tk.PUNCT and toks[prev].text in (".", "->", "#"):
                continue
            j = tk.skip_trivia(toks, i + 1, n)
            if j >= n or not _punct(toks[j], "("):
                continue
            try:
                _, close = tk.find_balanced_span(
                    tk.Cursor(toks, j, limit=n, file_id=file_id), "(", ")"
                )
            except UnbalancedDelimiter:
                continue
            k = tk.skip_trivia(toks, close + 1, n)
            if k >= n or not _punct(toks[k], "{"):
                continue
            try:
                _, bend = tk.find_balanced_span(
                    tk.Cursor(toks, k, limit=n, file_id=file_id), "{", "}"
                )
            except UnbalancedDelimiter:
                continue
            return FunctionDefNode(
                file_id, t.line, i, bend + 1,
                name=name,
                params=Hole(file_id, j + 1, close),
                body=Hole(file_id, k + 1, bend),
            )
    return None
