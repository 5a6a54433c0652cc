"""Token-level handling of simple object-like and function-like ``#define``s.

Preprocessor lines are ordinary token runs to the tokenizer; this module
collects the definitions and substitutes them textually just before an
expression or statement is evaluated. Conditional inclusion, stringizing and
token pasting are out of scope; a macro that cannot be expanded is left in
place and reported through the ``on_unexpanded`` callback.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tokens as tk

MAX_EXPANSION_DEPTH = 16


@dataclass
class MacroDef:
    name: str
    params: tuple[str, ...] | None  # None for object-like macros
    body: list[tk.Token]            # trivia stripped
    file_id: str
    line: int


def _line_body(toks: list[tk.Token], j: int) -> tuple[list[tk.Token], int]:
    """Tokens up to end of a (possibly backslash-continued) directive line."""
    out = []
    n = len(toks)
    while j < n:
        t = toks[j]
        if t.kind == tk.NEWLINE:
            if out and out[-1].text == "\\" and out[-1].kind == tk.PUNCT:
                out.pop()
                j += 1
                continue
            break
        out.append(t)
        j += 1
    return [t for t in out if t.kind not in tk.TRIVIA], j


def _at_line_start(toks: list[tk.Token], i: int) -> bool:
    j = i - 1
    while j >= 0 and toks[j].kind == tk.WHITESPACE:
        j -= 1
    return j < 0 or toks[j].kind == tk.NEWLINE


def scan_defines(toks: list[tk.Token], file_id: str) -> dict[str, MacroDef]:
    """Collect every ``#define`` in a token stream."""
    out: dict[str, MacroDef] = {}
    n = len(toks)
    i = 0
    while i < n:
        t = toks[i]
        if t.kind == tk.PUNCT and t.text == "#" and _at_line_start(toks, i):
            j = tk.skip_trivia(toks, i + 1, n)
            if j < n and toks[j].text == "define":
                j = tk.skip_trivia(toks, j + 1, n)
                if j < n and toks[j].kind == tk.IDENTIFIER:
                    name = toks[j].text
                    line = toks[j].line
                    params = None
                    k = j + 1
                    # A parameter list only counts when the paren is glued
                    # to the name, per the C preprocessor.
                    if k < n and toks[k].kind == tk.PUNCT and toks[k].text == "(":
                        params, k = _scan_params(toks, k)
                    body, k = _line_body(toks, k)
                    out[name] = MacroDef(name, params, body, file_id, line)
                    i = k
                    continue
        i += 1
    return out


def _scan_params(toks: list[tk.Token], k: int) -> tuple[tuple[str, ...], int]:
    params = []
    n = len(toks)
    k += 1
    while k < n and toks[k].text != ")":
        if toks[k].kind == tk.IDENTIFIER:
            params.append(toks[k].text)
        elif toks[k].text == "...":
            params.append("...")
        k += 1
    return tuple(params), k + 1


def _split_args(toks: list[tk.Token]) -> list[list[tk.Token]]:
    args: list[list[tk.Token]] = [[]]
    depth = 0
    for t in toks:
        if t.kind == tk.PUNCT:
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            elif t.text == "," and depth == 0:
                args.append([])
                continue
        args[-1].append(t)
    return [[t for t in a if t.kind not in tk.TRIVIA] for a in args]


def expand(
    toks: list[tk.Token],
    macros: dict[str, MacroDef],
    on_unexpanded=None,
    depth: int = MAX_EXPANSION_DEPTH,
) -> list[tk.Token]:
    """Expand macro uses in ``toks``, returning a new token list.

    Expanded tokens are marked synthetic and carry the use site's position so
    diagnostics keep pointing at the line being executed.
    """
    out: list[tk.Token] = []
    n = len(toks)
    i = 0
    while i < n:
        t = toks[i]
        if t.kind == tk.IDENTIFIER and t.text in macros:
            m = macros[t.text]
            if depth <= 0:
                if on_unexpanded:
                    on_unexpanded(m.name, t.line)
                out.append(t)
                i += 1
                continue
            inner = dict(macros)
            del inner[t.text]  # no self-recursion
            if m.params is None:
                if _has_paste(m.body):
                    if on_unexpanded:
                        on_unexpanded(m.name, t.line)
                    out.append(t)
                    i += 1
                    continue
                rep = [tk.synthetic_copy(b, t) for b in m.body]
                out.extend(expand(rep, inner, on_unexpanded, depth - 1))
                i += 1
                continue
            j = tk.skip_trivia(toks, i + 1, n)
            if j >= n or toks[j].text != "(":
                out.append(t)  # function-like name without arguments: plain identifier
                i += 1
                continue
            try:
                cur = tk.Cursor(toks, j, limit=n)
                a, b = tk.find_balanced_span(cur, "(", ")")
            except Exception:
                if on_unexpanded:
                    on_unexpanded(m.name, t.line)
                out.append(t)
                i += 1
                continue
            args = _split_args(toks[a + 1 : b])
            if _has_paste(m.body) or (len(args) != len(m.params) and "..." not in m.params):
                if on_unexpanded:
                    on_unexpanded(m.name, t.line)
                out.append(t)
                i += 1
                continue
            named = dict(zip(m.params, args))
            rep = []
            for bt in m.body:
                if bt.kind == tk.IDENTIFIER and bt.text in named:
                    rep.extend(tk.synthetic_copy(x, t) for x in named[bt.text])
                else:
                    rep.append(tk.synthetic_copy(bt, t))
            out.extend(expand(rep, inner, on_unexpanded, depth - 1))
            i = b + 1
            continue
        out.append(t)
        i += 1
    return out


def _has_paste(body: list[tk.Token]) -> bool:
    return any(t.kind == tk.PUNCT and t.text in ("#", "##") for t in body)
