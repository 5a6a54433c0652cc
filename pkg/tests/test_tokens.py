import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssi import tokens as tk
from ssi.errors import UnbalancedDelimiter


def kinds(toks):
    return [t.kind for t in toks]


def texts(toks):
    return [t.text for t in toks]


def test_empty_input():
    assert tk.tokenize("") == []


def test_simple_declaration_token_stream():
    toks = tk.tokenize("int x = a + b;")
    assert texts(toks) == ["int", " ", "x", " ", "=", " ", "a", " ", "+", " ", "b", ";"]
    assert kinds(toks) == [
        tk.KEYWORD, tk.WHITESPACE, tk.IDENTIFIER, tk.WHITESPACE, tk.PUNCT,
        tk.WHITESPACE, tk.IDENTIFIER, tk.WHITESPACE, tk.PUNCT, tk.WHITESPACE,
        tk.IDENTIFIER, tk.PUNCT,
    ]


def test_arrow_is_one_punctuator():
    toks = [t for t in tk.tokenize("writel(val, pc->base + reg)")
            if t.kind not in tk.TRIVIA]
    assert texts(toks) == ["writel", "(", "val", ",", "pc", "->", "base",
                           "+", "reg", ")"]
    assert toks[0].kind == tk.IDENTIFIER
    assert toks[5].kind == tk.PUNCT


def test_unknown_bytes_never_fail():
    toks = tk.tokenize("@ $ ` \x01")
    assert [t.kind for t in toks if t.kind != tk.WHITESPACE] == [tk.UNKNOWN] * 4


def test_bytes_input_round_trip():
    data = bytes(range(256))
    toks = tk.tokenize(data)
    assert "".join(t.text for t in toks).encode("latin-1") == data


def _recount_positions(source, toks):
    # Independent position oracle: walk the source tracking line/column.
    line, col, off = 1, 1, 0
    for t in toks:
        assert t.byte_offset == off
        assert t.line == line
        assert t.column == col
        for c in t.text:
            off += 1
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1


@settings(max_examples=300, deadline=None)
@given(st.text(min_size=0, max_size=200))
def test_round_trip_any_text(source):
    toks = tk.tokenize(source)
    assert "".join(t.text for t in toks) == source
    _recount_positions(source, toks)
    offsets = [t.byte_offset for t in toks]
    assert offsets == sorted(offsets) and len(set(offsets)) == len(offsets)


@settings(max_examples=200, deadline=None)
@given(st.binary(min_size=0, max_size=200))
def test_round_trip_any_bytes(data):
    toks = tk.tokenize(data)
    assert "".join(t.text for t in toks).encode("latin-1") == data


def test_unterminated_comment_and_string_are_total():
    toks = tk.tokenize("/* never closed")
    assert kinds(toks) == [tk.COMMENT]
    toks = tk.tokenize('"no close\nint x;')
    assert toks[0].kind == tk.STRING
    assert toks[1].kind == tk.NEWLINE


# --------------------------------------------------------- balanced spans

def oracle_balanced(toks, start, open_text, close_text):
    """Independent stack-based scan over the token list."""
    depth = 0
    for j in range(start, len(toks)):
        t = toks[j]
        if t.kind != tk.PUNCT:
            continue
        if t.text == open_text:
            depth += 1
        elif t.text == close_text:
            depth -= 1
            if depth == 0:
                return j
    return None


def test_balanced_span_with_nesting():
    toks = tk.tokenize("(a, (b))")
    cur = tk.Cursor(toks, 0)
    start, end = tk.find_balanced_span(cur, "(", ")")
    # Oracle: the stack scan finds the close at index 7 of 8 tokens.
    assert oracle_balanced(toks, 0, "(", ")") == 7
    assert (start, end) == (0, 7)
    assert end == len(toks) - 1


def test_balanced_span_unbalanced_reports_open_line():
    toks = tk.tokenize("{ if (x { }")
    with pytest.raises(UnbalancedDelimiter) as exc:
        tk.find_balanced_span(tk.Cursor(toks, 0), "{", "}")
    assert exc.value.line == 1


def test_balanced_span_contents_need_not_be_c():
    toks = tk.tokenize("{ @#$ not C ! }")
    start, end = tk.find_balanced_span(tk.Cursor(toks, 0), "{", "}")
    assert (start, end) == (0, len(toks) - 1)


def test_braces_inside_strings_and_comments_are_invisible():
    toks = tk.tokenize('{ "}" /* } */ }')
    start, end = tk.find_balanced_span(tk.Cursor(toks, 0), "{", "}")
    assert toks[end].text == "}" and end == len(toks) - 1


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="(){}ab; \n", min_size=1, max_size=60))
def test_balanced_span_matches_oracle(source):
    toks = tk.tokenize(source)
    first = next((i for i, t in enumerate(toks) if t.text == "("), None)
    if first is None:
        return
    expected = oracle_balanced(toks, first, "(", ")")
    cur = tk.Cursor(toks, first)
    if expected is None:
        with pytest.raises(UnbalancedDelimiter):
            tk.find_balanced_span(cur, "(", ")")
        return
    start, end = tk.find_balanced_span(cur, "(", ")")
    assert (start, end) == (first, expected)
    # Every prefix of the span keeps open-count >= close-count.
    depth = 0
    for t in toks[start : end + 1]:
        if t.kind == tk.PUNCT and t.text == "(":
            depth += 1
        elif t.kind == tk.PUNCT and t.text == ")":
            depth -= 1
        assert depth >= 0
    assert depth == 0


def test_cursor_trivia_skipping():
    toks = tk.tokenize("  int /* c */ x")
    cur = tk.Cursor(toks, 0)
    assert cur.peek().text == "int"
    cur = cur.advanced_to(cur.peek_index() + 1)
    assert cur.peek().text == "x"
    raw = tk.Cursor(toks, 0, skip_trivia=False)
    assert raw.peek().kind == tk.WHITESPACE
