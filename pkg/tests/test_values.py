import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssi.errors import (
    ConflictingBinding,
    DivisionByConcreteZero,
    UnsupportedOperation,
)
from ssi.values import (
    Concrete,
    Residual,
    SymbolRoot,
    ValueTable,
    make_concrete,
    to_int,
)

AT = ("t.c", 1)


def table():
    return ValueTable()


# -------------------------------------------------------- reference oracle

def oracle_int(width, bits, signed):
    bits &= (1 << width) - 1
    if signed and bits >> (width - 1):
        return bits - (1 << width)
    return bits


def oracle_binop(op, a, b):
    """Big-integer evaluation mod 2**width, written independently of the
    value module: explicit promotion to the larger width, truncating
    division, arithmetic right shift for signed operands."""
    w = max(a[0], b[0])
    mask = (1 << w) - 1
    av = oracle_int(*a)
    bv = oracle_int(*b)
    rs = a[2] and b[2]
    if op in ("==", "!=", "<", "<=", ">", ">="):
        if op in ("==", "!="):
            eq = (av & mask) == (bv & mask)
            return (32, int(eq if op == "==" else not eq), True)
        x, y = (av, bv) if rs else (av & mask, bv & mask)
        table_ = {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}
        return (32, int(table_[op]), True)
    if op in ("&&", "||"):
        ta, tb = (av & mask) != 0, (bv & mask) != 0
        return (32, int(ta and tb if op == "&&" else ta or tb), True)
    if op == "+":
        r = av + bv
    elif op == "-":
        r = av - bv
    elif op == "*":
        r = av * bv
    elif op in ("/", "%"):
        q = abs(av) // abs(bv)
        if (av < 0) != (bv < 0):
            q = -q
        r = q if op == "/" else av - q * bv
    elif op == "&":
        r = (av & mask) & (bv & mask)
    elif op == "|":
        r = (av & mask) | (bv & mask)
    elif op == "^":
        r = (av & mask) ^ (bv & mask)
    elif op == "<<":
        r = av << (bv % w)
    elif op == ">>":
        r = av >> (bv % w)
    else:
        raise AssertionError(op)
    return (w, r & mask, rs)


ALL_OPS = ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>",
           "==", "!=", "<", "<=", ">", ">=", "&&", "||"]

operand = st.tuples(
    st.sampled_from([8, 16, 32, 64]),
    st.integers(min_value=0, max_value=(1 << 64) - 1),
    st.booleans(),
).map(lambda t: (t[0], t[1] & ((1 << t[0]) - 1), t[2]))


@settings(max_examples=2000, deadline=None)
@given(st.sampled_from(ALL_OPS), operand, operand)
def test_concrete_closure_matches_oracle(op, a, b):
    vals = table()
    va = vals.concrete(a[0], a[1], AT, signed=a[2])
    vb = vals.concrete(b[0], b[1], AT, signed=b[2])
    if op in ("/", "%") and b[1] == 0:
        with pytest.raises(DivisionByConcreteZero):
            vals.apply_binop(op, va, vb, AT)
        return
    out = vals.apply_binop(op, va, vb, AT)
    assert isinstance(out.payload, Concrete)
    ew, ebits, esigned = oracle_binop(op, a, b)
    assert out.payload.width == ew
    assert out.payload.bits == ebits
    assert out.payload.signed == esigned


def test_greedy_addition_of_constants():
    vals = table()
    one = vals.concrete(32, 1, AT, signed=True)
    zero = vals.concrete(32, 0, AT, signed=True)
    x = vals.apply_binop("+", one, zero, AT)
    assert isinstance(x.payload, Concrete) and to_int(x.payload) == 1


def test_additive_identity_fold_returns_operand():
    vals = table()
    s = vals.fresh_symbol("s", AT)
    zero = vals.concrete(32, 0, AT)
    assert vals.apply_binop("+", s, zero, AT) is s
    assert vals.apply_binop("+", zero, s, AT) is s
    assert vals.apply_binop("|", s, zero, AT) is s
    assert vals.apply_binop("^", s, zero, AT) is s
    assert vals.apply_binop("-", s, zero, AT) is s
    assert vals.apply_binop("<<", s, zero, AT) is s
    assert vals.apply_binop(">>", s, zero, AT) is s
    assert vals.apply_binop("*", s, vals.concrete(32, 1, AT), AT) is s


def test_zero_folds_produce_concrete_zero():
    vals = table()
    s = vals.fresh_symbol("s", AT)
    zero = vals.concrete(32, 0, AT)
    for op in ("*", "&"):
        out = vals.apply_binop(op, s, zero, AT)
        assert isinstance(out.payload, Concrete) and out.payload.bits == 0
        assert out.prov.parents == (s.id, zero.id)


@settings(max_examples=300, deadline=None)
@given(operand)
def test_fold_soundness_by_substitution(x):
    # For each identity fold, substituting a concrete value for the symbolic
    # operand must equal direct computation, compared with C `==` semantics.
    vals = table()
    cases = [("+", 0), ("-", 0), ("*", 1), ("*", 0), ("&", 0), ("|", 0),
             ("^", 0), ("<<", 0), (">>", 0)]
    for op, k in cases:
        s = vals.fresh_symbol("x", AT)
        ident = vals.concrete(32, k, AT)
        folded = vals.apply_binop(op, s, ident, AT)
        vals.concretize(s, make_concrete(*((x[0], x[1], x[2]))), "user-supplied", AT)
        left = vals.resolve(folded)
        direct = oracle_binop(op, x, (32, k, False))
        eq = oracle_binop("==", (left.width, left.bits, left.signed), direct)
        assert eq[1] == 1, (op, k, x, left, direct)


def test_shift_left_bit3_is_eight():
    # Oracle: (1 << 3) mod 2**32 == 8.
    assert (1 << 3) % (1 << 32) == 8
    vals = table()
    out = vals.apply_binop("<<", vals.concrete(32, 1, AT),
                           vals.concrete(32, 3, AT), AT)
    assert out.payload == Concrete(32, 8, False)


def test_division_by_concrete_zero_raises_even_with_symbolic_lhs():
    vals = table()
    s = vals.fresh_symbol("s", AT)
    with pytest.raises(DivisionByConcreteZero):
        vals.apply_binop("/", s, vals.concrete(32, 0, AT), AT)


def test_unsupported_operator():
    vals = table()
    a = vals.concrete(32, 1, AT)
    with pytest.raises(UnsupportedOperation):
        vals.apply_binop("**", a, a, AT)


# ------------------------------------------------------------ fresh symbols

def test_fresh_symbols_are_distinct():
    vals = table()
    a = vals.fresh_symbol("ret:of_address_to_resource@1212", AT)
    b = vals.fresh_symbol("ret:of_address_to_resource@1212", AT)
    assert a.id != b.id
    assert a.payload.label == b.payload.label


def test_memory_cell_label_shape():
    vals = table()
    v = vals.fresh_symbol("mem:(1104,0)", AT)
    assert isinstance(v.payload, SymbolRoot)
    assert v.payload.label == "mem:(1104,0)"


# --------------------------------------------------------------- concretize

def test_concretize_then_resolve_through_terms():
    vals = table()
    gpio = vals.fresh_symbol("arg:gpio", AT)
    shifted = vals.apply_binop("%", gpio, vals.concrete(32, 32, AT), AT)
    assert not isinstance(vals.resolve(shifted), Concrete)
    vals.concretize(gpio, make_concrete(32, 3), "user-supplied", AT)
    out = vals.resolve(shifted)
    assert isinstance(out, Concrete) and to_int(out) == 3


def test_concretize_idempotent_and_conflicting():
    vals = table()
    s = vals.fresh_symbol("s", AT)
    vals.concretize(s, make_concrete(32, 7), "branch-comparison", AT)
    vals.concretize(s, make_concrete(32, 7), "user-supplied", AT)  # same: fine
    with pytest.raises(ConflictingBinding):
        vals.concretize(s, make_concrete(32, 5), "user-supplied", AT)


def test_concretize_rejects_non_symbols():
    vals = table()
    c = vals.concrete(32, 1, AT)
    with pytest.raises(UnsupportedOperation):
        vals.concretize(c, make_concrete(32, 1), "user-supplied", AT)


# ----------------------------------------------------------------- resolve

def test_resolve_residual_reports_blockers():
    vals = table()
    s = vals.fresh_symbol("ret:of_address_to_resource@1212", AT)
    t = vals.apply_binop("+", s, vals.concrete(32, 1, AT), AT)
    r = vals.resolve(t)
    assert isinstance(r, Residual)
    assert vals.labels_for(r.blockers) == ["ret:of_address_to_resource@1212"]


def test_resolve_deep_chain_iteratively():
    vals = table()
    s = vals.fresh_symbol("s", AT)
    v = s
    for _ in range(150):
        v = vals.apply_binop("+", v, vals.concrete(32, 1, AT), AT)
    vals.concretize(s, make_concrete(32, 2), "user-supplied", AT)
    out = vals.resolve(v)
    assert isinstance(out, Concrete) and to_int(out) == 152


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_residual_completeness(data):
    # Binding every reported blocker and re-resolving yields a concrete
    # value, for random symbol-rooted terms (no pointers involved).
    vals = table()
    ops = ["+", "-", "*", "&", "|", "^", "<<", ">>", "==", "<"]
    roots = [vals.fresh_symbol(f"s{i}", AT) for i in range(4)]
    pool = list(roots) + [vals.concrete(32, data.draw(st.integers(0, 50)), AT)]
    for _ in range(data.draw(st.integers(1, 12))):
        op = data.draw(st.sampled_from(ops))
        a = data.draw(st.sampled_from(pool))
        b = data.draw(st.sampled_from(pool))
        pool.append(vals.apply_binop(op, a, b, AT))
    top = pool[-1]
    r = vals.resolve(top)
    if isinstance(r, Concrete):
        return
    assert r.blockers
    for blocker in r.blockers:
        vals.concretize(vals.get(blocker),
                        make_concrete(32, data.draw(st.integers(0, 31))),
                        "user-supplied", AT)
    assert isinstance(vals.resolve(top), Concrete)


# -------------------------------------------------------------- provenance

def test_trace_of_literal_is_single_entry():
    vals = table()
    v = vals.concrete(32, 3, AT)
    assert len(vals.provenance_trace(v)) == 1


def test_trace_of_sum_lists_creations_in_order():
    vals = table()
    va = vals.concrete(32, 1, ("t.c", 1), desc="literal 1")
    vb = vals.concrete(32, 0, ("t.c", 1), desc="literal 0")
    vx = vals.apply_binop("+", va, vb, ("t.c", 2))
    trace = vals.provenance_trace(vx)
    assert len(trace) == 3
    assert [entry[0] for entry in trace] == sorted(entry[0] for entry in trace)
    assert trace[-1][2] == "+"
    assert trace[-1][3] == (va.id, vb.id)
    assert trace[-1][1] == ("t.c", 2)


def oracle_ancestors(vals, vid):
    seen = set()
    work = [vid]
    while work:
        v = work.pop()
        if v in seen:
            continue
        seen.add(v)
        work.extend(vals.get(v).prov.parents)
    return seen


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_trace_length_equals_ancestor_count_and_dag_acyclic(data):
    vals = table()
    pool = [vals.fresh_symbol("a", AT), vals.concrete(32, 5, AT)]
    for _ in range(data.draw(st.integers(1, 15))):
        op = data.draw(st.sampled_from(["+", "-", "*", "&", "|", "^"]))
        a = data.draw(st.sampled_from(pool))
        b = data.draw(st.sampled_from(pool))
        pool.append(vals.apply_binop(op, a, b, AT))
    v = data.draw(st.sampled_from(pool))
    trace = vals.provenance_trace(v)
    assert len(trace) == len(oracle_ancestors(vals, v.id))
    # Acyclicity: every parent id is strictly smaller than its child's id.
    for vid, _pos, _desc, parents in trace:
        assert all(p < vid for p in parents)
