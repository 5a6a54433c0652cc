"""Semi-symbolic value algebra.

Values are concrete bit-vectors, symbolic roots, or term compositions over
earlier values. Operations compute concretely whenever every operand resolves
to a constant (following any bindings learned since the operands were
created); otherwise they build a term. Every value records where and how it
was created, so a full provenance trace is always available, and resolution
failures report exactly which unbound roots are blocking.

Widths are 8/16/32/64 bits with two's-complement wraparound. Both operands of
a binary operation are widened to the larger width first; comparison and
logical results are 32-bit 0/1. Signed right shift is arithmetic, division
truncates toward zero, and the remainder takes the dividend's sign.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConflictingBinding, DivisionByConcreteZero, UnsupportedOperation

OP_ADDR = "addr-of-region"

BINARY_OPS = frozenset(
    ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>",
     "==", "!=", "<", "<=", ">", ">=", "&&", "||"]
)
UNARY_OPS = frozenset(["!", "~", "neg"])
_COMPARISONS = frozenset(["==", "!=", "<", "<=", ">", ">="])
_LOGICAL = frozenset(["&&", "||"])


@dataclass(frozen=True)
class Concrete:
    width: int
    bits: int            # always reduced mod 2**width
    signed: bool = False


@dataclass(frozen=True)
class SymbolRoot:
    label: str


@dataclass(frozen=True)
class Term:
    op: str
    operands: tuple[int, ...]       # value ids, all created earlier
    region: int | None = None      # only for addr-of-region


@dataclass(frozen=True)
class Provenance:
    file: str
    line: int
    op_description: str
    parents: tuple[int, ...]


@dataclass
class Value:
    id: int
    payload: object
    prov: Provenance
    pointee_tag: str | None = None  # struct tag hint for pointer values


@dataclass(frozen=True)
class Binding:
    symbol: int
    bound: Concrete
    file: str
    line: int
    reason: str  # constant-assignment | branch-comparison | hook-supplied | user-supplied


@dataclass(frozen=True)
class Residual:
    """Resolution outcome for values that are not (yet) concrete.

    ``blockers`` are the ids of the unbound symbol roots in the way; binding
    all of them and re-resolving yields a concrete value. ``pointer`` is set
    when the value is structurally a pointer: (region id, byte offset).
    Region pointers without a concrete rendering carry empty blockers.
    """

    value_id: int
    blockers: tuple[int, ...]
    pointer: tuple[int, int] | None = None


@dataclass(frozen=True)
class MissingCall:
    """The unmodeled API call a symbolic value traces back to."""

    callee: str
    call_text: str
    file: str
    line: int


_NOWHERE = ("<internal>", 0)


def to_int(c: Concrete) -> int:
    if c.signed and c.bits >> (c.width - 1):
        return c.bits - (1 << c.width)
    return c.bits


def make_concrete(width: int, value: int, signed: bool = False) -> Concrete:
    return Concrete(width, value & ((1 << width) - 1), signed)


def concrete_binop(op: str, a: Concrete, b: Concrete) -> Concrete:
    """Reference arithmetic over two constants, C-style."""
    w = max(a.width, b.width)
    av, bv = to_int(a), to_int(b)
    mask = (1 << w) - 1
    rs = a.signed and b.signed
    if op in _COMPARISONS:
        ua, ub = av & mask, bv & mask
        if op == "==":
            r = ua == ub
        elif op == "!=":
            r = ua != ub
        else:
            x, y = (av, bv) if rs else (ua, ub)
            r = {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]
        return Concrete(32, int(r), True)
    if op in _LOGICAL:
        ta, tb = (av & mask) != 0, (bv & mask) != 0
        r = (ta and tb) if op == "&&" else (ta or tb)
        return Concrete(32, int(r), True)
    if op == "+":
        r = av + bv
    elif op == "-":
        r = av - bv
    elif op == "*":
        r = av * bv
    elif op in ("/", "%"):
        if bv == 0:
            raise DivisionByConcreteZero("division by zero")
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
        r = av >> (bv % w)  # arithmetic when the (signed) int is negative
    else:
        raise UnsupportedOperation(f"operator {op!r}")
    return Concrete(w, r & mask, rs)


def concrete_unop(op: str, a: Concrete) -> Concrete:
    av = to_int(a)
    mask = (1 << a.width) - 1
    if op == "!":
        return Concrete(32, int((av & mask) == 0), True)
    if op == "~":
        return Concrete(a.width, (~av) & mask, a.signed)
    if op == "neg":
        return Concrete(a.width, (-av) & mask, a.signed)
    if op.startswith("cast"):
        width, signed = parse_cast_op(op)
        return Concrete(width, av & ((1 << width) - 1), signed)
    raise UnsupportedOperation(f"operator {op!r}")


def cast_op(width: int, signed: bool) -> str:
    return f"cast{width}{'s' if signed else 'u'}"


def parse_cast_op(op: str) -> tuple[int, bool]:
    return int(op[4:-1]), op.endswith("s")


class ValueTable:
    """Session-owned store of all values, bindings, and blocker metadata."""

    def __init__(self):
        self._values: list[Value] = []
        self.bindings: dict[int, Binding] = {}
        self.pointer_bindings: dict[int, int] = {}  # symbol id -> pointer value id
        self.missing_calls: dict[int, MissingCall] = {}
        self.region_lookup = None  # callable(region_id) -> Region | None

    def __len__(self):
        return len(self._values)

    def get(self, vid: int) -> Value:
        return self._values[vid]

    def _new(self, payload, at, desc, parents=()) -> Value:
        v = Value(len(self._values), payload, Provenance(at[0], at[1], desc, tuple(parents)))
        self._values.append(v)
        return v

    # ------------------------------------------------------------------ make
    def concrete(self, width: int, value: int, at=_NOWHERE, signed=False, desc=None, parents=()):
        c = make_concrete(width, value, signed)
        return self._new(c, at, desc or f"literal {to_int(c)}", parents)

    def fresh_symbol(self, label: str, at=_NOWHERE) -> Value:
        return self._new(SymbolRoot(label), at, f"symbol {label}")

    def addr_of(self, region_id: int, at=_NOWHERE, desc=None) -> Value:
        return self._new(Term(OP_ADDR, (), region_id), at, desc or f"&region {region_id}")

    # ------------------------------------------------------------ operations
    def apply_binop(self, op: str, lhs: Value, rhs: Value, at=_NOWHERE) -> Value:
        if op not in BINARY_OPS:
            raise UnsupportedOperation(f"operator {op!r}")
        ra, rb = self.resolve(lhs), self.resolve(rhs)
        if op in ("/", "%") and isinstance(rb, Concrete) and rb.bits == 0:
            raise DivisionByConcreteZero(f"division by zero at line {at[1]}")
        if isinstance(ra, Concrete) and isinstance(rb, Concrete):
            return self._new(concrete_binop(op, ra, rb), at, op, (lhs.id, rhs.id))
        folded = self._identity_fold(op, lhs, ra, rhs, rb, at)
        if folded is not None:
            return folded
        v = self._new(Term(op, (lhs.id, rhs.id)), at, op, (lhs.id, rhs.id))
        if v.pointee_tag is None:
            v.pointee_tag = lhs.pointee_tag or rhs.pointee_tag
        return v

    def _identity_fold(self, op, lhs, ra, rhs, rb, at):
        ac = ra if isinstance(ra, Concrete) else None
        bc = rb if isinstance(rb, Concrete) else None
        if op in ("+", "|", "^"):
            if bc is not None and bc.bits == 0:
                return lhs
            if ac is not None and ac.bits == 0:
                return rhs
        elif op == "-":
            if bc is not None and bc.bits == 0:
                return lhs
        elif op == "*":
            if bc is not None and bc.bits == 1:
                return lhs
            if ac is not None and ac.bits == 1:
                return rhs
            zero = bc if (bc is not None and bc.bits == 0) else (
                ac if (ac is not None and ac.bits == 0) else None)
            if zero is not None:
                return self._new(Concrete(zero.width, 0, zero.signed), at, op, (lhs.id, rhs.id))
        elif op == "&":
            zero = bc if (bc is not None and bc.bits == 0) else (
                ac if (ac is not None and ac.bits == 0) else None)
            if zero is not None:
                return self._new(Concrete(zero.width, 0, zero.signed), at, op, (lhs.id, rhs.id))
        elif op in ("<<", ">>"):
            if bc is not None and bc.bits == 0:
                return lhs
        return None

    def apply_unop(self, op: str, operand: Value, at=_NOWHERE) -> Value:
        if op not in UNARY_OPS and not op.startswith("cast"):
            raise UnsupportedOperation(f"operator {op!r}")
        r = self.resolve(operand)
        if isinstance(r, Concrete):
            return self._new(concrete_unop(op, r), at, op, (operand.id,))
        v = self._new(Term(op, (operand.id,)), at, op, (operand.id,))
        if op.startswith("cast"):
            v.pointee_tag = operand.pointee_tag
        return v

    def apply_cast(self, operand: Value, width: int, signed: bool, at=_NOWHERE) -> Value:
        return self.apply_unop(cast_op(width, signed), operand, at)

    # -------------------------------------------------------------- bindings
    def concretize(self, symbol: Value, bound: Concrete, reason: str, at=_NOWHERE) -> Binding:
        if not isinstance(symbol.payload, SymbolRoot):
            raise UnsupportedOperation("concretize target is not a symbol root")
        old = self.bindings.get(symbol.id)
        if old is not None:
            if old.bound.bits == bound.bits and old.bound.width == bound.width:
                return old
            raise ConflictingBinding(
                f"{symbol.payload.label} already bound to {to_int(old.bound)}, "
                f"cannot rebind to {to_int(bound)}"
            )
        if symbol.id in self.pointer_bindings:
            raise ConflictingBinding(
                f"{symbol.payload.label} already materialized as a pointer"
            )
        b = Binding(symbol.id, bound, at[0], at[1], reason)
        self.bindings[symbol.id] = b
        return b

    def bind_pointer(self, symbol: Value, pointer: Value):
        """Materialize an unbound symbol as a pointer (first dereference)."""
        if symbol.id in self.bindings:
            raise ConflictingBinding(
                f"{symbol.payload.label} already bound to a constant"
            )
        self.pointer_bindings.setdefault(symbol.id, pointer.id)

    # ------------------------------------------------------------- resolving
    def resolve(self, v) -> Concrete | Residual:
        """Fold a value as far as possible, iteratively (no recursion).

        Returns a Concrete, or a Residual naming every unbound root that
        blocks concrete resolution. Address-of values always resolve to a
        Residual carrying their (region, offset); an mmio region's displayed
        base participates, so its blockers propagate into addresses.
        """
        root = v.id if isinstance(v, Value) else v
        memo: dict[int, object] = {}
        stack = [root]
        while stack:
            vid = stack[-1]
            if vid in memo:
                stack.pop()
                continue
            payload = self._values[vid].payload
            if isinstance(payload, Concrete):
                memo[vid] = payload
                stack.pop()
            elif isinstance(payload, SymbolRoot):
                b = self.bindings.get(vid)
                if b is not None:
                    memo[vid] = b.bound
                    stack.pop()
                    continue
                p = self.pointer_bindings.get(vid)
                if p is not None:
                    if p in memo:
                        memo[vid] = memo[p]
                        stack.pop()
                    else:
                        stack.append(p)
                    continue
                memo[vid] = Residual(vid, (vid,))
                stack.pop()
            else:  # Term
                if payload.op == OP_ADDR:
                    base = self._mmio_base(payload.region)
                    if base is None:
                        memo[vid] = Residual(vid, (), (payload.region, 0))
                        stack.pop()
                    elif base in memo:
                        m = memo[base]
                        blockers = () if isinstance(m, Concrete) else m.blockers
                        memo[vid] = Residual(vid, blockers, (payload.region, 0))
                        stack.pop()
                    else:
                        stack.append(base)
                    continue
                pending = [o for o in payload.operands if o not in memo]
                if pending:
                    stack.extend(pending)
                    continue
                memo[vid] = self._combine(vid, payload, [memo[o] for o in payload.operands])
                stack.pop()
        out = memo[root]
        if isinstance(out, Residual) and out.value_id != root:
            out = Residual(root, out.blockers, out.pointer)
        return out

    def _mmio_base(self, region_id):
        if self.region_lookup is None:
            return None
        region = self.region_lookup(region_id)
        if region is not None and getattr(region, "display_base", None) is not None:
            return region.display_base
        return None

    def _combine(self, vid, term, resolved):
        if all(isinstance(r, Concrete) for r in resolved):
            if len(resolved) == 2:
                return concrete_binop(term.op, resolved[0], resolved[1])
            return concrete_unop(term.op, resolved[0])
        blockers: list[int] = []
        for r in resolved:
            if isinstance(r, Residual):
                blockers.extend(r.blockers)
        pointer = None
        if term.op in ("+", "-") and len(resolved) == 2:
            a, b = resolved
            if isinstance(a, Residual) and a.pointer and isinstance(b, Concrete):
                rid, off = a.pointer
                delta = to_int(b)
                pointer = (rid, off + delta if term.op == "+" else off - delta)
            elif term.op == "+" and isinstance(b, Residual) and b.pointer and isinstance(a, Concrete):
                rid, off = b.pointer
                pointer = (rid, off + to_int(a))
        elif term.op.startswith("cast") and isinstance(resolved[0], Residual):
            pointer = resolved[0].pointer
        return Residual(vid, tuple(dict.fromkeys(blockers)), pointer)

    # ------------------------------------------------------------ provenance
    def provenance_trace(self, v: Value):
        """Topologically ordered ancestry from roots to ``v``.

        Each entry is (value id, (file, line), op description, parent ids);
        creation order is a topological order because operands always predate
        the terms built over them.
        """
        seen = set()
        frontier = [v.id]
        while frontier:
            vid = frontier.pop()
            if vid in seen:
                continue
            seen.add(vid)
            frontier.extend(self._values[vid].prov.parents)
        out = []
        for vid in sorted(seen):
            val = self._values[vid]
            out.append((vid, (val.prov.file, val.prov.line), val.prov.op_description,
                        val.prov.parents))
        return out

    def labels_for(self, blocker_ids) -> list[str]:
        out = []
        for b in blocker_ids:
            payload = self._values[b].payload
            out.append(payload.label if isinstance(payload, SymbolRoot) else f"v{b}")
        return out
