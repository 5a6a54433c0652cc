"""Tree-walking execution engine over the semi-symbolic value model.

Statements come from the island parser and are executed directly; holes are
parsed the first time control reaches them. Calls resolve, in order, to a
registered hook, an in-corpus function definition, or a symbolic fallback
that records a missing-model event and returns a fresh symbol. Fresh symbols
minted inside a modeled or unmodeled call remember that call, which is what
lets later diagnostics name the exact API function a value is waiting on.

Breakpoints fire after a statement on the breakpoint line executes; the
session then suspends just before the next statement, whose line is reported.
That way inspecting a variable assigned on the breakpoint line shows the
fresh value, and the reported line is always the next statement to run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import macros as mc
from . import tokens as tk
from .errors import (
    EvalError,
    MaxStepsExceeded,
    StoppedAtBreakpoint,
    SymbolicAddress,
    SymbolicBranch,
    UnknownCommand,
)
from .islands import (
    BlockNode,
    BreakNode,
    ContinueNode,
    DeclarationNode,
    DoWhileNode,
    ExpressionStatementNode,
    ForNode,
    FunctionDefNode,
    GotoNode,
    IfNode,
    LabelNode,
    RawNode,
    ReturnNode,
    SwitchNode,
    WhileNode,
    parse_hole_as_block,
    parse_next_statement,
)
from .memory import MMIO, OPAQUE, STACK, STATIC, FieldInfo, Location
from .session import (
    ASK,
    ASSUME_FALSE,
    ASSUME_TRUE,
    Frame,
    Session,
    Slot,
)
from .values import (
    Concrete,
    MissingCall,
    Residual,
    SymbolRoot,
    Value,
    make_concrete,
    to_int,
)

NEXT = "next"
BREAK = "break"
CONTINUE = "continue"
RETURN = "return"
GOTO = "goto"


@dataclass
class Control:
    kind: str
    value: Value | None = None
    label: str | None = None


_NEXT = Control(NEXT)


@dataclass
class CallSite:
    file: str
    line: int
    text: str     # verbatim source of the call expression when available
    compact: str  # token texts joined by single spaces


# --------------------------------------------------------------------- types

BASE_TYPE_KEYWORDS = frozenset(
    ["void", "char", "short", "int", "long", "float", "double",
     "signed", "unsigned", "_Bool"]
)
QUALIFIER_KEYWORDS = frozenset(
    ["const", "volatile", "static", "extern", "register", "inline", "restrict"]
)

TYPE_WIDTH_BYTES = {
    "void": 1, "char": 1, "_Bool": 1, "bool": 1, "short": 2, "int": 4,
    "long": 8, "float": 4, "double": 8,
    "u8": 1, "u16": 2, "u32": 4, "u64": 8,
    "s8": 1, "s16": 2, "s32": 4, "s64": 8,
    "uint8_t": 1, "uint16_t": 2, "uint32_t": 4, "uint64_t": 8,
    "int8_t": 1, "int16_t": 2, "int32_t": 4, "int64_t": 8,
    "size_t": 8, "ssize_t": 8, "uintptr_t": 8, "intptr_t": 8, "ptrdiff_t": 8,
    "uint": 4, "ushort": 2, "uchar": 1, "ulong": 8,
}
UNSIGNED_TYPE_NAMES = frozenset(
    ["u8", "u16", "u32", "u64", "uint8_t", "uint16_t", "uint32_t", "uint64_t",
     "size_t", "uintptr_t", "uint", "ushort", "uchar", "ulong", "bool", "_Bool"]
)


@dataclass
class TypeInfo:
    width: int = 4
    tag: str | None = None
    unsigned: bool = False
    is_typedef: bool = False
    saw_type: bool = False
    inline_body: tuple | None = None  # (start, end) within the local token list


@dataclass
class GlobalDecl:
    """File-scope variable shape recorded by the startup token scan."""

    tag: str | None
    stars: int
    width: int
    count: int = 1


def parse_type_prefix(toks, i, typedefs) -> tuple[int, TypeInfo]:
    info = TypeInfo()
    words: list[str] = []
    n = len(toks)
    while i < n:
        t = toks[i]
        if t.kind == tk.KEYWORD:
            if t.text in QUALIFIER_KEYWORDS:
                i += 1
                continue
            if t.text == "typedef":
                info.is_typedef = True
                i += 1
                continue
            if t.text in ("struct", "union", "enum"):
                info.saw_type = True
                i += 1
                if i < n and toks[i].kind == tk.IDENTIFIER:
                    info.tag = toks[i].text
                    i += 1
                if i < n and toks[i].kind == tk.PUNCT and toks[i].text == "{":
                    depth = 0
                    j = i
                    while j < n:
                        if toks[j].kind == tk.PUNCT:
                            if toks[j].text == "{":
                                depth += 1
                            elif toks[j].text == "}":
                                depth -= 1
                                if depth == 0:
                                    break
                        j += 1
                    info.inline_body = (i + 1, j)
                    i = j + 1
                continue
            if t.text in BASE_TYPE_KEYWORDS:
                info.saw_type = True
                words.append(t.text)
                i += 1
                continue
            break
        if (
            t.kind == tk.IDENTIFIER
            and not words
            and info.tag is None
            and not info.saw_type
        ):
            width = typedefs.get(t.text, TYPE_WIDTH_BYTES.get(t.text))
            if width is not None:
                info.saw_type = True
                info.width = width
                info.unsigned = t.text in UNSIGNED_TYPE_NAMES
                i += 1
                continue
        break
    if words:
        if "char" in words:
            info.width = 1
        elif "short" in words:
            info.width = 2
        elif "long" in words or "double" in words:
            info.width = 8
        else:
            info.width = 4
        if "unsigned" in words:
            info.unsigned = True
    return i, info


# -------------------------------------------------------------------- places

@dataclass
class Place:
    """An lvalue: a direct (region, offset) cell or a deref of a pointer."""

    region: int | None = None
    ptr: Value | None = None
    offset: object = 0  # int, or a Value resolved at access time
    width: int = 4
    struct_tag: str | None = None
    pointee_tag: str | None = None
    elem_width: int | None = None
    name: str = ""


@dataclass
class NameRef:
    name: str
    token: tk.Token
    index: int


_ASSIGN_OPS = {
    "=": None, "+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%",
    "&=": "&", "|=": "|", "^=": "^", "<<=": "<<", ">>=": ">>",
}

_TIERS = (
    ("||",), ("&&",), ("|",), ("^",), ("&",),
    ("==", "!="), ("<", "<=", ">", ">="),
    ("<<", ">>"), ("+", "-"), ("*", "/", "%"),
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "0": "\0", "\\": "\\",
            "'": "'", '"': '"', "a": "\a", "b": "\b", "f": "\f", "v": "\v"}


def _without_directives(toks):
    """Non-trivia tokens with preprocessor lines removed."""
    out = []
    n = len(toks)
    i = 0
    while i < n:
        t = toks[i]
        if t.kind == tk.PUNCT and t.text == "#":
            prev = i - 1
            while prev >= 0 and toks[prev].kind == tk.WHITESPACE:
                prev -= 1
            if prev < 0 or toks[prev].kind == tk.NEWLINE:
                while i < n:
                    if toks[i].kind == tk.NEWLINE:
                        q = i - 1
                        while q >= 0 and toks[q].kind == tk.WHITESPACE:
                            q -= 1
                        if q >= 0 and toks[q].kind == tk.PUNCT \
                                and toks[q].text == "\\":
                            i += 1
                            continue
                        break
                    i += 1
                continue
        if t.kind not in tk.TRIVIA:
            out.append(t)
        i += 1
    return out


def parse_int_literal(text: str) -> tuple[int, int, bool]:
    """(value, width in bits, signed) for a C integer literal."""
    s = text.lower()
    suffix = ""
    while s and s[-1] in "ul":
        suffix = s[-1] + suffix
        s = s[:-1]
    if s.startswith("0x"):
        value, decimal = int(s, 16), False
    elif s.startswith("0b"):
        value, decimal = int(s[2:], 2), False
    elif s.startswith("0") and len(s) > 1 and s.isdigit():
        value, decimal = int(s, 8), False
    else:
        value, decimal = int(s), True
    unsigned = "u" in suffix
    long_suffix = "l" in suffix
    if value < (1 << 31) and not long_suffix:
        return value, 32, not unsigned
    if value < (1 << 32) and not decimal and not long_suffix:
        return value, 32, False
    if value < (1 << 63):
        return value, 64, not unsigned
    return value, 64, False


def unescape_c(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "x":
                j = i + 2
                while j < len(text) and text[j] in "0123456789abcdefABCDEF":
                    j += 1
                out.append(chr(int(text[i + 2 : j] or "0", 16) & 0xFF))
                i = j
                continue
            out.append(_ESCAPES.get(nxt, nxt))
            i += 2
            continue
        out.append(c)
        i += 1
    return "".join(out)


class Interp:
    def __init__(self, session: Session):
        self.s = session
        session.interp = self
        session.store.layout_source = self._layout_from_corpus
        self._scan_corpus_names()

    def _scan_corpus_names(self):
        """Token-level pass over the corpus for file-scope typedefs and
        variable declarations. Nothing is parsed into statements; this only
        feeds the type environment, which execution-time classification and
        struct-tag lookups rely on."""
        s = self.s
        for fid in s.corpus.files:
            toks = _without_directives(s.corpus.tokens(fid))
            depth = 0
            boundary = True
            i = 0
            n = len(toks)
            while i < n:
                t = toks[i]
                if t.kind == tk.PUNCT:
                    if t.text in "([{":
                        depth += 1
                        boundary = False
                    elif t.text in ")]}":
                        depth = max(0, depth - 1)
                        boundary = t.text == "}" and depth == 0
                    elif t.text == ";":
                        boundary = depth == 0
                    else:
                        boundary = False
                    i += 1
                    continue
                if depth == 0 and boundary and self._global_decl_at(toks, i):
                    i = max(self._record_global_decl(toks, i), i + 1)
                    continue
                boundary = False
                i += 1

    def _global_decl_at(self, toks, i) -> bool:
        t = toks[i]
        if t.kind == tk.KEYWORD and (t.text in BASE_TYPE_KEYWORDS
                                     or t.text in QUALIFIER_KEYWORDS
                                     or t.text in ("struct", "union", "enum",
                                                   "typedef")):
            return True
        return t.kind == tk.IDENTIFIER and (t.text in TYPE_WIDTH_BYTES
                                            or t.text in self.s.typedefs)

    def _record_global_decl(self, toks, i) -> int:
        """Try to record one file-scope declaration starting at i; returns
        the index to resume scanning from."""
        s = self.s
        n = len(toks)
        j, info = parse_type_prefix(toks, i, s.typedefs)
        if not info.saw_type:
            return i + 1
        is_typedef = info.is_typedef
        while j < n:
            stars = 0
            while j < n and ((toks[j].kind == tk.PUNCT and toks[j].text == "*")
                             or (toks[j].kind == tk.KEYWORD
                                 and toks[j].text in QUALIFIER_KEYWORDS)):
                if toks[j].text == "*":
                    stars += 1
                j += 1
            if j >= n or toks[j].kind != tk.IDENTIFIER:
                return j
            name = toks[j].text
            j += 1
            if j < n and toks[j].kind == tk.PUNCT and toks[j].text == "(":
                return j  # function declarator: not a variable
            count = 1
            while j < n and toks[j].kind == tk.PUNCT and toks[j].text == "[":
                depth = 0
                k = j
                while k < n:
                    if toks[k].kind == tk.PUNCT:
                        if toks[k].text == "[":
                            depth += 1
                        elif toks[k].text == "]":
                            depth -= 1
                            if depth == 0:
                                break
                    k += 1
                inner = [x for x in self._expand(toks[j + 1 : k])
                         if x.kind == tk.NUMBER]
                if len(inner) == 1:
                    count *= parse_int_literal(inner[0].text)[0]
                j = k + 1
            if is_typedef:
                s.typedefs[name] = 8 if stars else info.width
            else:
                s.global_decls.setdefault(name, GlobalDecl(
                    info.tag, stars, 8 if stars else info.width, count))
            if j < n and toks[j].kind == tk.PUNCT and toks[j].text == "=":
                depth = 0
                while j < n:
                    x = toks[j]
                    if x.kind == tk.PUNCT:
                        if x.text in "([{":
                            depth += 1
                        elif x.text in ")]}":
                            depth -= 1
                        elif depth == 0 and x.text in (",", ";"):
                            break
                    j += 1
            if j < n and toks[j].kind == tk.PUNCT and toks[j].text == ",":
                j += 1
                continue
            return j
        return j

    # ------------------------------------------------------------ utilities
    def _on_unexpanded(self, name, line):
        self.s.emit_event("unexpanded-macro", name=name, line=line)

    def _expand(self, toks):
        return mc.expand(toks, self.s.corpus.macros, self._on_unexpanded)

    def _hole_tokens(self, hole):
        return self.s.corpus.tokens(hole.file_id)[hole.start : hole.end]

    def _node_tokens(self, node):
        return self.s.corpus.tokens(node.file_id)[node.start : node.end]

    # ------------------------------------------------------------- entry API
    def run_entry(self, command: str, argv=()) -> Value:
        s = self.s
        spec = s.commands.get(command)
        if spec is None:
            raise UnknownCommand(f"unknown command: {command}")
        s.reset_for_command()
        params = {}
        for pname, idx in spec.params.items():
            if idx > len(argv):
                raise EvalError(f"{command}: missing argument {idx} ({pname})")
            try:
                params[pname] = int(str(argv[idx - 1]), 0)
            except ValueError:
                raise EvalError(f"{command}: argument {idx} ({pname}) must be an integer")
        s.command_params = params
        fdef = s.corpus.find_function(spec.entry)
        if fdef is None:
            raise UnknownCommand(f"entry function {spec.entry!r} not found in corpus")
        args = self._modeled_args(fdef)
        site = CallSite(fdef.file_id, fdef.line, f"{spec.entry}(...)",
                        f"{spec.entry} ( ... )")
        return self.call_named(spec.entry, args, site)

    def _modeled_args(self, fdef: FunctionDefNode):
        args = []
        for pname, stars, tag, width in self.parse_params(fdef):
            if stars:
                region = self.s.store.alloc_region(f"arg:{pname}", OPAQUE, struct_tag=tag)
                v = self.s.values.addr_of(region.id, (fdef.file_id, fdef.line),
                                          desc=f"modeled argument {pname}")
                v.pointee_tag = tag
            else:
                v = self.s.values.fresh_symbol(f"arg:{pname}", (fdef.file_id, fdef.line))
            args.append(v)
        return args

    # ----------------------------------------------------------------- calls
    def call_named(self, name: str, args, site: CallSite) -> Value:
        s = self.s
        s.emit_event("call", callee=name, call_text=site.compact,
                     file=site.file, line=site.line,
                     args=tuple(a.id for a in args))
        spec = s.trace_specs.get(name)
        if spec is not None:
            self._fire_trace(spec, site, args)
        hook = s.hooks.get(name)
        if hook is not None:
            from .hooks import HookContext

            s.emit_event("hook", name=name, line=site.line)
            ctx = HookContext(s, self, list(args), site)
            s.call_stack.append((name, site))
            try:
                result = hook.fn(ctx)
            finally:
                s.call_stack.pop()
            if isinstance(result, Value):
                return result
            return s.values.concrete(32, 0, (site.file, site.line),
                                     desc=f"hook {name} result")
        fdef = s.corpus.find_function(name)
        if fdef is not None:
            return self.call_function_def(fdef, args, site)
        # Unmodeled, not in corpus: symbolic fallback. Pointer arguments may
        # have been written by the real function, so remember which call is
        # responsible for anything later read out of those regions untouched.
        s.emit_event("missing-model", callee=name, call_text=site.compact,
                     file=site.file, line=site.line)
        missing = MissingCall(name, site.compact, site.file, site.line)
        for a in args:
            r = s.values.resolve(a)
            if isinstance(r, Residual) and r.pointer is not None:
                s.store.taints[r.pointer[0]] = missing
        sym = s.values.fresh_symbol(f"ret:{name}@{site.line}", (site.file, site.line))
        s.values.missing_calls[sym.id] = missing
        return sym

    def parse_params(self, fdef: FunctionDefNode):
        toks = [t for t in self._hole_tokens(fdef.params) if t.kind not in tk.TRIVIA]
        if not toks or (len(toks) == 1 and toks[0].text == "void"):
            return []
        groups: list[list[tk.Token]] = [[]]
        depth = 0
        for t in toks:
            if t.kind == tk.PUNCT:
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
                elif t.text == "," and depth == 0:
                    groups.append([])
                    continue
            groups[-1].append(t)
        out = []
        for g in groups:
            if not g or (len(g) == 1 and g[0].text in ("void", "...")):
                continue
            _, info = parse_type_prefix(g, 0, self.s.typedefs)
            stars = sum(1 for t in g if t.kind == tk.PUNCT and t.text == "*")
            name = None
            for t in g:
                if t.kind == tk.IDENTIFIER and t.text not in TYPE_WIDTH_BYTES \
                        and t.text != info.tag and t.text not in self.s.typedefs:
                    name = t.text
            if name is None:
                continue
            out.append((name, stars, info.tag, info.width))
        return out

    def call_function_def(self, fdef: FunctionDefNode, args, site: CallSite) -> Value:
        s = self.s
        frame = Frame(fdef.name, position=(fdef.file_id, fdef.line))
        params = self.parse_params(fdef)
        for k, (pname, stars, tag, width) in enumerate(params):
            region = s.store.alloc_region(pname, STACK)
            slot = Slot(region.id, 0, 8 if stars else width,
                        pointee_tag=tag if stars else None,
                        struct_tag=tag if not stars else None,
                        elem_width=8 if stars else width)
            frame.locals[pname] = slot
            if k < len(args):
                v = args[k]
                if stars and tag and v.pointee_tag is None:
                    v.pointee_tag = tag
            else:
                v = s.values.fresh_symbol(f"arg:{pname}@{site.line}",
                                          (site.file, site.line))
            s.store.store(Location(region.id, 0), v)
        s.frames.append(frame)
        try:
            nodes = parse_hole_as_block(s.corpus, fdef.body, s.rules, s.on_parse)
            sig = self.exec_block(nodes, frame)
        finally:
            s.frames.pop()
        if sig.kind == GOTO:
            raise EvalError(f"goto target not found: {sig.label}", line=site.line)
        if sig.kind == RETURN and sig.value is not None:
            return sig.value
        return s.values.concrete(32, 0, (fdef.file_id, fdef.line),
                                 desc=f"{fdef.name} returned void")

    def computed_call(self, callee: Value, args, at) -> Value:
        self.s.emit_event("diagnostic",
                          message=f"call through non-name expression at line {at[1]}")
        return self.s.values.fresh_symbol(f"ret:<computed>@{at[1]}", at)

    # ------------------------------------------------------------ trace spec
    def _fire_trace(self, spec, site: CallSite, args):
        s = self.s
        shown = [a for a, flag in zip(args, spec.flags) if flag == "x"]
        parts = []
        for a in shown:
            text, blocked = self.display_value(a)
            if blocked is not None:
                msg = self.blocker_message(site.line, blocked)
                s.emit_line(msg)
                s.emit_event("diagnostic", message=msg)
                s.batch_failed = True
                return
            parts.append(text)
        s.emit_line(f"Line {site.line}: {site.text} => {', '.join(parts)}")

    def blocker_message(self, site_line: int, residual: Residual) -> str:
        vals = self.s.values
        blocker = residual.blockers[0]
        info = vals.missing_calls.get(blocker)
        if info is not None:
            return (f"Line {site_line}: Could not verbose because missing "
                    f"{info.call_text} on line {info.line}")
        val = vals.get(blocker)
        label = val.payload.label if isinstance(val.payload, SymbolRoot) else f"v{blocker}"
        return (f"Line {site_line}: Could not verbose because missing "
                f"{label} on line {val.prov.line}")

    # ----------------------------------------------------------- value views
    def display_value(self, v: Value):
        """(display text, None) or (None, blocking Residual)."""
        r = self.s.values.resolve(v)
        if isinstance(r, Concrete):
            return str(to_int(r)), None
        if r.blockers:
            return None, r
        if r.pointer is not None:
            rid, off = r.pointer
            region = self.s.store.region(rid)
            if region is not None and region.kind == MMIO and region.display_base is not None:
                rb = self.s.values.resolve(region.display_base)
                if isinstance(rb, Concrete):
                    return f"{to_int(rb) + off:x}", None
                return None, rb
            return f"({rid}, {off})", None
        return None, r

    def address_display(self, rid: int, off: int) -> str:
        region = self.s.store.region(rid)
        if region is not None and region.kind == MMIO and region.display_base is not None:
            rb = self.s.values.resolve(region.display_base)
            if isinstance(rb, Concrete):
                return f"{to_int(rb) + off:x}"
        return f"({rid}, {off})"

    # ------------------------------------------------------------ statements
    def exec_block(self, nodes, frame) -> Control:
        labels = {}
        for idx, n in enumerate(nodes):
            if isinstance(n, LabelNode) and n.name:
                labels.setdefault(n.name, idx)
        i = 0
        while i < len(nodes):
            sig = self.exec_node(nodes[i], frame)
            if sig.kind == NEXT:
                i += 1
                continue
            if sig.kind == GOTO and sig.label in labels:
                i = labels[sig.label] + 1
                continue
            return sig
        return _NEXT

    def exec_node(self, node, frame) -> Control:
        s = self.s
        if not frame.is_snippet:
            if s.pending_stop or s.single_step:
                s.pending_stop = False
                s.single_step = False
                if s.stop_handler is None:
                    raise StoppedAtBreakpoint(
                        f"stopped before {node.file_id}:{node.line}",
                        position=(node.file_id, node.line),
                    )
                if s.stop_handler((node.file_id, node.line)) == "step":
                    s.single_step = True
        self._count_step(node.line)
        frame.position = (node.file_id, node.line)
        sig = self._dispatch(node, frame)
        if not frame.is_snippet:
            bp = s.breakpoint_at(node.file_id, node.line)
            if bp is not None and getattr(bp, "enabled", True):
                bp.hits += 1
                s.pending_stop = True
        return sig

    def _count_step(self, line):
        self.s.steps += 1
        if self.s.steps > self.s.max_steps:
            raise MaxStepsExceeded(
                f"exceeded {self.s.max_steps} statement executions (line {line})"
            )

    def _dispatch(self, node, frame) -> Control:
        if isinstance(node, (ExpressionStatementNode, DeclarationNode)):
            self._exec_simple_tokens(self._node_tokens(node), frame,
                                     node.file_id, node.line)
            return _NEXT
        if isinstance(node, IfNode):
            return self._exec_if(node, frame)
        if isinstance(node, WhileNode):
            return self._exec_while(node, frame)
        if isinstance(node, DoWhileNode):
            return self._exec_do(node, frame)
        if isinstance(node, ForNode):
            return self._exec_for(node, frame)
        if isinstance(node, ReturnNode):
            v = None
            if node.expr is not None:
                v = self.eval_hole(node.expr, frame, node.line)
            return Control(RETURN, value=v)
        if isinstance(node, BreakNode):
            return Control(BREAK)
        if isinstance(node, ContinueNode):
            return Control(CONTINUE)
        if isinstance(node, BlockNode):
            nodes = parse_hole_as_block(self.s.corpus, node.body, self.s.rules,
                                        self.s.on_parse)
            return self.exec_block(nodes, frame)
        if isinstance(node, SwitchNode):
            return self._exec_switch(node, frame)
        if isinstance(node, GotoNode):
            return Control(GOTO, label=node.label)
        if isinstance(node, LabelNode):
            return _NEXT
        if isinstance(node, RawNode):
            if not node.directive:
                self.s.emit_event("diagnostic",
                                  message=f"skipped stray tokens at line {node.line}")
            return _NEXT
        raise EvalError(f"cannot execute node {type(node).__name__}", line=node.line)

    def eval_hole(self, hole, frame, line) -> Value:
        return self.eval_tokens(self._hole_tokens(hole), frame, hole.file_id, line)

    def _cond_value(self, hole, frame, line) -> Value | None:
        toks = [t for t in self._hole_tokens(hole) if t.kind not in tk.TRIVIA]
        if not toks:
            return None
        return self.eval_tokens(self._hole_tokens(hole), frame, hole.file_id, line)

    def _exec_if(self, node, frame) -> Control:
        v = self.eval_hole(node.cond, frame, node.line)
        taken = self.truth(v, (node.file_id, node.line))
        hole = node.then if taken else node.orelse
        if hole is None:
            return _NEXT
        nodes = parse_hole_as_block(self.s.corpus, hole, self.s.rules, self.s.on_parse)
        return self.exec_block(nodes, frame)

    def _exec_while(self, node, frame) -> Control:
        while True:
            self._count_step(node.line)
            v = self.eval_hole(node.cond, frame, node.line)
            if not self.truth(v, (node.file_id, node.line)):
                return _NEXT
            nodes = parse_hole_as_block(self.s.corpus, node.body, self.s.rules,
                                        self.s.on_parse)
            sig = self.exec_block(nodes, frame)
            if sig.kind == BREAK:
                return _NEXT
            if sig.kind in (RETURN, GOTO):
                return sig

    def _exec_do(self, node, frame) -> Control:
        while True:
            self._count_step(node.line)
            nodes = parse_hole_as_block(self.s.corpus, node.body, self.s.rules,
                                        self.s.on_parse)
            sig = self.exec_block(nodes, frame)
            if sig.kind == BREAK:
                return _NEXT
            if sig.kind in (RETURN, GOTO):
                return sig
            v = self.eval_hole(node.cond, frame, node.line)
            if not self.truth(v, (node.file_id, node.line)):
                return _NEXT

    def _exec_for(self, node, frame) -> Control:
        init = self._hole_tokens(node.init)
        if any(t.kind not in tk.TRIVIA for t in init):
            self._exec_simple_tokens(init, frame, node.file_id, node.line)
        while True:
            self._count_step(node.line)
            cond = self._cond_value(node.cond, frame, node.line)
            if cond is not None and not self.truth(cond, (node.file_id, node.line)):
                return _NEXT
            nodes = parse_hole_as_block(self.s.corpus, node.body, self.s.rules,
                                        self.s.on_parse)
            sig = self.exec_block(nodes, frame)
            if sig.kind == BREAK:
                return _NEXT
            if sig.kind in (RETURN, GOTO):
                return sig
            step = self._hole_tokens(node.step)
            if any(t.kind not in tk.TRIVIA for t in step):
                self.eval_tokens(step, frame, node.file_id, node.line)

    def _exec_switch(self, node, frame) -> Control:
        subj = self.eval_hole(node.subject, frame, node.line)
        r = self.s.values.resolve(subj)
        if not isinstance(r, Concrete):
            labels = self.s.values.labels_for(r.blockers)
            raise SymbolicBranch(
                f"switch on symbolic value at line {node.line} "
                f"(blockers: {', '.join(labels)})",
                blockers=labels, line=node.line,
            )
        nodes = parse_hole_as_block(self.s.corpus, node.body, self.s.rules,
                                    self.s.on_parse)
        target = default = None
        for idx, n in enumerate(nodes):
            if not isinstance(n, LabelNode):
                continue
            if n.is_default and default is None:
                default = idx
            elif n.case_expr is not None and target is None:
                cv = self.s.values.resolve(
                    self.eval_hole(n.case_expr, frame, n.line))
                if isinstance(cv, Concrete) and to_int(cv) == to_int(r):
                    target = idx
        start = target if target is not None else default
        if start is None:
            return _NEXT
        for n in nodes[start:]:
            sig = self.exec_node(n, frame)
            if sig.kind == BREAK:
                return _NEXT
            if sig.kind != NEXT:
                return sig
        return _NEXT

    # ---------------------------------------------- declarations/expressions
    def _exec_simple_tokens(self, raw_toks, frame, file_id, line):
        toks = [t for t in self._expand(raw_toks) if t.kind not in tk.TRIVIA]
        while toks and toks[-1].kind == tk.PUNCT and toks[-1].text == ";":
            toks.pop()
        if not toks:
            return
        first = toks[0]
        if first.kind == tk.PUNCT and first.text == "#":
            return
        if first.kind == tk.IDENTIFIER and first.text in ("asm", "__asm__", "__asm"):
            self.s.emit_event("diagnostic",
                              message=f"skipped inline assembly at line {line}")
            return
        is_decl = (first.kind == tk.KEYWORD and first.text in
                   (BASE_TYPE_KEYWORDS | QUALIFIER_KEYWORDS | {"struct", "union", "enum", "typedef"}))
        if not is_decl and first.kind == tk.IDENTIFIER:
            is_decl = (first.text in self.s.typedefs or first.text in TYPE_WIDTH_BYTES)
        if is_decl:
            self.exec_declaration(toks, frame, file_id, line)
        else:
            self._eval_expanded(toks, frame, file_id, line)

    def exec_declaration(self, toks, frame, file_id, line):
        s = self.s
        i, info = parse_type_prefix(toks, 0, s.typedefs)
        if not info.saw_type:
            self._eval_expanded(toks, frame, file_id, line)
            return
        if info.inline_body is not None and info.tag is not None:
            b0, b1 = info.inline_body
            layout = self._parse_struct_body(toks[b0:b1])
            s.store.install_layout(info.tag, layout)
        if info.is_typedef:
            name = None
            stars = 0
            for t in toks[i:]:
                if t.kind == tk.IDENTIFIER:
                    name = t.text
                elif t.kind == tk.PUNCT and t.text == "*":
                    stars += 1
            if name:
                s.typedefs[name] = 8 if stars else info.width
            return
        n = len(toks)
        while i < n:
            stars = 0
            while i < n and ((toks[i].kind == tk.PUNCT and toks[i].text == "*")
                             or (toks[i].kind == tk.KEYWORD and toks[i].text in QUALIFIER_KEYWORDS)):
                if toks[i].text == "*":
                    stars += 1
                i += 1
            if i >= n or toks[i].kind != tk.IDENTIFIER:
                while i < n and toks[i].text != ",":
                    i += 1
                i += 1
                continue
            name = toks[i].text
            name_tok = toks[i]
            i += 1
            count = 1
            while i < n and toks[i].kind == tk.PUNCT and toks[i].text == "[":
                depth = 0
                j = i
                while j < n:
                    if toks[j].kind == tk.PUNCT:
                        if toks[j].text == "[":
                            depth += 1
                        elif toks[j].text == "]":
                            depth -= 1
                            if depth == 0:
                                break
                    j += 1
                count *= self._const_int(toks[i + 1 : j], frame, file_id, line, default=1)
                i = j + 1
            if stars:
                width = 8
            elif info.tag is not None:
                width = self.s.store.ensure_size(info.tag) or info.width
            else:
                width = info.width
            region = s.store.alloc_region(name, STACK, size=width * count,
                                          struct_tag=info.tag if not stars else None)
            slot = Slot(region.id, 0, width,
                        pointee_tag=info.tag if stars else None,
                        struct_tag=info.tag if not stars else None,
                        elem_width=width)
            frame.locals[name] = slot
            if i < n and toks[i].kind == tk.PUNCT and toks[i].text == "=":
                depth = 0
                j = i + 1
                while j < n:
                    t = toks[j]
                    if t.kind == tk.PUNCT:
                        if t.text in "([{":
                            depth += 1
                        elif t.text in ")]}":
                            depth -= 1
                        elif t.text == "," and depth == 0:
                            break
                    j += 1
                v = self._eval_expanded(toks[i + 1 : j], frame, file_id,
                                        name_tok.line)
                if stars and info.tag and v.pointee_tag is None:
                    v.pointee_tag = info.tag
                s.store.store(Location(region.id, 0), v)
                i = j
            if i < n and toks[i].kind == tk.PUNCT and toks[i].text == ",":
                i += 1
                continue
            break

    def _const_int(self, toks, frame, file_id, line, default=1):
        toks = [t for t in toks if t.kind not in tk.TRIVIA]
        if len(toks) == 1 and toks[0].kind == tk.NUMBER:
            return parse_int_literal(toks[0].text)[0]
        try:
            v = self._eval_expanded(toks, frame, file_id, line)
            r = self.s.values.resolve(v)
            if isinstance(r, Concrete):
                return to_int(r)
        except Exception:
            pass
        return default

    # ----------------------------------------------------------- struct defs
    def _layout_from_corpus(self, tag):
        corpus = self.s.corpus
        for fid in corpus.files:
            toks = corpus.tokens(fid)
            n = len(toks)
            for i, t in enumerate(toks):
                if t.kind != tk.KEYWORD or t.text not in ("struct", "union"):
                    continue
                j = tk.skip_trivia(toks, i + 1, n)
                if j >= n or toks[j].kind != tk.IDENTIFIER or toks[j].text != tag:
                    continue
                k = tk.skip_trivia(toks, j + 1, n)
                if k >= n or toks[k].kind != tk.PUNCT or toks[k].text != "{":
                    continue
                try:
                    _, end = tk.find_balanced_span(
                        tk.Cursor(toks, k, limit=n, file_id=fid), "{", "}")
                except Exception:
                    continue
                body = [x for x in self._expand(toks[k + 1 : end])
                        if x.kind not in tk.TRIVIA]
                return self._parse_struct_body(body)
        return None

    def _parse_struct_body(self, toks):
        layout: dict[str, FieldInfo] = {}
        offset = 0
        i = 0
        n = len(toks)
        while i < n:
            if toks[i].kind == tk.PUNCT and toks[i].text == ";":
                i += 1
                continue
            j, info = parse_type_prefix(toks, i, self.s.typedefs)
            if j == i:
                if toks[i].kind == tk.IDENTIFIER:
                    info = TypeInfo(width=4, saw_type=True)  # unknown typedef
                    j = i + 1
                else:
                    i += 1
                    continue
            i = j
            while i < n and toks[i].text != ";":
                stars = 0
                while i < n and toks[i].kind == tk.PUNCT and toks[i].text == "*":
                    stars += 1
                    i += 1
                if i >= n or toks[i].kind != tk.IDENTIFIER:
                    while i < n and toks[i].text not in (",", ";"):
                        i += 1
                    if i < n and toks[i].text == ",":
                        i += 1
                    continue
                name = toks[i].text
                i += 1
                count = 1
                while i < n and toks[i].kind == tk.PUNCT and toks[i].text == "[":
                    depth = 0
                    j2 = i
                    while j2 < n:
                        if toks[j2].kind == tk.PUNCT:
                            if toks[j2].text == "[":
                                depth += 1
                            elif toks[j2].text == "]":
                                depth -= 1
                                if depth == 0:
                                    break
                        j2 += 1
                    inner = [t for t in toks[i + 1 : j2] if t.kind == tk.NUMBER]
                    count *= parse_int_literal(inner[0].text)[0] if len(inner) == 1 else 1
                    i = j2 + 1
                if stars:
                    width = 8
                elif info.tag is not None:
                    width = self.s.store.ensure_size(info.tag) or 4
                else:
                    width = info.width
                layout[name] = FieldInfo(offset, width, count)
                offset += width * count
                while i < n and toks[i].text not in (",", ";"):
                    i += 1
                if i < n and toks[i].text == ",":
                    i += 1
            i += 1
        return layout

    # ------------------------------------------------------------- branching
    def truth(self, v: Value, at) -> bool:
        s = self.s
        r = s.values.resolve(v)
        if isinstance(r, Concrete):
            return r.bits != 0
        if r.pointer is not None and not r.blockers:
            return True  # a materialized region address is never NULL here
        labels = s.values.labels_for(r.blockers)
        policy = s.branch_policy
        if policy == ASSUME_TRUE:
            outcome = True
        elif policy == ASSUME_FALSE:
            outcome = False
        elif policy == ASK and s.ask is not None:
            outcome = bool(s.ask(
                f"symbolic branch at {at[0]}:{at[1]} "
                f"(blockers: {', '.join(labels)}); assume true?"
            ))
        else:
            raise SymbolicBranch(
                f"symbolic branch at line {at[1]} "
                f"(blockers: {', '.join(labels)})",
                blockers=labels, line=at[1],
            )
        s.emit_event("diagnostic",
                     message=f"assumed {str(outcome).lower()} for symbolic "
                             f"branch at line {at[1]}")
        self._learn_branch(v, outcome, at)
        return outcome

    def _learn_branch(self, v: Value, outcome: bool, at):
        vals = self.s.values
        payload = v.payload
        if isinstance(payload, SymbolRoot):
            if not outcome and v.id not in vals.bindings \
                    and v.id not in vals.pointer_bindings:
                vals.concretize(v, make_concrete(32, 0), "branch-comparison", at)
            return
        if not hasattr(payload, "op") or payload.op not in ("==", "!="):
            return
        a = vals.get(payload.operands[0])
        b = vals.get(payload.operands[1])
        ra, rb = vals.resolve(a), vals.resolve(b)
        sym = conc = None
        if isinstance(a.payload, SymbolRoot) and a.id not in vals.bindings \
                and isinstance(rb, Concrete):
            sym, conc = a, rb
        elif isinstance(b.payload, SymbolRoot) and b.id not in vals.bindings \
                and isinstance(ra, Concrete):
            sym, conc = b, ra
        if sym is None:
            return
        if (payload.op == "==" and outcome) or (payload.op == "!=" and not outcome):
            vals.concretize(sym, conc, "branch-comparison", at)

    # -------------------------------------------------------------- pointers
    def _materialize(self, symbol: Value, at) -> None:
        """Give an unbound symbol a region of its own on first dereference,
        the under-constrained default for pointers nobody modeled."""
        s = self.s
        region = s.store.alloc_region(f"*{symbol.payload.label}", OPAQUE,
                                      struct_tag=symbol.pointee_tag)
        addr = s.values.addr_of(region.id, at,
                                desc=f"materialized *{symbol.payload.label}")
        addr.pointee_tag = symbol.pointee_tag
        s.values.bind_pointer(symbol, addr)
        s.emit_event("diagnostic",
                     message=f"materialized region {region.id} for "
                             f"{symbol.payload.label}")

    def deref_location(self, ptr: Value, at) -> tuple[int, int]:
        s = self.s
        r = s.values.resolve(ptr)
        if isinstance(r, Concrete):
            if s.absolute_region is None:
                s.absolute_region = s.store.alloc_region("absolute", STATIC).id
            return s.absolute_region, to_int(r)
        if r.pointer is not None:
            return r.pointer
        # A lone unbound root in the way (the pointer itself, or the base of
        # a pointer+offset term) becomes a fresh region.
        if len(r.blockers) == 1:
            blocker = s.values.get(r.blockers[0])
            if isinstance(blocker.payload, SymbolRoot) \
                    and blocker.id not in s.values.bindings \
                    and blocker.id not in s.values.pointer_bindings:
                self._materialize(blocker, at)
                r = s.values.resolve(ptr)
                if r.pointer is not None:
                    return r.pointer
        labels = s.values.labels_for(r.blockers)
        raise SymbolicAddress(
            f"cannot dereference symbolic pointer at line {at[1]} "
            f"(blocked by: {', '.join(labels) or 'opaque value'})",
            blockers=labels,
        )

    def _locate(self, place: Place, at):
        if place.region is not None:
            return place.region, place.offset
        rid, base = self.deref_location(place.ptr, at)
        off = place.offset
        if isinstance(off, int):
            return rid, base + off
        if base:
            off = self.s.values.apply_binop(
                "+", self.s.values.concrete(64, base, at, desc=f"base {base}"),
                off, at)
        return rid, off

    def load_place(self, place: Place, at) -> Value:
        rid, off = self._locate(place, at)
        v = self.s.store.load(Location(rid, off), place.width, at)
        if v.pointee_tag is None and place.pointee_tag:
            v.pointee_tag = place.pointee_tag
        return v

    def store_place(self, place: Place, value: Value, at):
        rid, off = self._locate(place, at)
        if place.pointee_tag and value.pointee_tag is None:
            value.pointee_tag = place.pointee_tag
        self.s.store.store(Location(rid, off), value)

    def _struct_tag_for(self, base: Value, rid: int) -> str:
        if base.pointee_tag:
            return base.pointee_tag
        region = self.s.store.region(rid)
        if region is not None and region.struct_tag:
            return region.struct_tag
        return f"@r{rid}"

    # ------------------------------------------------------------ expression
    def eval_tokens(self, raw_toks, frame, file_id, line) -> Value:
        toks = [t for t in self._expand(raw_toks) if t.kind not in tk.TRIVIA]
        while toks and toks[-1].kind == tk.PUNCT and toks[-1].text == ";":
            toks.pop()
        return self._eval_stripped(toks, frame, file_id, line)

    def _eval_expanded(self, toks, frame, file_id, line) -> Value:
        toks = [t for t in toks if t.kind not in tk.TRIVIA]
        while toks and toks[-1].kind == tk.PUNCT and toks[-1].text == ";":
            toks.pop()
        return self._eval_stripped(toks, frame, file_id, line)

    def _eval_stripped(self, toks, frame, file_id, line) -> Value:
        if not toks:
            raise EvalError(f"empty expression at {file_id}:{line}", line=line)
        parser = _ExprParser(self, toks, frame, file_id)
        pv = parser.parse_comma()
        if parser.i < len(parser.toks):
            extra = parser.toks[parser.i]
            raise EvalError(
                f"unexpected token {extra.text!r} at {file_id}:{extra.line}",
                line=extra.line,
            )
        return parser.rval(pv)

    # -------------------------------------------------------------- services
    def exec_snippet(self, template: str, args=(), at=("<snippet>", 1)):
        """Run C statement text with {N} placeholders bound to values."""
        s = self.s
        used: dict[str, int] = {}

        def repl(m):
            idx = int(m.group(1))
            name = f"__ssi_arg{idx}"
            used[name] = idx
            return f" {name} "

        text = re.sub(r"\{(\d+)\}", repl, template)
        self._snippet_count = getattr(self, "_snippet_count", 0) + 1
        fid = f"<snippet:{self._snippet_count}>"
        toks = s.corpus.add_scratch(fid, text)
        frame = Frame(fid, is_snippet=True)
        for name, idx in used.items():
            if idx >= len(args):
                raise EvalError(f"snippet {template!r}: no argument {{{idx}}}")
            frame.value_bindings[name] = args[idx].id
        cur = tk.Cursor(toks, 0, file_id=fid)
        s.frames.append(frame)
        try:
            while not cur.at_end():
                node, cur = parse_next_statement(cur, s.rules)
                self.exec_node(node, frame)
        except EvalError as e:
            raise EvalError(f"snippet {template!r}: {e}", line=at[1])
        finally:
            s.frames.pop()

    def write_through(self, ptr: Value, value: Value, at=("<hook>", 0)):
        rid, off = self.deref_location(ptr, at)
        self.s.store.store(Location(rid, off), value)
        self.s.emit_event("write", address=self.address_display(rid, off),
                          value=value.id, line=at[1])

    def read_through(self, ptr: Value, width_bytes: int = 4, at=("<hook>", 0)) -> Value:
        rid, off = self.deref_location(ptr, at)
        return self.s.store.load(Location(rid, off), width_bytes, at)

    def map_mmio(self, label: str, base_value: Value, size=None,
                 at=("<hook>", 0)) -> Value:
        region = self.s.store.alloc_region(label, MMIO, size=size)
        region.display_base = base_value.id
        return self.s.values.addr_of(region.id, at, desc=f"mmio {label}")

    def fresh_opaque(self, at) -> Value:
        sym = self.s.values.fresh_symbol(f"opaque@{at[0]}:{at[1]}", at)
        if self.s.call_stack:
            callee, site = self.s.call_stack[-1]
            self.s.values.missing_calls[sym.id] = MissingCall(
                callee, site.compact, site.file, site.line)
        return sym

    def string_value(self, token: tk.Token, file_id: str, at) -> Value:
        s = self.s
        key = (file_id, token.byte_offset, token.text)
        rid = s.string_regions.get(key)
        if rid is None:
            data = unescape_c(token.text[1:-1]) if len(token.text) >= 2 else ""
            region = s.store.alloc_region(f"str@{at[0]}:{at[1]}", STATIC,
                                          size=len(data) + 1)
            for i, ch in enumerate(data):
                s.store.store(Location(region.id, i),
                              s.values.concrete(8, ord(ch) & 0xFF, at,
                                                desc="string byte"))
            s.store.store(Location(region.id, len(data)),
                          s.values.concrete(8, 0, at, desc="string NUL"))
            s.string_regions[key] = region.id
            rid = region.id
        return s.values.addr_of(rid, at, desc="string literal")


class _ExprParser:
    """Precedence-climbing evaluator over one expanded token run.

    Produces values and lvalue places directly; the only buffered structure
    is the token list itself. Untaken ternary arms and short-circuited
    operands are parsed in dead mode: consumed for shape, with loads, calls,
    and stores suppressed.
    """

    def __init__(self, interp: Interp, toks, frame, file_id):
        self.it = interp
        self.toks = toks
        self.frame = frame
        self.file_id = file_id
        self.i = 0
        self.dead = 0

    # ----------------------------------------------------------- primitives
    def _err(self, msg):
        line = 0
        if self.i < len(self.toks):
            line = self.toks[self.i].line
        elif self.toks:
            line = self.toks[-1].line
        raise EvalError(f"{msg} at {self.file_id}:{line}", line=line)

    def peek(self, ahead=0):
        j = self.i + ahead
        return self.toks[j] if j < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            self._err("unexpected end of expression")
        self.i += 1
        return t

    def expect(self, text):
        t = self.next()
        if t.text != text:
            self._err(f"expected {text!r}, found {t.text!r}")
        return t

    def at(self, tok=None):
        t = tok if tok is not None else self.peek()
        if t is None and self.toks:
            t = self.toks[-1]
        return (self.file_id, t.line if t else 0)

    def _dummy(self, tok=None):
        return self.it.s.values.concrete(32, 0, self.at(tok), desc="unevaluated")

    def rval(self, pv, tok=None):
        if isinstance(pv, NameRef):
            pv = self.it_resolve_name(pv)
        if isinstance(pv, Place):
            if self.dead:
                return self._dummy(tok)
            return self.it.load_place(pv, self.at(tok))
        return pv

    def as_place(self, pv, tok=None) -> Place:
        if isinstance(pv, NameRef):
            pv = self.it_resolve_name(pv)
        if not isinstance(pv, Place):
            self._err("expression is not assignable")
        return pv

    def it_resolve_name(self, ref: NameRef):
        it, frame, s = self.it, self.frame, self.it.s
        name = ref.name
        if frame.is_snippet:
            if name == "opaque":
                return it.fresh_opaque(self.at(ref.token))
            vid = frame.value_bindings.get(name)
            if vid is not None:
                return s.values.get(vid)
        slot = frame.locals.get(name)
        if slot is not None:
            return Place(region=slot.region, offset=slot.offset, width=slot.width,
                         struct_tag=slot.struct_tag, pointee_tag=slot.pointee_tag,
                         elem_width=slot.elem_width, name=name)
        decl = s.globals.get(name)
        shape = s.global_decls.get(name)
        if decl is None:
            tag = shape.tag if shape is not None and not shape.stars else None
            size = shape.width * shape.count if shape is not None else None
            region = s.store.alloc_region(name, STATIC, size=size,
                                          struct_tag=tag)
            s.globals[name] = region.id
            decl = region.id
        if shape is not None:
            return Place(region=decl, offset=0, width=shape.width,
                         struct_tag=shape.tag if not shape.stars else None,
                         pointee_tag=shape.tag if shape.stars else None,
                         elem_width=shape.width, name=name)
        return Place(region=decl, offset=0, width=4, name=name)

    # ------------------------------------------------------------- grammar
    def parse_comma(self):
        pv = self.parse_assign()
        while True:
            t = self.peek()
            if t is None or t.kind != tk.PUNCT or t.text != ",":
                return pv
            self.rval(pv, t)  # evaluate and discard
            self.next()
            pv = self.parse_assign()

    def parse_assign(self):
        lhs = self.parse_ternary()
        t = self.peek()
        if t is not None and t.kind == tk.PUNCT and t.text in _ASSIGN_OPS:
            self.next()
            rhs = self.rval(self.parse_assign(), t)
            if self.dead:
                return rhs
            place = self.as_place(lhs, t)
            base_op = _ASSIGN_OPS[t.text]
            at = self.at(t)
            if base_op is not None:
                old = self.it.load_place(place, at)
                rhs = self.it.s.values.apply_binop(base_op, old, rhs, at)
            self.it.store_place(place, rhs, at)
            return rhs
        return lhs

    def parse_ternary(self):
        pv = self.parse_binary(0)
        t = self.peek()
        if t is None or t.kind != tk.PUNCT or t.text != "?":
            return pv
        self.next()
        cond = self.rval(pv, t)
        if self.dead:
            mid = self.parse_comma()
            self.expect(":")
            self.parse_ternary()
            return self.rval(mid, t)
        taken = self.it.truth(cond, self.at(t))
        if taken:
            result = self.rval(self.parse_comma(), t)
            self.expect(":")
            self.dead += 1
            try:
                self.parse_ternary()
            finally:
                self.dead -= 1
            return result
        self.dead += 1
        try:
            self.parse_comma()
        finally:
            self.dead -= 1
        self.expect(":")
        return self.rval(self.parse_ternary(), t)

    def parse_binary(self, tier):
        if tier >= len(_TIERS):
            return self.parse_unary()
        ops = _TIERS[tier]
        pv = self.parse_binary(tier + 1)
        while True:
            t = self.peek()
            if t is None or t.kind != tk.PUNCT or t.text not in ops:
                return pv
            self.next()
            if t.text in ("&&", "||"):
                pv = self._logical(t, pv, tier)
                continue
            lhs = self.rval(pv, t)
            rhs = self.rval(self.parse_binary(tier + 1), t)
            if self.dead:
                pv = lhs
                continue
            pv = self.it.s.values.apply_binop(t.text, lhs, rhs, self.at(t))

    def _logical(self, t, pv, tier):
        vals = self.it.s.values
        lhs = self.rval(pv, t)
        if self.dead:
            self.parse_binary(tier + 1)
            return lhs
        r = vals.resolve(lhs)
        decided = None
        if isinstance(r, Concrete):
            truthy = r.bits != 0
            if t.text == "&&" and not truthy:
                decided = 0
            elif t.text == "||" and truthy:
                decided = 1
        elif r.pointer is not None and not r.blockers and t.text == "||":
            decided = 1
        if decided is not None:
            self.dead += 1
            try:
                self.parse_binary(tier + 1)
            finally:
                self.dead -= 1
            return vals.concrete(32, decided, self.at(t), signed=True,
                                 desc=t.text, parents=(lhs.id,))
        rhs = self.rval(self.parse_binary(tier + 1), t)
        return vals.apply_binop(t.text, lhs, rhs, self.at(t))

    def parse_unary(self):
        t = self.peek()
        if t is None:
            self._err("missing expression")
        vals = self.it.s.values
        if t.kind == tk.PUNCT:
            if t.text == "(" and self._cast_ahead():
                return self._parse_cast()
            if t.text in ("!", "~", "-", "+"):
                self.next()
                v = self.rval(self.parse_unary(), t)
                if self.dead or t.text == "+":
                    return v
                op = {"!": "!", "~": "~", "-": "neg"}[t.text]
                return vals.apply_unop(op, v, self.at(t))
            if t.text == "*":
                self.next()
                ptr = self.rval(self.parse_unary(), t)
                tag = ptr.pointee_tag if isinstance(ptr, Value) else None
                return Place(ptr=ptr, offset=0, width=4, struct_tag=tag, name="*")
            if t.text == "&":
                self.next()
                pv = self.parse_unary()
                return self._address_of(pv, t)
            if t.text in ("++", "--"):
                self.next()
                return self._incdec(self.parse_unary(), t, pre=True)
        if t.kind == tk.KEYWORD and t.text == "sizeof":
            self.next()
            return self._sizeof(t)
        return self.parse_postfix()

    def _address_of(self, pv, t):
        if isinstance(pv, NameRef):
            pv = self.it_resolve_name(pv)
        if not isinstance(pv, Place):
            self._err("cannot take the address of a value")
        vals = self.it.s.values
        at = self.at(t)
        if pv.region is not None:
            v = vals.addr_of(pv.region, at, desc=f"&{pv.name or pv.region}")
            if isinstance(pv.offset, int) and pv.offset:
                v = vals.apply_binop("+", v, vals.concrete(64, pv.offset, at,
                                                           desc=f"offset {pv.offset}"), at)
            elif not isinstance(pv.offset, int):
                v = vals.apply_binop("+", v, pv.offset, at)
            v.pointee_tag = pv.struct_tag
            return v
        base = pv.ptr
        if isinstance(pv.offset, int) and pv.offset == 0:
            return base
        off = pv.offset if isinstance(pv.offset, Value) else \
            vals.concrete(64, pv.offset, at, desc=f"offset {pv.offset}")
        v = vals.apply_binop("+", base, off, at)
        v.pointee_tag = pv.struct_tag
        return v

    def _incdec(self, pv, t, pre: bool):
        if self.dead:
            return self._dummy(t)
        place = self.as_place(pv, t)
        at = self.at(t)
        vals = self.it.s.values
        old = self.it.load_place(place, at)
        one = vals.concrete(32, 1, at, desc="1")
        new = vals.apply_binop("+" if t.text == "++" else "-", old, one, at)
        self.it.store_place(place, new, at)
        return new if pre else old

    def _sizeof(self, t):
        vals = self.it.s.values
        nxt = self.peek()
        if nxt is not None and nxt.kind == tk.PUNCT and nxt.text == "(":
            save = self.i
            self.next()
            j, info = parse_type_prefix(self.toks, self.i, self.it.s.typedefs)
            if info.saw_type:
                stars = 0
                while j < len(self.toks) and self.toks[j].text == "*":
                    stars += 1
                    j += 1
                if j < len(self.toks) and self.toks[j].text == ")":
                    self.i = j + 1
                    if stars:
                        nbytes = 8
                    elif info.tag:
                        nbytes = self.it.s.store.ensure_size(info.tag) or info.width
                    else:
                        nbytes = info.width
                    return vals.concrete(64, nbytes, self.at(t), desc="sizeof")
            self.i = save
        v = self.rval(self.parse_unary(), t)
        r = self.it.s.values.resolve(v)
        nbytes = r.width // 8 if isinstance(r, Concrete) else 4
        return vals.concrete(64, nbytes, self.at(t), desc="sizeof")

    def _cast_ahead(self) -> bool:
        j = self.i + 1
        n = len(self.toks)
        saw = False
        while j < n:
            t = self.toks[j]
            if t.kind == tk.KEYWORD and (t.text in BASE_TYPE_KEYWORDS
                                         or t.text in QUALIFIER_KEYWORDS):
                saw = True
                j += 1
                continue
            if t.kind == tk.KEYWORD and t.text in ("struct", "union", "enum"):
                saw = True
                j += 1
                if j < n and self.toks[j].kind == tk.IDENTIFIER:
                    j += 1
                continue
            if (t.kind == tk.IDENTIFIER and not saw
                    and (t.text in TYPE_WIDTH_BYTES or t.text in self.it.s.typedefs)):
                saw = True
                j += 1
                continue
            break
        if not saw:
            return False
        while j < n and self.toks[j].kind == tk.PUNCT and self.toks[j].text == "*":
            j += 1
        return j < n and self.toks[j].kind == tk.PUNCT and self.toks[j].text == ")"

    def _parse_cast(self):
        t = self.expect("(")
        j, info = parse_type_prefix(self.toks, self.i, self.it.s.typedefs)
        stars = 0
        while j < len(self.toks) and self.toks[j].text == "*":
            stars += 1
            j += 1
        self.i = j
        self.expect(")")
        v = self.rval(self.parse_unary(), t)
        if self.dead:
            return v
        if stars:
            if info.tag and v.pointee_tag is None:
                v.pointee_tag = info.tag
            return v
        width_bits = info.width * 8
        return self.it.s.values.apply_cast(v, width_bits, not info.unsigned,
                                           self.at(t))

    def parse_postfix(self):
        pv = self.parse_primary()
        while True:
            t = self.peek()
            if t is None or t.kind != tk.PUNCT:
                return pv
            if t.text == "(":
                pv = self._call(pv, t)
            elif t.text == "[":
                self.next()
                idx = self.rval(self.parse_comma(), t)
                self.expect("]")
                pv = self._index(pv, idx, t)
            elif t.text == "->":
                self.next()
                field = self.next()
                base = self.rval(pv, t)
                pv = self._arrow(base, field.text, t)
            elif t.text == ".":
                self.next()
                field = self.next()
                pv = self._dot(pv, field.text, t)
            elif t.text in ("++", "--"):
                self.next()
                if self.dead:
                    pv = self._dummy(t)
                    continue
                place = self.as_place(pv, t)
                at = self.at(t)
                vals = self.it.s.values
                old = self.it.load_place(place, at)
                one = vals.concrete(32, 1, at, desc="1")
                new = vals.apply_binop("+" if t.text == "++" else "-", old, one, at)
                self.it.store_place(place, new, at)
                pv = old
            else:
                return pv

    def _call(self, pv, open_tok):
        if not isinstance(pv, NameRef):
            callee = self.rval(pv, open_tok)
            self._parse_args()
            if self.dead:
                return self._dummy(open_tok)
            return self.it.computed_call(callee, (), self.at(open_tok))
        start = pv.index
        name_tok = pv.token
        args = self._parse_args()
        close_index = self.i - 1
        close_tok = self.toks[close_index]
        compact = " ".join(x.text for x in self.toks[start : close_index + 1])
        text = compact
        if not name_tok.synthetic and not close_tok.synthetic:
            try:
                src = self.it.s.corpus.source(self.file_id)
                text = src[name_tok.byte_offset : close_tok.byte_offset
                           + len(close_tok.text)]
            except KeyError:
                pass
        site = CallSite(self.file_id, name_tok.line, text, compact)
        if self.dead:
            return self._dummy(open_tok)
        return self.it.call_named(pv.name, args, site)

    def _parse_args(self):
        self.expect("(")
        args = []
        t = self.peek()
        if t is not None and t.kind == tk.PUNCT and t.text == ")":
            self.next()
            return args
        while True:
            args.append(self.rval(self.parse_assign(), t))
            t = self.next()
            if t.text == ")":
                return args
            if t.text != ",":
                self._err(f"expected ',' or ')' in call, found {t.text!r}")

    def _index(self, pv, idx, t):
        at = self.at(t)
        vals = self.it.s.values
        if isinstance(pv, NameRef):
            pv = self.it_resolve_name(pv)
        r = vals.resolve(idx)
        if isinstance(pv, Place):
            elem = pv.elem_width or pv.width or 4
            base = pv
        else:
            elem = 4
            base = Place(ptr=pv, offset=0, width=4,
                         struct_tag=pv.pointee_tag if isinstance(pv, Value) else None)
        if isinstance(r, Concrete):
            delta = to_int(r) * elem
            if isinstance(base.offset, int):
                new_off = base.offset + delta
            else:
                new_off = vals.apply_binop(
                    "+", base.offset, vals.concrete(64, delta, at, desc="index"), at)
        else:
            scaled = vals.apply_binop(
                "*", idx, vals.concrete(64, elem, at, desc=f"elem {elem}"), at)
            if isinstance(base.offset, int):
                if base.offset:
                    scaled = vals.apply_binop(
                        "+", scaled, vals.concrete(64, base.offset, at, desc="offset"), at)
                new_off = scaled
            else:
                new_off = vals.apply_binop("+", base.offset, scaled, at)
        return Place(region=base.region, ptr=base.ptr, offset=new_off,
                     width=elem, elem_width=elem, struct_tag=base.struct_tag,
                     name=f"{base.name}[]")

    def _arrow(self, base: Value, field: str, t):
        at = self.at(t)
        if self.dead:
            return self._dummy(t)
        rid, base_off = self.it.deref_location(base, at)
        tag = self.it._struct_tag_for(base, rid)
        info = self.it.s.store.field_offset(tag, field, 4)
        return Place(region=rid, offset=base_off + info.offset, width=info.width,
                     elem_width=info.width, name=field)

    def _dot(self, pv, field: str, t):
        place = self.as_place(pv, t)
        at = self.at(t)
        tag = place.struct_tag
        if tag is None:
            if place.region is not None:
                tag = f"@r{place.region}"
            else:
                rid, base_off = self.it.deref_location(place.ptr, at)
                place = Place(region=rid, offset=base_off
                              if isinstance(place.offset, int) and place.offset == 0
                              else place.offset, name=place.name)
                tag = f"@r{rid}"
        info = self.it.s.store.field_offset(tag, field, 4)
        if isinstance(place.offset, int):
            new_off = place.offset + info.offset
        else:
            new_off = self.it.s.values.apply_binop(
                "+", place.offset,
                self.it.s.values.concrete(64, info.offset, at, desc="field"), at)
        return Place(region=place.region, ptr=place.ptr, offset=new_off,
                     width=info.width, elem_width=info.width, name=field)

    def parse_primary(self):
        t = self.next()
        vals = self.it.s.values
        if t.kind == tk.NUMBER:
            value, bits, signed = parse_int_literal(t.text)
            return vals.concrete(bits, value, self.at(t), signed=signed,
                                 desc=f"literal {t.text}")
        if t.kind == tk.CHAR:
            inner = unescape_c(t.text[1:-1]) if len(t.text) >= 2 else "\0"
            code = ord(inner[0]) if inner else 0
            return vals.concrete(32, code, self.at(t), signed=True,
                                 desc=f"literal {t.text}")
        if t.kind == tk.STRING:
            return self.it.string_value(t, self.file_id, self.at(t))
        if t.kind == tk.IDENTIFIER:
            return NameRef(t.text, t, self.i - 1)
        if t.kind == tk.PUNCT and t.text == "(":
            pv = self.parse_comma()
            self.expect(")")
            return pv
        self._err(f"unexpected token {t.text!r}")
