"""One interpretation session: values, memory, hooks, events, debugger state.

A session is owned by one logical thread. It may be handed between threads,
but nothing here synchronizes concurrent mutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .islands import Corpus, RuleRegistry
from .memory import Store
from .values import MissingCall, ValueTable

ASK = "ask"
ASSUME_TRUE = "assume-true"
ASSUME_FALSE = "assume-false"
FAIL = "fail"
BRANCH_POLICIES = (ASK, ASSUME_TRUE, ASSUME_FALSE, FAIL)

DEFAULT_MAX_STEPS = 1_000_000


@dataclass
class ModelEvent:
    seq: int
    kind: str  # call | hook | missing-model | write | diagnostic | unexpanded-macro
    callee: str | None = None
    call_text: str | None = None
    file: str | None = None
    line: int | None = None
    args: tuple | None = None
    address: str | None = None
    value: int | None = None
    message: str | None = None
    name: str | None = None


@dataclass
class CommandSpec:
    entry: str
    params: dict[str, int] = field(default_factory=dict)  # name -> 1-based argv index


@dataclass
class Slot:
    region: int
    offset: int
    width: int = 4
    pointee_tag: str | None = None
    struct_tag: str | None = None
    elem_width: int | None = None


@dataclass
class Frame:
    function: str
    locals: dict[str, Slot] = field(default_factory=dict)
    value_bindings: dict[str, int] = field(default_factory=dict)  # snippet placeholders
    position: tuple = ("<none>", 0)
    is_snippet: bool = False


class Session:
    def __init__(
        self,
        corpus: Corpus,
        rules: RuleRegistry | None = None,
        branch_policy: str = FAIL,
        max_steps: int = DEFAULT_MAX_STEPS,
        out=None,
    ):
        self.corpus = corpus
        self.rules = rules or RuleRegistry()
        self.values = ValueTable()
        self.store = Store(self.values)
        self.store.on_fresh = self._annotate_fresh_memory

        self.branch_policy = branch_policy
        self.max_steps = max_steps
        self.steps = 0

        self.hooks: dict[str, object] = {}
        self.events: list[ModelEvent] = []
        self._seq = 0

        self.frames: list[Frame] = []
        self.call_stack: list[tuple[str, object]] = []  # (callee, CallSite) of active hooks
        self.globals: dict[str, int] = {}  # name -> region id
        self.typedefs: dict[str, int] = {}  # name -> width
        self.global_decls: dict[str, object] = {}  # name -> GlobalDecl
        self.string_regions: dict[tuple, int] = {}
        self.absolute_region: int | None = None

        self.commands: dict[str, CommandSpec] = {}
        self.command_params: dict[str, int] = {}
        self.dtsi_files: list = []
        self.chosen_compatible: str | None = None

        self.breakpoints: dict[tuple, object] = {}  # (file or None, line) -> Breakpoint
        self.trace_specs: dict[str, object] = {}    # callee -> TraceSpec
        self.stop_handler = None   # callable(position) -> "continue" | "step"
        self.pending_stop = False
        self.single_step = False
        self.ask = None            # callable(prompt) -> bool, for the ask policy

        self.parse_events: list[tuple[str, int, str]] = []
        self.batch_failed = False
        self.out = out

        self.interp = None  # set by Interp.__init__

    # ---------------------------------------------------------------- events
    def emit_event(self, kind: str, **fields) -> ModelEvent:
        ev = ModelEvent(self._seq, kind, **fields)
        self._seq += 1
        self.events.append(ev)
        return ev

    def emit_line(self, text: str) -> None:
        if self.out is not None:
            self.out(text)

    def events_of(self, kind: str) -> list[ModelEvent]:
        return [e for e in self.events if e.kind == kind]

    # ----------------------------------------------------------------- hooks
    def register_hook(self, name: str, fn, doc: str = "") -> None:
        from .hooks import Hook

        if name in self.hooks:
            self.emit_event("diagnostic", name=name,
                            message=f"hook {name} re-registered; replacing")
        self.hooks[name] = Hook(name, fn, doc)

    def unregister_hook(self, name: str) -> None:
        self.hooks.pop(name, None)

    # ------------------------------------------------------------ attribution
    def _annotate_fresh_memory(self, symbol, loc) -> None:
        # A fresh symbol minted while a hook runs is the model's doing; point
        # diagnostics at the call being modeled.
        if self.call_stack:
            callee, site = self.call_stack[-1]
            self.values.missing_calls[symbol.id] = MissingCall(
                callee, site.compact, site.file, site.line
            )

    def on_parse(self, node) -> None:
        self.parse_events.append((node.file_id, node.line, type(node).__name__))

    # ------------------------------------------------------------- debugging
    def breakpoint_at(self, file_id: str, line: int):
        bp = self.breakpoints.get((file_id, line))
        if bp is None:
            bp = self.breakpoints.get((None, line))
        return bp

    def reset_for_command(self) -> None:
        self.steps = 0
        self.pending_stop = False
        self.single_step = False
        self.command_params = {}
