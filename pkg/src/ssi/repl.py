"""The gdb-style terminal interface.

Line-oriented on purpose: the loop reads commands from any stream and writes
plain lines to any stream, so transcripts are stable and scriptable. In
script mode each command is echoed as ``ssi > <command>`` and the device
choice as ``Choice: <n>``, which makes a transcript self-contained.

Built-in commands: ``b LINE`` (or ``b FILE:LINE``), ``c``, ``s``,
``xc NAME``, ``trace NAME``, ``verbose FN PATTERN``, ``q``. Everything else
is looked up in the SSI's registered command map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import tokens as tk
from .dtsi import list_compatibles
from .errors import NoSuchLocal, SsiError
from .memory import Location
from .session import Session


@dataclass
class Breakpoint:
    file: str | None
    line: int
    enabled: bool = True
    hits: int = 0


@dataclass
class TraceSpec:
    callee: str
    flags: list[str] = field(default_factory=list)  # "x" shows an argument


class _Quit(Exception):
    pass


_MODULE_FIELDS = ("MODULE_DESCRIPTION", "MODULE_AUTHOR", "MODULE_LICENSE")


def scrape_module_info(corpus) -> dict[str, list[str]]:
    """Collect MODULE_DESCRIPTION/MODULE_AUTHOR/MODULE_LICENSE strings at
    token level; the macros themselves are never executed."""
    found: dict[str, list[str]] = {k: [] for k in _MODULE_FIELDS}
    for fid in corpus.files:
        toks = corpus.tokens(fid)
        n = len(toks)
        for i, t in enumerate(toks):
            if t.kind != tk.IDENTIFIER or t.text not in _MODULE_FIELDS:
                continue
            j = tk.skip_trivia(toks, i + 1, n)
            if j >= n or toks[j].text != "(":
                continue
            j = tk.skip_trivia(toks, j + 1, n)
            if j < n and toks[j].kind == tk.STRING and len(toks[j].text) >= 2:
                found[t.text].append(toks[j].text[1:-1])
    return found


class Repl:
    def __init__(self, session: Session, interp, instream, outstream,
                 interactive: bool = False):
        self.s = session
        self.interp = interp
        self.inp = instream
        self.outs = outstream
        self.interactive = interactive
        self._failed = False
        self._running = False
        session.out = self._write
        session.stop_handler = self._on_stop
        session.ask = self._ask

    # -------------------------------------------------------------------- io
    def _write(self, text: str):
        self.outs.write(text + "\n")

    def _prompt(self, text: str) -> str | None:
        if self.interactive:
            self.outs.write(text)
            try:
                self.outs.flush()
            except Exception:
                pass
        line = self.inp.readline()
        if line == "":
            return None
        return line.rstrip("\n")

    def _read_command(self) -> str | None:
        while True:
            line = self._prompt("ssi > ")
            if line is None:
                return None
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if not self.interactive:
                self._write(f"ssi > {stripped}")
            return stripped

    def _ask(self, prompt: str) -> bool:
        answer = self._prompt(f"{prompt} [y/n] ")
        return answer is not None and answer.strip().lower().startswith("y")

    # ------------------------------------------------------------------ runs
    def run(self) -> int:
        self._banner()
        self._choose_device()
        try:
            while True:
                cmd = self._read_command()
                if cmd is None:
                    break
                self._dispatch(cmd, suspended=False)
        except _Quit:
            pass
        return 1 if (self._failed or self.s.batch_failed) else 0

    def _banner(self):
        info = scrape_module_info(self.s.corpus)
        if not any(info.values()):
            return
        self._write("Loaded driver:")
        if info["MODULE_DESCRIPTION"]:
            self._write(f"    Description: {info['MODULE_DESCRIPTION'][0]}")
        if info["MODULE_AUTHOR"]:
            self._write(f"    Author(s): {', '.join(info['MODULE_AUTHOR'])}")
        if info["MODULE_LICENSE"]:
            self._write(f"    License: {info['MODULE_LICENSE'][0]}")

    def _choose_device(self):
        compats: list[str] = []
        for path in self.s.dtsi_files:
            for c in list_compatibles(path):
                if c not in compats:
                    compats.append(c)
        if not compats:
            return
        if len(compats) == 1:
            self.s.chosen_compatible = compats[0]
            return
        self._write("Choose device:")
        for i, c in enumerate(compats):
            self._write(f"{i} : {c}")
        while True:
            answer = self._prompt("Choice: ")
            if answer is None:
                choice = 0
                break
            answer = answer.strip()
            if not self.interactive:
                self._write(f"Choice: {answer}")
            try:
                choice = int(answer)
            except ValueError:
                choice = -1
            if 0 <= choice < len(compats):
                break
            self._write(f"bad choice: {answer}")
        self.s.chosen_compatible = compats[choice]

    # -------------------------------------------------------------- commands
    def _dispatch(self, command: str, suspended: bool) -> str | None:
        parts = command.split()
        head = parts[0]
        try:
            if head == "q":
                raise _Quit()
            if head == "b":
                self._cmd_break(parts[1:])
            elif head == "c":
                if suspended:
                    return "continue"
                self._write("nothing to continue")
            elif head == "s":
                if suspended:
                    return "step"
                self._write("nothing to step")
            elif head == "xc":
                self._cmd_examine(parts[1:])
            elif head == "trace":
                self._cmd_trace_value(parts[1:])
            elif head == "verbose":
                self._cmd_verbose(parts[1:])
            elif head in self.s.commands:
                if self._running:
                    self._write(f"error: cannot run {head!r} while suspended")
                    self._failed = True
                else:
                    self._run_entry(head, parts[1:])
            else:
                self._write(f"unknown command: {head}")
                self._failed = True
        except _Quit:
            raise
        except SsiError as e:
            self._write(f"error: {e}")
            self._failed = True
        return None

    def _run_entry(self, name, argv):
        self._running = True
        try:
            self.interp.run_entry(name, argv)
        finally:
            self._running = False

    def _on_stop(self, position) -> str:
        file_id, line = position
        self._write(f"ssi :: On line {line}")
        while True:
            cmd = self._read_command()
            if cmd is None:
                return "continue"
            action = self._dispatch(cmd, suspended=True)
            if action is not None:
                return action

    # ----------------------------------------------------------- inspections
    def _cmd_break(self, args):
        if not args:
            self._write("usage: b [FILE:]LINE")
            return
        spec = args[0]
        file_id = None
        if ":" in spec:
            file_id, _, spec = spec.rpartition(":")
        try:
            line = int(spec)
        except ValueError:
            self._write(f"bad line number: {args[0]}")
            return
        self.s.breakpoints[(file_id, line)] = Breakpoint(file_id, line)

    def _cmd_verbose(self, args):
        if not args:
            self._write("usage: verbose FN PATTERN")
            return
        self.s.trace_specs[args[0]] = TraceSpec(args[0], list(args[1:]))

    def _find_local(self, name):
        for frame in reversed(self.s.frames):
            slot = frame.locals.get(name)
            if slot is not None:
                return slot
        raise NoSuchLocal(f"no such local: {name}")

    def _cmd_examine(self, args):
        if not args:
            self._write("usage: xc NAME")
            return
        slot = self._find_local(args[0])
        value = self.s.store.load(Location(slot.region, slot.offset), slot.width)
        text, blocked = self.interp.display_value(value)
        if text is None:
            labels = self.s.values.labels_for(blocked.blockers)
            text = f"<symbolic> blocked by: {', '.join(labels)}"
        self._write(f"({slot.region}, {slot.offset}) = {text}")

    def _cmd_trace_value(self, args):
        if not args:
            self._write("usage: trace NAME")
            return
        slot = self._find_local(args[0])
        value = self.s.store.load(Location(slot.region, slot.offset), slot.width)
        for _vid, (file_id, line), desc, parents in \
                self.s.values.provenance_trace(value):
            joined = ", ".join(f"v{p}" for p in parents)
            self._write(f"{file_id}:{line} {desc}({joined})")


def run_script(session: Session, interp, script_path, outstream) -> int:
    """Batch mode: same semantics as interactive input, commands echoed."""
    with open(script_path, "r", encoding="utf-8") as f:
        return Repl(session, interp, f, outstream, interactive=False).run()
