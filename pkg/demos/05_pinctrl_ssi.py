"""Driving the bundled pin-controller SSI from Python.

The same thing `ssi example_pinctrl/pinctrl.json --script ...` does, shown
through the embedding API: build a session from the config, feed the REPL a
script, and inspect the event log afterwards.
"""

import io
from pathlib import Path

from ssi import Repl, build_session, load_config

example = Path(__file__).resolve().parent.parent / "example_pinctrl"

config = load_config(example / "pinctrl.json")
session, interp = build_session(config)

script = io.StringIO("""\
0
verbose writel x x
probe
enable-irq 3
q
""")
out = io.StringIO()
Repl(session, interp, script, out, interactive=False).run()
print(out.getvalue())

writes = session.events_of("write")
print(f"{len(writes)} writes recorded; the last went to {writes[-1].address}")
calls = {e.callee for e in session.events_of("missing-model")}
print("unmodeled calls this run:", ", ".join(sorted(calls)) or "none")
