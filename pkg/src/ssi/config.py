"""SSI configuration files and session assembly.

A config is JSON naming the corpus files, device-tree files, declarative
model files, host-language hook modules, and the command map:

    {
      "name": "bcm2835-pinctrl",
      "corpus": ["pinctrl-bcm2835.c", "pinctrl-bcm2835-irq.c"],
      "dtsi": ["bcm283x.dtsi"],
      "hooks": ["models.py"],
      "models": [],
      "commands": {
        "probe": {"entry": "bcm2835_pinctrl_probe"},
        "enable-irq": {"entry": "bcm2835_gpio_irq_enable",
                        "params": {"gpio": 1}}
      }
    }

Paths are relative to the config file. Hook modules are Python files that
define ``register(session)``; declarative model files follow the schema in
``hooks.load_declarative_model``. ``params`` maps a session parameter name to
the 1-based position of the command-line argument that supplies it.
"""

from __future__ import annotations

import importlib.util
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .hooks import load_declarative_model
from .islands import Corpus
from .interp import Interp
from .session import DEFAULT_MAX_STEPS, FAIL, CommandSpec, Session


@dataclass
class SsiConfig:
    name: str
    root: Path
    corpus: list[Path]
    dtsi: list[Path] = field(default_factory=list)
    models: list[Path] = field(default_factory=list)
    hooks: list[Path] = field(default_factory=list)
    commands: dict[str, CommandSpec] = field(default_factory=dict)


def load_config(path) -> SsiConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: {e.msg}")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    root = path.parent

    def paths(key):
        items = data.get(key, [])
        if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
            raise ConfigError(f"{path}: {key!r} must be a list of file names")
        return [root / x for x in items]

    corpus = paths("corpus")
    if not corpus:
        raise ConfigError(f"{path}: 'corpus' must name at least one source file")
    commands = {}
    for name, spec in (data.get("commands") or {}).items():
        if not isinstance(spec, dict) or not isinstance(spec.get("entry"), str):
            raise ConfigError(f"{path}: command {name!r} needs an 'entry' function")
        params = spec.get("params", {})
        if not isinstance(params, dict) or not all(
            isinstance(k, str) and isinstance(v, int) for k, v in params.items()
        ):
            raise ConfigError(f"{path}: command {name!r} params must map "
                              f"names to 1-based argument positions")
        commands[name] = CommandSpec(spec["entry"], dict(params))
    return SsiConfig(
        name=data.get("name", path.stem),
        root=root,
        corpus=corpus,
        dtsi=paths("dtsi"),
        models=paths("models"),
        hooks=paths("hooks"),
        commands=commands,
    )


def _load_hook_module(session, path: Path, index: int):
    spec = importlib.util.spec_from_file_location(
        f"_ssi_hooks_{index}_{path.stem}", path)
    if spec is None or spec.loader is None:
        raise ConfigError(f"cannot load hook module {path}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    register = getattr(module, "register", None)
    if register is None:
        raise ConfigError(f"hook module {path} defines no register(session)")
    register(session)


def build_session(
    config: SsiConfig,
    out=None,
    branch_policy: str = FAIL,
    max_steps: int = DEFAULT_MAX_STEPS,
    without_models=(),
) -> tuple[Session, Interp]:
    """Assemble a ready-to-run session from a loaded config."""
    for p in config.corpus + config.dtsi + config.models + config.hooks:
        if not os.path.exists(p):
            raise ConfigError(f"missing file: {p}")
    corpus = Corpus.from_paths(config.corpus)
    session = Session(corpus, branch_policy=branch_policy,
                      max_steps=max_steps, out=out)
    interp = Interp(session)
    session.dtsi_files = list(config.dtsi)
    session.commands = dict(config.commands)
    for index, hook_path in enumerate(config.hooks):
        _load_hook_module(session, hook_path, index)
    for model_path in config.models:
        load_declarative_model(session, model_path)
    for name in without_models:
        session.unregister_hook(name)
    for cmd, spec in config.commands.items():
        if corpus.find_function(spec.entry) is None:
            raise ConfigError(
                f"command {cmd!r}: entry function {spec.entry!r} not found "
                f"in corpus")
    return session, interp
