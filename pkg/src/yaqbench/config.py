"""Key-value configuration for the command line.

The file format is one ``key = value`` per line; ``#`` starts a comment.
Flags given on the command line override the file.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional

from .elaborate import MAX_BANG
from .equivalence import DEFAULT_BFS_DEPTH, DEFAULT_BFS_NODES, DEFAULT_STEPS

__all__ = ["CliConfig", "ConfigError", "load_config", "parse_config", "dump_config", "parse_lawcfg"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CliConfig:
    bang_budget: int = MAX_BANG
    normalize_steps: int = DEFAULT_STEPS
    bfs_depth: int = DEFAULT_BFS_DEPTH
    bfs_nodes: int = DEFAULT_BFS_NODES
    law_max_size: int = 3
    law_limit: int = 0  # 0: every tuple of objects
    gates: Optional[str] = None
    max_qubits: int = 12
    format: str = "text"
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type == "int" and not isinstance(v, int):
                raise ConfigError(f"{f.name} must be an integer")
        for name in ("bang_budget", "normalize_steps", "bfs_depth", "bfs_nodes", "law_max_size", "max_qubits"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.law_limit < 0:
            raise ConfigError("law_limit must be non-negative")
        if self.format not in ("text", "json"):
            raise ConfigError("format must be text or json")

    def override(self, **kw) -> "CliConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_TYPES = {f.name: f.type for f in fields(CliConfig)}


def parse_config(text: str) -> CliConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if _TYPES[key] == "int":
            try:
                values[key] = int(val)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from None
        else:
            values[key] = val or None
    return CliConfig(**values)


def load_config(path: Optional[str]) -> CliConfig:
    if path is None:
        return CliConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


_LAW_KEYS = {"model": str, "objects": str, "limit": int, "optional_limit": int, "seed": int, "diagrams": list}


def parse_lawcfg(text: str) -> dict:
    """A ``.lawcfg`` file: ``model``, ``objects``, ``limit``, ``optional_limit``, ``seed``, ``diagrams``.

    ``diagrams`` is a comma-separated list of diagram ids.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = (s.strip() for s in line.partition("="))
        kind = _LAW_KEYS.get(key.replace("-", "_"))
        if not sep or kind is None:
            raise ConfigError(f"line {lineno}: expected one of {', '.join(_LAW_KEYS)} = value")
        key = key.replace("-", "_")
        if kind is int:
            try:
                out[key] = int(val)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from None
        elif kind is list:
            out[key] = [d.strip() for d in val.split(",") if d.strip()]
        else:
            out[key] = val
    if out.get("model", "finset") not in ("finset", "yaq"):
        raise ConfigError("model must be finset or yaq")
    return out


def dump_config(cfg: CliConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {'' if v is None else v}")
    return "\n".join(lines) + "\n"
