"""Line-oriented simulation config files.

    # oodb-cluster-sim v1
    BUFSIZE = 50
    policy = orion
    ck.cluster_policy = no_split
    orion.cluster_messages = 1,2;3,4

Keys are the parameter names of ``SimConfig`` (upper-case for the model
parameters), dotted for the ``ck`` and ``orion`` namespaces. ``#`` starts a
comment. Omitted keys keep their defaults.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ValidationError

from src.config import CkConfig, OrionConfig, SimConfig
from src.errors import ConfigError

FORMAT_VERSION_LINE = "# oodb-cluster-sim v1"

_NAMESPACES: dict[str, type[BaseModel]] = {"ck": CkConfig, "orion": OrionConfig}
_NONE_WORDS = frozenset({"none", "null", ""})


def _parse_groups(raw: str, line: int) -> list[list[int]]:
    try:
        return [
            [int(item) for item in group.split(",") if item.strip()]
            for group in raw.split(";")
            if group.strip()
        ]
    except ValueError:
        raise ConfigError(f"cluster messages must be integers, got {raw!r}", line=line) from None


def parse_config(text: str) -> SimConfig:
    values: dict[str, object] = {}
    nested: dict[str, dict[str, object]] = {name: {} for name in _NAMESPACES}
    line_of: dict[str, int] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise ConfigError(f"expected 'KEY = value', got {raw_line.strip()!r}", line=lineno)

        namespace, dot, name = key.partition(".")
        if dot:
            model = _NAMESPACES.get(namespace)
            if model is None or name not in model.model_fields:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            if key == "orion.cluster_messages":
                nested[namespace][name] = _parse_groups(value, lineno)
            elif value.lower() in _NONE_WORDS:
                nested[namespace][name] = None
            else:
                nested[namespace][name] = value
        else:
            if key not in SimConfig.model_fields or key in _NAMESPACES:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            values[key] = None if value.lower() in _NONE_WORDS else value
        line_of[key] = lineno

    for namespace, fields in nested.items():
        if fields:
            values[namespace] = fields

    try:
        return SimConfig.model_validate(values)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = ".".join(str(part) for part in error["loc"])
        line = next(
            (line_of[k] for k in line_of if loc == k or loc.startswith(f"{k}.")),
            None,
        )
        raise ConfigError(f"{loc}: {error['msg']}", line=line) from None


def load_config(path: str | Path) -> SimConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
