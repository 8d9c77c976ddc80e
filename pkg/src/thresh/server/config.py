"""Server configuration from a YAML file.

Precedence: explicit path argument, then the THRESH_CONFIG environment
variable, then built-in defaults. Unknown keys fail loudly rather than
silently configuring nothing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

import yaml

from ..errors import SchemaError, YamlSyntaxError

ENV_VAR = "THRESH_CONFIG"

MAX_FETCH_BYTES = 8 * 1024 * 1024
FETCH_TIMEOUT_SECONDS = 10.0
MAX_REDIRECTS = 3


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8571
    secret: str = "insecure-dev-secret"
    store_dir: str | None = None  # None keeps sessions in memory
    static_dir: str | None = None


def load_config(path: str | None = None) -> ServerConfig:
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return ServerConfig()
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise YamlSyntaxError(
            f"server config is not valid YAML: {exc}",
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from exc
    if raw is None:
        return ServerConfig()
    if not isinstance(raw, dict):
        raise SchemaError("server config must be a YAML mapping", path="")

    known = {f.name: f.type for f in fields(ServerConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise SchemaError(f"unknown server config key {key!r}", path=key,
                              code="E_UNKNOWN_KEY")
        kwargs[key] = value
    config = ServerConfig(**kwargs)
    if not isinstance(config.port, int) or not 0 < config.port < 65536:
        raise SchemaError(f"port must be an integer in (0, 65536), got {config.port!r}",
                          path="port", code="E_WRONG_TYPE")
    if not isinstance(config.host, str) or not config.host:
        raise SchemaError("host must be a non-empty string", path="host", code="E_WRONG_TYPE")
    if not isinstance(config.secret, str):
        raise SchemaError("secret must be a string", path="secret", code="E_WRONG_TYPE")
    for key in ("store_dir", "static_dir"):
        value = getattr(config, key)
        if value is not None and not isinstance(value, str):
            raise SchemaError(f"{key} must be a string path", path=key, code="E_WRONG_TYPE")
    return config
