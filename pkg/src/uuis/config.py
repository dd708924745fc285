"""Runtime configuration from an INI file plus UUIS_* environment overrides.

File keys (section.key): server.host, server.port, store.path,
backup.dir, backup.daily_at, search.page_size, auth.idle_seconds,
auth.pbkdf2_iterations. Each maps to an environment variable named
UUIS_<SECTION>_<KEY>, which wins over the file.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass

from .errors import ServiceError

ENV_PREFIX = "UUIS"


@dataclass
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8500
    store_path: str = "uuis.db"
    error_store_path: str = ""            # defaults next to store_path
    backup_dir: str = "backups"
    backup_daily_at: str | None = None    # "HH:MM" (UTC), None disables
    page_size: int = 25
    idle_seconds: int = 1440
    absolute_seconds: int = 12 * 3600
    pbkdf2_iterations: int = 60_000

    def resolved_error_store_path(self) -> str:
        if self.error_store_path:
            return self.error_store_path
        if self.store_path == ":memory:":
            return ":memory:"
        return self.store_path + ".errors"


_KEYS = {
    ("server", "host"): ("host", str),
    ("server", "port"): ("port", int),
    ("store", "path"): ("store_path", str),
    ("store", "error_path"): ("error_store_path", str),
    ("backup", "dir"): ("backup_dir", str),
    ("backup", "daily_at"): ("backup_daily_at", str),
    ("search", "page_size"): ("page_size", int),
    ("auth", "idle_seconds"): ("idle_seconds", int),
    ("auth", "absolute_seconds"): ("absolute_seconds", int),
    ("auth", "pbkdf2_iterations"): ("pbkdf2_iterations", int),
}


def load_config(path: str | None = None, env: dict | None = None) -> AppConfig:
    env = os.environ if env is None else env
    config = AppConfig()
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ServiceError("invalid-argument", f"config file not found: {path}")
        for (section, key), (attr, cast) in _KEYS.items():
            if parser.has_option(section, key):
                _assign(config, attr, cast, parser.get(section, key),
                        f"{section}.{key}")
    for (section, key), (attr, cast) in _KEYS.items():
        var = f"{ENV_PREFIX}_{section.upper()}_{key.upper()}"
        if var in env:
            _assign(config, attr, cast, env[var], var)
    return config


def _assign(config: AppConfig, attr: str, cast, raw: str, origin: str) -> None:
    try:
        setattr(config, attr, cast(raw))
    except ValueError:
        raise ServiceError("invalid-argument",
                           f"bad value for {origin}: {raw!r}") from None
