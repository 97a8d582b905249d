"""Experiment configuration: flat ``key = value`` files plus CLI overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from ..cf_stream import BACKENDS, INITIAL_LAWS
from ..errors import DomainError

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run; ``None`` means "experiment default"."""

    experiment: str
    n: int | None = None
    trajectories: int | None = None
    seed: int = 1
    backend: str = "natural-extension"
    initial_law: str | None = None
    gamma: float | None = None
    level: int | None = None
    theta: float | None = None
    modulus: int | None = None
    out: str | None = None
    format: str = "csv"
    threads: int = 1

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def echo(self) -> dict:
        """Parameters that determine the results (output location excluded)."""
        d = dataclasses.asdict(self)
        for key in ("out", "format", "threads"):
            d.pop(key)
        return d


_TYPES = {"n": int, "trajectories": int, "seed": int, "threads": int, "level": int, "modulus": int,
          "gamma": float, "theta": float}
KEYS = tuple(f.name for f in fields(ExperimentConfig))


def convert_value(key: str, raw: str):
    kind = _TYPES.get(key, str)
    try:
        if kind is int:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        return kind(raw)
    except ValueError:
        raise DomainError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment; dashes in keys equal underscores."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{source}:{lineno}: expected key = value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS:
            raise DomainError(f"{source}:{lineno}: unknown key {key!r}")
        out[key] = convert_value(key, raw)
    return out


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config_text(text, str(path))


def check_common(cfg: ExperimentConfig) -> None:
    """Checks shared by every experiment."""
    for key in ("n", "trajectories", "threads"):
        value = getattr(cfg, key)
        if value is not None and value < 1:
            raise DomainError(f"{key} must be positive, got {value}")
    if cfg.backend not in BACKENDS:
        raise DomainError(f"unknown backend {cfg.backend!r}; expected one of {BACKENDS}")
    if cfg.backend == "exact-rational":
        raise DomainError("exact-rational is not a random backend; use RationalSource directly")
    if cfg.initial_law is not None and cfg.initial_law not in INITIAL_LAWS:
        raise DomainError(f"initial law must be one of {INITIAL_LAWS}, got {cfg.initial_law!r}")
    if cfg.backend == "lazy-real" and cfg.initial_law == "gauss":
        raise DomainError("the lazy-real backend samples u uniformly; only the lebesgue law applies")
    if cfg.format not in FORMATS:
        raise DomainError(f"format must be one of {FORMATS}, got {cfg.format!r}")
