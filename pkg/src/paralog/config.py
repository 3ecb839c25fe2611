"""Experiment configuration: defaults, a flat ``key = value`` file, and
command-line overrides (CLI beats file beats defaults).

Example file::

    # verify-rn at a coarser resolution
    gamma = 0.3
    nx = 256
    nt = 256
    family = holder-rough
    param.roughness = 0.4
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .extension import ExtensionLayout, omega_spec
from .families import FAMILY_KINDS, FamilySpec
from .grid import GridSpec

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config_text",
           "worker_count"]


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: float = 0.5
    nx: int = 512
    nt: int = 512
    x_min: float = -4.0
    x_max: float = 4.0
    t_min: float = -16.0
    t_max: float = 16.0
    T: float = 1.0
    omega_intervals: int = 64
    family: str = "trig-random"
    seeds: int = 50
    seed: int = 20240601
    n_min: int = 0
    n_max: int = 8
    out_dir: str = "paralog-out"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError("gamma", f"must lie in (0, 1), got {self.gamma}")
        for key in ("nx", "nt"):
            v = getattr(self, key)
            if v < 4 or v & (v - 1):
                raise ConfigError(key, f"must be a power of two >= 4, got {v}")
        if not self.x_min < self.x_max:
            raise ConfigError("x_max", "must exceed x_min")
        if not self.t_min < self.t_max:
            raise ConfigError("t_max", "must exceed t_min")
        if not self.T > 0:
            raise ConfigError("T", f"must be positive, got {self.T}")
        if self.omega_intervals < 4:
            raise ConfigError("omega_intervals", "needs at least 4 intervals")
        if self.family not in FAMILY_KINDS:
            raise ConfigError("family", f"unknown kind {self.family!r}; one of {FAMILY_KINDS}")
        if self.seeds < 1:
            raise ConfigError("seeds", "need at least one family member")
        if self.seed < 0:
            raise ConfigError("seed", "master seed must be nonnegative")
        if not 0 <= self.n_min <= self.n_max:
            raise ConfigError("n_max", f"need 0 <= n_min <= n_max, got {self.n_min}..{self.n_max}")

    # derived objects -------------------------------------------------

    def grid(self) -> GridSpec:
        return GridSpec.box(self.nx, self.nt, (self.x_min, self.x_max),
                            (self.t_min, self.t_max))

    def layout(self) -> ExtensionLayout:
        return ExtensionLayout(self.T, 1)

    def omega_grid(self) -> GridSpec:
        return omega_spec(self.layout(), self.omega_intervals, self.omega_intervals)

    def family_spec(self, start: int = 0, count: int | None = None) -> FamilySpec:
        return FamilySpec(self.family, self.seeds if count is None else count, self.seed,
                          start, dict(self.params))

    @property
    def N_range(self) -> tuple:
        return tuple(range(self.n_min, self.n_max + 1))

    def to_dict(self) -> dict:
        return asdict(self)


_FIELDS = {f.name: f for f in fields(ExperimentConfig) if f.name != "params"}
_CASTS = {"float": float, "int": int, "str": str}


def _coerce(key: str, raw: str):
    if key.startswith("param."):
        for cast in (int, float):
            try:
                return cast(raw)
            except ValueError:
                pass
        return raw
    if key not in _FIELDS:
        raise ConfigError(key, "unknown configuration key")
    cast = _CASTS[_FIELDS[key].type]     # annotations are strings here
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(key, f"cannot read {raw!r} as {cast.__name__}") from None


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        out[key] = _coerce(key, raw)
    return out


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Defaults, then the file at `path`, then `overrides` (``None`` values skipped)."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    for key, v in (overrides or {}).items():
        if v is not None:
            values[key] = _coerce(key, str(v)) if isinstance(v, str) else v
    params = {k[len("param."):]: v for k, v in values.items() if k.startswith("param.")}
    plain = {k: v for k, v in values.items() if not k.startswith("param.")}
    for k in plain:
        if k not in _FIELDS:
            raise ConfigError(k, "unknown configuration key")
    return replace(ExperimentConfig(), params=params, **plain)


def worker_count() -> int:
    """Worker pool size: ``PARALOG_THREADS`` if set, else the CPU count."""
    raw = os.environ.get("PARALOG_THREADS")
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("PARALOG_THREADS", f"not an integer: {raw!r}") from None
    if n < 1:
        raise ConfigError("PARALOG_THREADS", "must be at least 1")
    return n
