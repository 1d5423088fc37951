"""Run configuration: flat key=value files with command-line overrides.

The file format is one `key=value` pair per line, `#` starts a comment.
Defaults reproduce the reference experiment parameters; the boundary
pressure ratio alpha has no default because it defines the experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config_file", "load_config"]


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    order: int = 5
    t_order: int = 1
    dt: float = 0.01
    t_final: float = 7.0
    gamma: float = 1.4
    rho0: float = 1.25
    p_ref: float = 1.0
    tol: float = 1e-12
    max_picard: int = 50
    relaxation: float = 1.0
    snapshots: tuple = ()
    out_dir: str = "run"
    resolution: int = 40

    @property
    def n_slabs(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def p_env(self) -> float:
        return self.alpha * self.p_ref

    def validate(self) -> "RunConfig":
        for key in ("alpha", "dt", "t_final", "gamma", "rho0", "p_ref", "tol", "relaxation"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"config key '{key}' must be positive")
        for key in ("order", "t_order", "max_picard"):
            if getattr(self, key) < 1:
                raise ConfigError(f"config key '{key}' must be at least 1")
        if self.gamma <= 1:
            raise ConfigError("config key 'gamma' must exceed 1")
        if self.relaxation > 1:
            raise ConfigError("config key 'relaxation' must lie in (0, 1]")
        if self.resolution < 2:
            raise ConfigError("config key 'resolution' must be at least 2")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, abs(ratio)):
            raise ConfigError(
                f"config keys 'dt'/'t_final': t_final/dt = {ratio:.12g} is not an integer "
                "number of slabs"
            )
        for t in self.snapshots:
            if t < 0 or t > self.t_final + 1e-12:
                raise ConfigError(f"config key 'snapshots': time {t:g} outside [0, t_final]")
        return self


_INT_KEYS = {"order", "t_order", "max_picard", "resolution"}
_FLOAT_KEYS = {"alpha", "dt", "t_final", "gamma", "rho0", "p_ref", "tol", "relaxation"}
_STR_KEYS = {"out_dir"}
_LIST_KEYS = {"snapshots"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS


def _parse_value(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _LIST_KEYS:
            raw = raw.strip()
            return tuple(float(tok) for tok in raw.split(",") if tok.strip()) if raw else ()
        return raw
    except ValueError as err:
        raise ConfigError(f"config key '{key}': cannot parse value {raw!r}") from err


def parse_config_file(path) -> dict:
    """Raw key/value dict from a flat config file."""
    values = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in _ALL_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key: {key}")
            values[key] = _parse_value(key, raw)
    return values


def load_config(path=None, overrides=None) -> RunConfig:
    """Validated RunConfig from an optional file plus override dict."""
    values = parse_config_file(path) if path is not None else {}
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown config key: {key}")
        values[key] = _parse_value(key, val) if isinstance(val, str) else val
    if "alpha" not in values:
        raise ConfigError(
            "config key 'alpha' is required (boundary pressure ratio has no default)"
        )
    cfg = RunConfig(**values)
    return cfg.validate()


def config_items(cfg: RunConfig):
    """(key, formatted value) pairs of the resolved configuration."""
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            out.append((f.name, ",".join(f"{t:g}" for t in v)))
        elif isinstance(v, float):
            out.append((f.name, f"{v:.17g}"))
        else:
            out.append((f.name, str(v)))
    return out
