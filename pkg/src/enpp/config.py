"""Line-oriented run-configuration files.

Grammar: ``[section]`` headers group ``key = value`` lines; ``#`` starts a
comment; blank lines are ignored. Unknown sections or keys are rejected
with a line-numbered message and a close-match suggestion. The full key
table with defaults lives in the README.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .littlewood_paley import BesovSpec

__all__ = ["RunConfig", "parse_config", "parse_config_text"]

MODES = ("simulate", "iterate", "invlimit")
DRIVERS = ("enpp", "modified")


@dataclass
class RunConfig:
    # grid
    d: int = 2
    N: int | None = None
    L: float = 2.0 * math.pi
    # initial data
    preset: str | None = None
    amplitude: float = 1.0
    charge_amplitude: float = 0.1
    seed: int = 0
    n_mean: float = 1.0
    p_mean: float | None = None
    blob_width: float = 2.0
    # run
    mode: str = "simulate"
    nu: float = 0.0
    T: float | None = None
    dt: float | None = None  # None = auto from the CFL bound
    cadence: int = 10
    driver: str = "enpp"
    strict: bool = False
    renormalize_charge: bool = False
    c_cfl: float = 0.5
    # measurement
    besov_specs: tuple = (BesovSpec(2.6, 2.0, 2.0), BesovSpec(1.6, 2.0, 2.0))
    lifespan_c: float = 0.1
    lifespan_r: float = 4.0
    # iteration
    m_max: int = 8
    tol: float = 1e-6
    # viscosity sweep
    nu_list: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
    workers: int = 1
    indices: tuple | None = None  # (s1, p1, r1, s2, p2, r2) override
    # output
    out_dir: str = "enpp-out"


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    return float(text)


def _parse_float_list(text: str) -> tuple:
    return tuple(_parse_float(tok) for tok in text.replace(";", ",").split(",")
                 if tok.strip())


def _parse_besov_list(text: str) -> tuple:
    specs = []
    for group in text.split(";"):
        group = group.strip()
        if not group:
            continue
        parts = [p.strip() for p in group.split(",")]
        if len(parts) != 3:
            raise ValueError(f"Besov spec needs three entries s,p,r: {group!r}")
        specs.append(BesovSpec(_parse_float(parts[0]), _parse_float(parts[1]),
                               _parse_float(parts[2])))
    if not specs:
        raise ValueError("empty Besov spec list")
    return tuple(specs)


def _parse_indices(text: str) -> tuple:
    vals = _parse_float_list(text)
    if len(vals) != 6:
        raise ValueError("indices need six entries s1,p1,r1,s2,p2,r2")
    return vals


# section -> key -> (attribute, parser)
_SCHEMA = {
    "grid": {
        "d": ("d", int),
        "N": ("N", int),
        "L": ("L", _parse_float),
    },
    "initial": {
        "preset": ("preset", str.strip),
        "amplitude": ("amplitude", _parse_float),
        "charge_amplitude": ("charge_amplitude", _parse_float),
        "seed": ("seed", int),
        "n_mean": ("n_mean", _parse_float),
        "p_mean": ("p_mean", _parse_float),
        "blob_width": ("blob_width", _parse_float),
    },
    "run": {
        "mode": ("mode", str.strip),
        "nu": ("nu", _parse_float),
        "viscosity": ("nu", _parse_float),
        "T": ("T", _parse_float),
        "dt": ("dt", lambda t: None if t.strip().lower() == "auto" else _parse_float(t)),
        "cadence": ("cadence", int),
        "driver": ("driver", str.strip),
        "strict": ("strict", _parse_bool),
        "renormalize_charge": ("renormalize_charge", _parse_bool),
        "c_cfl": ("c_cfl", _parse_float),
    },
    "measure": {
        "besov": ("besov_specs", _parse_besov_list),
        "lifespan_c": ("lifespan_c", _parse_float),
        "lifespan_r": ("lifespan_r", _parse_float),
    },
    "iterate": {
        "m_max": ("m_max", int),
        "tol": ("tol", _parse_float),
    },
    "invlimit": {
        "nu_list": ("nu_list", _parse_float_list),
        "workers": ("workers", int),
        "indices": ("indices", _parse_indices),
    },
    "output": {
        "out_dir": ("out_dir", str.strip),
    },
}


def _suggest(name: str, options) -> str:
    close = difflib.get_close_matches(name, options, n=1, cutoff=0.6)
    return f"; did you mean {close[0]!r}?" if close else ""


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ConfigError(
                    f"{source}:{lineno}: unknown section [{name}]"
                    f"{_suggest(name, _SCHEMA)}")
            section = name
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if section is None:
            raise ConfigError(
                f"{source}:{lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        schema = _SCHEMA[section]
        if key not in schema:
            all_keys = {k for sec in _SCHEMA.values() for k in sec}
            raise ConfigError(
                f"{source}:{lineno}: unknown key {key!r} in [{section}]"
                f"{_suggest(key, all_keys)}")
        attr, parser = schema[key]
        try:
            setattr(cfg, attr, parser(value))
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(
                f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc

    _validate(cfg, source)
    return cfg


def parse_config(path) -> RunConfig:
    """Parse and validate a configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), source=str(path))


def _validate(cfg: RunConfig, source: str):
    def fail(field, message):
        raise ConfigError(f"{source}: field {field!r}: {message}")

    if cfg.N is None:
        fail("N", "grid resolution is required")
    if cfg.preset is None:
        fail("preset", "initial-data preset is required")
    if cfg.T is None:
        fail("T", "horizon T is required")
    if cfg.d not in (2, 3):
        fail("d", f"dimension must be 2 or 3, got {cfg.d}")
    if cfg.N % 2 != 0 or cfg.N < 8:
        fail("N", f"N must be even and >= 8, got {cfg.N}")
    if cfg.L <= 0:
        fail("L", f"period must be positive, got {cfg.L}")
    if cfg.T <= 0:
        fail("T", f"horizon must be positive, got {cfg.T}")
    if cfg.dt is not None and cfg.dt <= 0:
        fail("dt", f"timestep must be positive, got {cfg.dt}")
    if cfg.cadence < 1:
        fail("cadence", f"cadence must be a positive integer, got {cfg.cadence}")
    if cfg.nu < 0:
        fail("nu", f"viscosity must be nonnegative, got {cfg.nu}")
    if cfg.mode not in MODES:
        fail("mode", f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.driver not in DRIVERS:
        fail("driver", f"driver must be one of {DRIVERS}, got {cfg.driver!r}")
    if not (0 < cfg.c_cfl <= 1):
        fail("c_cfl", f"CFL constant must lie in (0, 1], got {cfg.c_cfl}")
    if cfg.amplitude < 0:
        fail("amplitude", f"amplitude must be nonnegative, got {cfg.amplitude}")
    if cfg.charge_amplitude < 0:
        fail("charge_amplitude",
             f"charge amplitude must be nonnegative, got {cfg.charge_amplitude}")
    if cfg.lifespan_c <= 0:
        fail("lifespan_c", f"must be positive, got {cfg.lifespan_c}")
    if cfg.lifespan_r < 4:
        fail("lifespan_r", f"must be at least 4, got {cfg.lifespan_r}")
    if cfg.m_max < 1:
        fail("m_max", f"must be a positive integer, got {cfg.m_max}")
    if cfg.tol <= 0:
        fail("tol", f"must be positive, got {cfg.tol}")
    if cfg.workers < 1:
        fail("workers", f"must be a positive integer, got {cfg.workers}")
    if cfg.mode == "invlimit" or cfg.nu_list:
        if len(cfg.nu_list) < 3:
            fail("nu_list", "need at least three viscosities")
        if any(v <= 0 for v in cfg.nu_list):
            fail("nu_list", "viscosities must be positive")
        if any(b >= a for a, b in zip(cfg.nu_list, cfg.nu_list[1:])):
            fail("nu_list", "viscosities must be strictly decreasing")
