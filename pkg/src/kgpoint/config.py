"""TOML experiment configs.

Sections and keys (defaults in brackets)::

    [model]   m, coeffs
    [grid]    L, num_points
    [time]    T, dt [0.9 dx], guard [1e6]
    [initial] type [gaussian] plus per-type keys:
              gaussian: amplitude [1.0] (number or [re, im]), width [1.0],
                        center [0.0], k [0.0], omega [0.0]
              solitary: omega, c [smallest admissible amplitude], theta [0.0]
              superposition: parts (array of initial tables)
              samples: path (snapshot file)
    [sponge]  enabled [true], width [0.2 L], strength [1.0]
    [record]  stride [1], R [5.0], dist_stride [1]
"""
from __future__ import annotations

import copy
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .evolution import (
    ConfigError,
    Gaussian,
    Samples,
    SimConfig,
    Solitary,
    Sponge,
    Superposition,
)
from .io import read_snapshot
from .model import Grid, PotentialSpec
from .solitary import SolitaryWave, amplitudes_for_omega, kappa_of_omega

SCHEMA = {
    "model": {"m", "coeffs"},
    "grid": {"L", "num_points"},
    "time": {"T", "dt", "guard"},
    "initial": None,  # validated per type
    "sponge": {"enabled", "width", "strength"},
    "record": {"stride", "R", "dist_stride"},
}
REQUIRED = [("model", "m"), ("model", "coeffs"), ("grid", "L"), ("grid", "num_points"), ("time", "T")]
INITIAL_KEYS = {
    "gaussian": {"amplitude", "width", "center", "k", "omega"},
    "solitary": {"omega", "c", "theta"},
    "superposition": {"parts"},
    "samples": {"path"},
}


def load_config_dict(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<text>", f"TOML syntax error: {exc}") from None


def _number(value, key, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _complex(value, key):
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(key, "complex values are given as [re, im]")
        return complex(_number(value[0], key), _number(value[1], key))
    return complex(_number(value, key))


def _initial(d: dict, key: str, m: float, potential: PotentialSpec):
    d = dict(d)
    kind = d.pop("type", "gaussian")
    if kind not in INITIAL_KEYS:
        raise ConfigError(f"{key}.type", f"unknown initial type {kind!r}; expected one of {sorted(INITIAL_KEYS)}")
    for k in d:
        if k not in INITIAL_KEYS[kind]:
            raise ConfigError(f"{key}.{k}", f"unknown key for initial type {kind!r}")
    if kind == "gaussian":
        return Gaussian(
            amplitude=_complex(d.get("amplitude", 1.0), f"{key}.amplitude"),
            width=_number(d.get("width", 1.0), f"{key}.width"),
            center=_number(d.get("center", 0.0), f"{key}.center"),
            k=_number(d.get("k", 0.0), f"{key}.k"),
            omega=_number(d.get("omega", 0.0), f"{key}.omega"),
        )
    if kind == "solitary":
        if "omega" not in d:
            raise ConfigError(f"{key}.omega", "missing required key")
        omega = _number(d["omega"], f"{key}.omega")
        if not abs(omega) < m:
            raise ConfigError(f"{key}.omega", f"need |omega| < m = {m:g}")
        if "c" in d:
            c = _number(d["c"], f"{key}.c")
        else:
            cs = amplitudes_for_omega(omega, potential, m)
            if len(cs) == 0:
                raise ConfigError(f"{key}.c", f"no solitary amplitude exists at omega = {omega:g}; give c explicitly")
            c = float(cs[0])
        theta = _number(d.get("theta", 0.0), f"{key}.theta")
        return Solitary(SolitaryWave(omega, kappa_of_omega(omega, m), c, theta % (2 * math.pi)))
    if kind == "superposition":
        parts = d.get("parts")
        if not isinstance(parts, list) or not parts:
            raise ConfigError(f"{key}.parts", "expected a non-empty array of tables")
        return Superposition(tuple(_initial(p, f"{key}.parts[{i}]", m, potential) for i, p in enumerate(parts)))
    if "path" not in d:
        raise ConfigError(f"{key}.path", "missing required key")
    try:
        state, _, _ = read_snapshot(d["path"])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"{key}.path", str(exc)) from None
    return Samples(state)


def config_from_dict(raw: dict) -> SimConfig:
    """Validate a nested config dict and build a SimConfig."""
    for section, value in raw.items():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        if not isinstance(value, dict):
            raise ConfigError(section, "expected a table")
        allowed = SCHEMA[section]
        if allowed is not None:
            for k in value:
                if k not in allowed:
                    raise ConfigError(f"{section}.{k}", "unknown key")
    for section, k in REQUIRED:
        if k not in raw.get(section, {}):
            raise ConfigError(f"{section}.{k}", "missing required key")

    model, grid_d, time_d = raw["model"], raw["grid"], raw["time"]
    m = _number(model["m"], "model.m")
    coeffs = model["coeffs"]
    if not isinstance(coeffs, list):
        raise ConfigError("model.coeffs", "expected a list of numbers")
    try:
        potential = PotentialSpec(tuple(_number(c, "model.coeffs") for c in coeffs))
    except ValueError as exc:
        raise ConfigError("model.coeffs", str(exc)) from None
    num_points = _number(grid_d["num_points"], "grid.num_points", int)
    L = _number(grid_d["L"], "grid.L")
    try:
        grid = Grid(L, num_points)
    except ValueError as exc:
        key = "grid.num_points" if "num_points" in str(exc) else "grid.L"
        raise ConfigError(key, str(exc)) from None
    if not m > 0:
        raise ConfigError("model.m", "mass must be positive")

    sp = raw.get("sponge", {})
    sponge = None
    if sp.get("enabled", True):
        sponge = Sponge(
            width=_number(sp.get("width", 0.2 * L), "sponge.width"),
            strength=_number(sp.get("strength", 1.0), "sponge.strength"),
        )
    rec = raw.get("record", {})
    cfg = SimConfig(
        m=m,
        potential=potential,
        grid=grid,
        T=_number(time_d["T"], "time.T"),
        initial=_initial(raw.get("initial", {}), "initial", m, potential),
        dt=_number(time_d["dt"], "time.dt") if "dt" in time_d else None,
        sponge=sponge,
        record_stride=_number(rec.get("stride", 1), "record.stride", int),
        R=_number(rec.get("R", 5.0), "record.R"),
        guard=_number(time_d.get("guard", 1e6), "time.guard"),
        dist_stride=_number(rec.get("dist_stride", 1), "record.dist_stride", int),
    )
    cfg.validate()
    return cfg


def parse_config(text: str) -> SimConfig:
    return config_from_dict(load_config_dict(text))


def _initial_to_dict(init) -> dict:
    if isinstance(init, Gaussian):
        a = complex(init.amplitude)
        return {
            "type": "gaussian",
            "amplitude": [a.real, a.imag],
            "width": init.width,
            "center": init.center,
            "k": init.k,
            "omega": init.omega,
        }
    if isinstance(init, Solitary):
        w = init.wave
        return {"type": "solitary", "omega": w.omega, "c": w.c, "theta": w.theta}
    if isinstance(init, Superposition):
        return {"type": "superposition", "parts": [_initial_to_dict(p) for p in init.parts]}
    return {"type": "samples", "num_points": len(init.state.psi)}


def config_to_dict(cfg: SimConfig) -> dict:
    """Fully resolved config, defaults filled in, for echoing into outputs."""
    out = {
        "model": {"m": cfg.m, "coeffs": list(cfg.potential.coeffs)},
        "grid": {"L": cfg.grid.half_length, "num_points": cfg.grid.num_points, "dx": cfg.grid.dx},
        "time": {"T": cfg.T, "dt": cfg.dt, "guard": cfg.guard, "num_steps": cfg.num_steps},
        "initial": _initial_to_dict(cfg.initial),
        "sponge": {"enabled": cfg.sponge is not None},
        "record": {"stride": cfg.record_stride, "R": cfg.R, "dist_stride": cfg.dist_stride},
    }
    if cfg.sponge is not None:
        out["sponge"].update(width=cfg.sponge.width, strength=cfg.sponge.strength)
    return out


def parse_value(text: str):
    """Interpret an override value with TOML literal rules; bare words stay strings."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_override(raw: dict, key: str, value) -> dict:
    """Return a copy of ``raw`` with the dotted ``key`` set to ``value``."""
    out = copy.deepcopy(raw)
    parts = key.split(".")
    if len(parts) < 2 or parts[0] not in SCHEMA:
        raise ConfigError(key, "override keys look like section.key")
    node = out
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(key, "cannot descend into a non-table value")
    node[parts[-1]] = value
    return out
