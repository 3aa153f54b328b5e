"""Experiment orchestration: simulate with outputs, presets, parameter sweeps."""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import apply_override, config_from_dict, config_to_dict
from .diagnostics import SeminormSpec, dist_to_manifold, full_norm
from .evolution import SimConfig, Solitary, run
from .io import write_csv, write_snapshot
from .model import FieldState
from .solitary import sample_profile
from .spectral import band_mass_fraction, spectral_concentration, windowed_spectrum

PRESET_NAMES = ("attraction", "linear_counterexample", "linear_decay", "solitary_stability", "convergence_order")

OUTPUT_FILES = ("trace.csv", "distance.csv", "spectrum.csv", "final.kgd", "summary.json")

_QUARTIC = [0.0, -0.5, 0.25]

PRESETS = {
    "attraction": {
        "model": {"m": 1.0, "coeffs": _QUARTIC},
        "grid": {"L": 100.0, "num_points": 10001},
        "time": {"T": 200.0},
        # pi0 = -i omega psi0 gives the data nonzero charge; real data stays real
        "initial": {"type": "gaussian", "amplitude": 2.0, "width": 1.0, "omega": 0.8},
        "sponge": {"width": 20.0, "strength": 1.0},
        "record": {"stride": 10, "R": 5.0, "dist_stride": 1},
    },
    "linear_counterexample": {
        "model": {"m": 1.0, "coeffs": [0.0, -0.6]},
        "grid": {"L": 100.0, "num_points": 10001},
        "time": {"T": 200.0},
        "initial": {
            "type": "superposition",
            "parts": [
                {"type": "solitary", "omega": 0.8, "c": 1.0},
                {"type": "solitary", "omega": -0.8, "c": 1.0},
            ],
        },
        "sponge": {"width": 20.0, "strength": 1.0},
        "record": {"stride": 10, "R": 5.0, "dist_stride": 1},
    },
    "linear_decay": {
        "model": {"m": 1.0, "coeffs": [0.0, 0.5]},
        "grid": {"L": 100.0, "num_points": 10001},
        "time": {"T": 150.0},
        "initial": {"type": "gaussian", "amplitude": 1.0, "width": 1.0},
        "sponge": {"width": 20.0, "strength": 1.0},
        "record": {"stride": 10, "R": 5.0, "dist_stride": 5},
    },
    "solitary_stability": {
        "model": {"m": 1.0, "coeffs": _QUARTIC},
        "grid": {"L": 100.0, "num_points": 10001},
        "time": {"T": 50.0},
        "initial": {"type": "solitary", "omega": math.sqrt(1 - 0.25**2), "c": math.sqrt(0.5)},
        "sponge": {"enabled": False},
        "record": {"stride": 10, "R": 5.0, "dist_stride": 5},
    },
    "convergence_order": {
        "model": {"m": 1.0, "coeffs": [0.0, -0.6]},
        "grid": {"L": 100.0, "num_points": 10001},
        "time": {"T": 10.0},
        "initial": {"type": "solitary", "omega": 0.8, "c": 1.0},
        "sponge": {"enabled": False},
        "record": {"stride": 10, "R": 5.0, "dist_stride": 5},
    },
}


def preset_dict(name: str, overrides: dict | None = None) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
    raw = PRESETS[name]
    for key, value in (overrides or {}).items():
        raw = apply_override(raw, key, value)
    return raw


class DistanceRecorder:
    """Run hook computing the manifold distance every ``stride`` records."""

    def __init__(self, cfg: SimConfig, stride: int = 1):
        self.cfg = cfg
        self.stride = stride
        self.spec = SeminormSpec(cfg.R)
        self.rows = []
        self._count = 0

    def __call__(self, state: FieldState):
        k = self._count
        self._count += 1
        if k % self.stride:
            return
        cfg = self.cfg
        d = dist_to_manifold(state, cfg.potential, cfg.m, self.spec, cfg.grid)
        self.rows.append((state.t, d.dist, d.omega_star, d.theta_star, d.c_star))

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float).reshape(-1, 5)


def _window_mean(t, v, lo, hi):
    sel = (t >= lo - 1e-9) & (t <= hi + 1e-9)
    return float(np.mean(v[sel])) if np.any(sel) else float("nan")


def _spectrum_or_none(rec, window):
    try:
        return windowed_spectrum(rec.psi0, rec.sample_step, window, rec.times[0])
    except ValueError:
        return None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, files, complete: bool, error: str | None = None, extra: dict | None = None):
    manifest = {
        "complete": complete,
        "files": [{"name": p.name, "bytes": p.stat().st_size, "sha256": _sha256(p)} for p in files],
    }
    if error:
        manifest["error"] = error
    if extra:
        manifest.update(extra)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _execute(cfg: SimConfig, out: Path, files: list, hooks=()):
    out.mkdir(parents=True, exist_ok=True)
    dist = DistanceRecorder(cfg, cfg.dist_stride)
    rec = run(cfg, [dist, *hooks])
    files.append(
        write_csv(
            out / "trace.csv",
            ["t", "psi0_re", "psi0_im", "energy", "local_energy", "local_norm"],
            (
                (ti, z.real, z.imag, e, le, ln)
                for ti, z, e, le, ln in zip(rec.times, rec.psi0, rec.energy, rec.local_energy, rec.local_norm)
            ),
        )
    )
    d = dist.array()
    stride = cfg.dist_stride
    files.append(
        write_csv(
            out / "distance.csv",
            ["t", "dist", "omega_star", "theta_star", "c_star", "local_energy", "full_energy"],
            (tuple(row) + (rec.local_energy[i * stride], rec.energy[i * stride]) for i, row in enumerate(d)),
        )
    )
    T = cfg.T
    late = (0.5 * T, T + rec.sample_step)
    sp = _spectrum_or_none(rec, late)
    if sp is not None:
        files.append(write_csv(out / "spectrum.csv", ["omega", "magnitude"], zip(sp.frequencies, sp.magnitudes)))
    files.append(write_snapshot(out / "final.kgd", rec.final, cfg.m, cfg.grid))

    summary = {
        "config": config_to_dict(cfg),
        "energy_initial": rec.energy[0],
        "energy_drift": rec.energy_drift(),
        "dist_initial": float(d[0, 1]),
        "dist_final": float(d[-1, 1]),
        "omega_star_final": float(d[-1, 2]),
        "c_star_final": float(d[-1, 4]),
        "local_norm_initial": rec.local_norm[0],
        "local_norm_final": rec.local_norm[-1],
    }
    if sp is not None:
        w0, width = spectral_concentration(sp)
        band = 1.05 * cfg.m
        summary.update(
            late_window=[late[0], T],
            band_mass_late=band_mass_fraction(sp, (-band, band)),
            dominant_omega_late=w0,
            width_late_half=width,
        )
    return rec, d, summary


def _finish(out: Path, summary: dict, files: list, extra=None) -> dict:
    path = out / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    files.append(path)
    return _write_manifest(out, files, complete=True, extra=extra)


def simulate(cfg: SimConfig, out_dir) -> dict:
    """Run ``cfg`` and write trace, distance, spectrum, snapshot and summary files.

    Returns the manifest. On failure a manifest flagged incomplete is written
    before the exception propagates.
    """
    out = Path(out_dir)
    files = []
    try:
        rec, d, summary = _execute(cfg, out, files)
        return _finish(out, summary, files)
    except Exception as exc:
        out.mkdir(parents=True, exist_ok=True)
        _write_manifest(out, files, complete=False, error=f"{type(exc).__name__}: {exc}")
        raise


def _attraction_metrics(cfg, rec, d):
    T = cfg.T
    t, dist = d[:, 0], d[:, 1]
    early = _window_mean(t, dist, 0.0, 0.025 * T)
    final = _window_mean(t, dist, 0.9 * T, T)
    h, t0 = rec.sample_step, rec.times[0]
    sp_late = windowed_spectrum(rec.psi0, h, (0.5 * T, T + h), t0)
    _, w_early = spectral_concentration(windowed_spectrum(rec.psi0, h, (0.1 * T, 0.35 * T), t0))
    w0, w_late = spectral_concentration(windowed_spectrum(rec.psi0, h, (0.75 * T, T + h), t0))
    band = 1.05 * cfg.m
    return {
        "dist_mean_early": early,
        "dist_mean_final": final,
        "dist_ratio": final / early,
        "dist_final_over_initial": float(d[-1, 1] / d[0, 1]),
        "band_mass_late": band_mass_fraction(sp_late, (-band, band)),
        "width_early": w_early,
        "width_late": w_late,
        "dominant_omega_late": w0,
    }


def _counterexample_metrics(cfg, rec, d):
    sel = d[:, 0] >= 0.5 * cfg.T - 1e-9
    dmin = float(d[sel, 1].min())
    return {
        "dist_min_late": dmin,
        "dist_min_late_relative": dmin / rec.local_norm[0],
    }


def _decay_metrics(cfg, rec, d):
    return {"local_norm_sq_ratio": (rec.local_norm[-1] / rec.local_norm[0]) ** 2}


class RotatingReference:
    """Hook measuring ||Psi(t) - e^{-i omega t} Phi|| / ||Phi|| in the full norm."""

    def __init__(self, cfg: SimConfig):
        if not isinstance(cfg.initial, Solitary):
            raise ValueError("reference error needs solitary initial data")
        self.w = cfg.initial.wave
        self.grid = cfg.grid
        self.exact = sample_profile(self.w, cfg.grid)
        self.norm = full_norm(self.exact, cfg.grid)
        self.times = []
        self.errors = []

    def __call__(self, s: FieldState):
        z = np.exp(-1j * self.w.omega * s.t)
        diff = FieldState(s.psi - z * self.exact.psi, s.pi - z * self.exact.pi)
        self.times.append(s.t)
        self.errors.append(full_norm(diff, self.grid) / self.norm)


def refined(raw: dict) -> dict:
    """Same experiment with dx and dt halved and the record times kept."""
    n = raw["grid"]["num_points"]
    out = apply_override(raw, "grid.num_points", 2 * (n - 1) + 1)
    if "dt" in raw.get("time", {}):
        out["time"]["dt"] = raw["time"]["dt"] / 2
    rec = out.setdefault("record", {})
    rec["stride"] = 2 * rec.get("stride", 1)
    return out


def run_preset(name: str, out_dir, overrides: dict | None = None) -> dict:
    """Run a named preset, write its outputs, and return the manifest."""
    raw = preset_dict(name, overrides)
    cfg = config_from_dict(raw)
    out = Path(out_dir)
    files = []
    try:
        hooks = []
        ref = None
        if name in ("solitary_stability", "convergence_order"):
            ref = RotatingReference(cfg)
            hooks.append(ref)
        rec, d, summary = _execute(cfg, out, files, hooks)
        summary["preset"] = name
        if name == "attraction":
            summary.update(_attraction_metrics(cfg, rec, d))
        elif name == "linear_counterexample":
            summary.update(_counterexample_metrics(cfg, rec, d))
        elif name == "linear_decay":
            summary.update(_decay_metrics(cfg, rec, d))
        elif name == "solitary_stability":
            summary["max_relative_error"] = max(ref.errors)
        elif name == "convergence_order":
            fine_cfg = config_from_dict(refined(raw))
            fine_ref = RotatingReference(fine_cfg)
            run(fine_cfg, [fine_ref])
            summary.update(
                error_coarse=ref.errors[-1],
                error_fine=fine_ref.errors[-1],
                error_ratio=ref.errors[-1] / fine_ref.errors[-1],
            )
        return _finish(out, summary, files, extra={"preset": name})
    except Exception as exc:
        out.mkdir(parents=True, exist_ok=True)
        _write_manifest(out, files, complete=False, error=f"{type(exc).__name__}: {exc}", extra={"preset": name})
        raise


# --- sweeps -----------------------------------------------------------------

SWEEP_HEADER = ["value", "dist_final", "dominant_omega", "energy_drift", "error"]


def _sweep_one(args):
    raw, axis, value = args
    try:
        cfg = config_from_dict(apply_override(raw, axis, value))
        rec = run(cfg)
        d = dist_to_manifold(rec.final, cfg.potential, cfg.m, SeminormSpec(cfg.R), cfg.grid)
        try:
            w0, _ = spectral_concentration(
                windowed_spectrum(rec.psi0, rec.sample_step, (0.5 * cfg.T, cfg.T + rec.sample_step), rec.times[0])
            )
        except ValueError:
            w0 = float("nan")
        return (value, d.dist, w0, rec.energy_drift(), "")
    except Exception as exc:  # isolate sibling runs
        return (value, float("nan"), float("nan"), float("nan"), f"{type(exc).__name__}: {exc}")


def _sort_key(v):
    return (0, float(v), "") if isinstance(v, (int, float)) and not isinstance(v, bool) else (1, 0.0, str(v))


def sweep(raw: dict, axis: str, values, jobs: int = 1) -> list[tuple]:
    """Run one simulation per axis value; rows come back ordered by value."""
    if jobs < 1:
        raise ValueError("jobs must be a positive integer")
    apply_override(raw, axis, values[0] if values else 0)  # validates the key shape
    ordered = sorted(values, key=_sort_key)
    tasks = [(raw, axis, v) for v in ordered]
    if jobs == 1 or len(tasks) <= 1:
        return [_sweep_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_one, tasks))


def write_sweep(path, rows) -> Path:
    return write_csv(path, SWEEP_HEADER, rows)
