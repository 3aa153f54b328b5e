"""Command-line entry point: ``kgpoint {solitary,simulate,preset,analyze,sweep}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import apply_override, config_from_dict, load_config_dict, parse_value
from .evolution import BlowUpError, ConfigError
from .experiments import PRESET_NAMES, run_preset, simulate, sweep, write_sweep
from .io import read_csv, write_csv
from .model import PotentialSpec, validate_wellposedness
from .solitary import SolitaryWave, kappa_of_omega, manifold_table, solitary_energy
from .spectral import bound_dispersive_split, spectral_concentration, windowed_spectrum

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

log = logging.getLogger("kgpoint")


def _coeffs(text: str) -> tuple[float, ...]:
    text = text.strip()
    if text.startswith("["):
        vals = json.loads(text)
    else:
        vals = [v for v in text.split(",") if v.strip()]
    try:
        return tuple(float(v) for v in vals)
    except (TypeError, ValueError):
        raise ConfigError("coeffs", f"cannot parse {text!r} as a list of numbers") from None


def cmd_solitary(args) -> int:
    try:
        p = PotentialSpec(_coeffs(args.coeffs))
    except ValueError as exc:
        raise ConfigError("coeffs", str(exc)) from None
    m = args.m
    if not m > 0:
        raise ConfigError("m", "mass must be positive")
    wp = validate_wellposedness(p, m)
    if not wp.ok:
        raise ConfigError("coeffs", f"well-posedness fails: {wp.reason}")
    n = args.omega_samples
    if n < 1:
        raise ConfigError("omega-samples", "must be a positive integer")
    omegas = -m + (np.arange(n) + 0.5) * (2 * m / n)
    rows = []
    for branch in manifold_table(p, m, omegas):
        for w, c in zip(branch.omegas, branch.amplitudes):
            wave = SolitaryWave(float(w), kappa_of_omega(w, m), float(c))
            rows.append((wave.omega, wave.kappa, wave.c, solitary_energy(wave, p, m)))
    out = args.out or sys.stdout
    if out is sys.stdout:
        print("omega,kappa,c,energy")
        for r in rows:
            print(",".join(repr(float(v)) for v in r))
    else:
        write_csv(out, ["omega", "kappa", "c", "energy"], rows)
    return 0


def cmd_simulate(args) -> int:
    raw = load_config_dict(Path(args.config).read_text())
    manifest = simulate(config_from_dict(raw), args.out)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def _overrides(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(item, "overrides are written key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_value(v.strip())
    return out


def cmd_preset(args) -> int:
    manifest = run_preset(args.name, args.out, _overrides(args.set))
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def cmd_analyze(args) -> int:
    cols = read_csv(args.trace)
    t = cols["t"]
    y = cols["psi0_re"] + 1j * cols["psi0_im"]
    h = float(t[1] - t[0])
    out = Path(args.out) if args.out else Path(args.trace).parent
    out.mkdir(parents=True, exist_ok=True)
    window = tuple(args.window) if args.window else (float(t[0]), float(t[-1]) + h)
    sp = windowed_spectrum(y, h, window, float(t[0]))
    write_csv(out / "analysis_spectrum.csv", ["omega", "magnitude"], zip(sp.frequencies, sp.magnitudes))
    bound, disp = bound_dispersive_split(y, h, args.m, args.margin)
    write_csv(
        out / "analysis_split.csv",
        ["t", "psi0_re", "psi0_im", "psi0_bound_re", "psi0_bound_im", "psi0_dispersive_re", "psi0_dispersive_im"],
        zip(t, y.real, y.imag, bound.real, bound.imag, disp.real, disp.imag),
    )
    w0, width = spectral_concentration(sp)
    write_csv(
        out / "analysis_concentration.csv",
        ["t_start", "t_end", "dominant_omega", "width"],
        [(sp.t_start, sp.t_end, w0, width)],
    )
    print(f"dominant omega {w0:.6g}, width {width:.6g}")
    return 0


def cmd_sweep(args) -> int:
    raw = load_config_dict(Path(args.config).read_text())
    config_from_dict(raw)  # fail fast on a bad base config
    values = [parse_value(v.strip()) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("values", "no values given")
    apply_override(raw, args.axis, values[0])
    rows = sweep(raw, args.axis, values, args.jobs)
    path = write_sweep(args.out, rows)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kgpoint", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solitary", help="emit the solitary manifold table as CSV")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--coeffs", required=True, help="u0,u1,...,uN or a JSON list")
    s.add_argument("--omega-samples", type=int, default=64)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_solitary)

    s = sub.add_parser("simulate", help="run a TOML config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("preset", help="run a named preset experiment")
    s.add_argument("--name", required=True, choices=PRESET_NAMES)
    s.add_argument("--out", required=True)
    s.add_argument("--set", action="append", metavar="KEY=VALUE")
    s.set_defaults(func=cmd_preset)

    s = sub.add_parser("analyze", help="spectrum, split and concentration of a trace CSV")
    s.add_argument("--trace", required=True)
    s.add_argument("--window", type=float, nargs=2, metavar=("T_START", "T_END"))
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--margin", type=float, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="run a parameter sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--axis", required=True, help="dotted key, e.g. initial.amplitude")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", default="sweep.csv")
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUpError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
