"""Observed order of the solver against an exact solitary wave, over a dx ladder.

The grid spacing and time step are halved together (dt = 0.9 dx), and the
error is the full energy norm of Psi(T) - e^{-i omega T} Phi relative to Phi.
"""
import argparse
import math

import numpy as np

from kgpoint.diagnostics import full_norm
from kgpoint.evolution import SimConfig, Solitary, run
from kgpoint.model import FieldState, Grid, PotentialSpec
from kgpoint.solitary import SolitaryWave, amplitudes_for_omega, sample_profile


def error_at(wave, p, L, n, T):
    g = Grid(L, n)
    rec = run(SimConfig(1.0, p, g, T, Solitary(wave), record_stride=10**9))
    fin = rec.final
    ex = sample_profile(wave, g)
    z = np.exp(-1j * wave.omega * fin.t)
    return full_norm(FieldState(fin.psi - z * ex.psi, fin.pi - z * ex.pi), g) / full_norm(ex, g)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coeffs", default="0,-0.5,0.25")
    ap.add_argument("--kappa", type=float, default=0.25)
    ap.add_argument("--L", type=float, default=100.0)
    ap.add_argument("--T", type=float, default=20.0)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--n0", type=int, default=2501)
    args = ap.parse_args()

    p = PotentialSpec(tuple(float(c) for c in args.coeffs.split(",")))
    omega = math.sqrt(1 - args.kappa**2)
    cs = amplitudes_for_omega(omega, p, 1.0)
    if len(cs) == 0:
        raise SystemExit(f"no solitary amplitude at kappa = {args.kappa}")
    wave = SolitaryWave.from_omega(omega, float(cs[0]), 1.0)
    print(f"omega = {omega:.6f}, c = {wave.c:.6f}")

    prev = None
    n = args.n0
    for _ in range(args.levels):
        err = error_at(wave, p, args.L, n, args.T)
        dx = 2 * args.L / (n - 1)
        order = "" if prev is None else f"{math.log2(prev / err):6.3f}"
        print(f"dx = {dx:.5f}  err = {err:.4e}  {order}")
        prev = err
        n = 2 * (n - 1) + 1


if __name__ == "__main__":
    main()
