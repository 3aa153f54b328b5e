"""Fraction of a wave packet's energy that the sponge layer sends back to the centre.

Sweeps the sponge strength for a rightward Gaussian packet on a free field and
reports max over late times of the energy in |x| <= R, relative to the initial
energy.
"""
import argparse
import math

import numpy as np

from kgpoint.evolution import Gaussian, SimConfig, Sponge, run
from kgpoint.model import Grid, PotentialSpec


def returned_fraction(k, strength, width, L, n, T, R, clear):
    g = Grid(L, n)
    packet = Gaussian(1.0, 5.0, 0.0, k, math.sqrt(1 + k * k))
    cfg = SimConfig(1.0, PotentialSpec((0.0, 0.0)), g, T, packet, sponge=Sponge(width, strength), R=R, record_stride=20)
    rec = run(cfg)
    t = np.array(rec.times)
    return float(np.max(np.array(rec.local_energy)[t >= clear]) / rec.energy[0])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=2.0)
    ap.add_argument("--width", type=float, default=20.0)
    ap.add_argument("--strengths", default="0.1,0.3,1,3,10")
    ap.add_argument("--L", type=float, default=100.0)
    ap.add_argument("--num-points", type=int, default=4001)
    ap.add_argument("--T", type=float, default=300.0)
    ap.add_argument("--R", type=float, default=5.0)
    ap.add_argument("--clear", type=float, default=40.0, help="time after which the packet has left |x| <= R")
    args = ap.parse_args()

    print(f"k = {args.k}, layer width {args.width}")
    for s in (float(v) for v in args.strengths.split(",")):
        f = returned_fraction(args.k, s, args.width, args.L, args.num_points, args.T, args.R, args.clear)
        print(f"strength {s:6.2f}  returned {f:.3e}")


if __name__ == "__main__":
    main()
