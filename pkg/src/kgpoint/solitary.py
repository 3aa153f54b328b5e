"""Solitary waves phi(x) e^{-i omega t} with phi(x) = c e^{i theta} e^{-kappa |x|}.

A profile is admissible when omega^2 + kappa^2 = m^2 and the coupling
identity 2 kappa c = F(c) holds. With F(c) = -2 u'(c^2) c, nonzero
amplitudes are the positive roots s = c^2 of

    P(s) = kappa + sum_{n>=1} n u_n s^(n-1).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import FieldState, Grid, PotentialSpec, eval_potential

BISECT_TOL = 1e-12


@dataclass(frozen=True)
class SolitaryWave:
    omega: float
    kappa: float
    c: float
    theta: float = 0.0

    @classmethod
    def from_omega(cls, omega: float, c: float, m: float, theta: float = 0.0) -> "SolitaryWave":
        return cls(float(omega), kappa_of_omega(omega, m), float(c), float(theta) % (2 * math.pi))

    def residual(self, p: PotentialSpec, m: float) -> tuple[float, float]:
        """(dispersion residual, coupling residual) for this wave."""
        disp = self.omega**2 + self.kappa**2 - m * m
        coup = self.c * float(np.polyval(coupling_poly(p, self.kappa)[::-1], self.c**2))
        return disp, coup


@dataclass(frozen=True)
class ManifoldBranch:
    """One continuous amplitude branch sampled at increasing omega."""

    omegas: np.ndarray
    amplitudes: np.ndarray

    @property
    def trivial(self) -> bool:
        return bool(np.all(self.amplitudes == 0))

    def __len__(self):
        return len(self.omegas)


@dataclass(frozen=True)
class LinearMode:
    """Bound state of the linear defect F(psi) = a psi.

    ``secular`` marks the t e^{-m|x|} partner at the degenerate point a = 2m.
    """

    omega: complex
    decay: float
    secular: bool = False

    def profile(self, x, t: float = 0.0):
        base = np.exp(-self.decay * np.abs(x))
        if self.secular:
            return t * base
        return base * np.exp(-1j * self.omega * t)


def kappa_of_omega(omega: float, m: float) -> float:
    if m <= 0:
        raise ValueError("mass m must be positive")
    if abs(omega) > m:
        raise ValueError(f"|omega| = {abs(omega):g} > m = {m:g}: no localized profile")
    return math.sqrt((m - omega) * (m + omega))


def coupling_poly(p: PotentialSpec, kappa: float) -> np.ndarray:
    """Ascending coefficients of P(s) = kappa + u'(s)."""
    q = p.derivative_coeffs().astype(float)
    q[0] += kappa
    return q


def root_bound(q: np.ndarray) -> float:
    """Cauchy bound 1 + max_k |q_k| / |q_lead| on the moduli of the roots."""
    return 1.0 + float(np.max(np.abs(q[:-1])) / abs(q[-1]))


def _trim(q: np.ndarray) -> np.ndarray:
    n = len(q)
    while n > 1 and q[n - 1] == 0:
        n -= 1
    return q[:n]


def _bisect(q, a, b, fa):
    while b - a > BISECT_TOL:
        mid = 0.5 * (a + b)
        fm = np.polyval(q[::-1], mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def real_roots(q, lo: float, hi: float) -> list[float]:
    """Real roots of the polynomial with ascending coefficients q in (lo, hi].

    Critical points are found recursively from the derivative, so the
    polynomial is monotone on each sub-interval and every sign change
    brackets exactly one root, refined by bisection. A critical point where
    the polynomial vanishes is reported as a (tangent) root.
    """
    q = _trim(np.asarray(q, dtype=float))
    if len(q) == 1:
        return []
    if len(q) == 2:
        r = -q[0] / q[1]
        return [r] if lo < r <= hi else []
    dq = q[1:] * np.arange(1, len(q))
    crit = real_roots(dq, lo, hi)
    knots = [lo] + [c for c in crit if lo < c < hi] + [hi]
    vals = [np.polyval(q[::-1], s) for s in knots]
    scale = np.max(np.abs(q)) * max(1.0, abs(hi)) ** (len(q) - 1)
    roots = []
    for i in range(len(knots) - 1):
        a, b, fa, fb = knots[i], knots[i + 1], vals[i], vals[i + 1]
        if fa == 0 and i == 0:
            continue  # root at lo is excluded
        if fb == 0 or (0 < i + 1 < len(knots) - 1 and abs(fb) < 1e-14 * scale):
            roots.append(b)
            continue
        if fa != 0 and (fa > 0) != (fb > 0) and not (roots and roots[-1] == a):
            roots.append(_bisect(q, a, b, fa))
    return sorted(set(roots))


def amplitudes_for_omega(omega: float, p: PotentialSpec, m: float) -> np.ndarray:
    """Sorted positive amplitudes c of nonzero solitary waves at frequency omega.

    Empty when none exist. In the linear case (N = 1) the coupling identity
    does not involve c; it is then either never satisfied (empty result) or
    satisfied by every c at kappa = -u1 (see :func:`linear_modes`), and the
    latter degenerate case also returns an empty array.
    """
    if abs(omega) >= m:
        raise ValueError(f"|omega| must be < m = {m:g}")
    kappa = kappa_of_omega(omega, m)
    q = _trim(coupling_poly(p, kappa))
    if len(q) == 1:
        return np.empty(0)
    s = [r for r in real_roots(q, 0.0, root_bound(q)) if r > 0]
    return np.sqrt(np.array(s, dtype=float))


def sample_profile(w: SolitaryWave, grid: Grid) -> FieldState:
    psi = w.c * np.exp(1j * w.theta) * np.exp(-w.kappa * np.abs(grid.x))
    return FieldState.from_samples(psi, -1j * w.omega * psi, 0.0)


def solitary_energy(w: SolitaryWave, p: PotentialSpec, m: float) -> float:
    """Continuum energy c^2 m^2 / kappa + U(c^2) of a solitary wave on R."""
    if w.c == 0:
        return float(eval_potential(p, 0.0))
    return w.c**2 * m * m / w.kappa + float(eval_potential(p, w.c**2))


def linear_modes(a: float, m: float) -> list[LinearMode]:
    """Localized modes of F(psi) = a psi, a > 0.

    a != 2m: the pair omega = +-sqrt(m^2 - a^2/4) with decay a/2 (imaginary
    omega when a > 2m). a = 2m: e^{-m|x|} and the secular t e^{-m|x|}.
    """
    if a <= 0:
        raise ValueError("a <= 0: the linear defect has no localized modes (S = {0})")
    if m <= 0:
        raise ValueError("mass m must be positive")
    if math.isclose(a, 2 * m, rel_tol=1e-12):
        return [LinearMode(0.0, m), LinearMode(0.0, m, secular=True)]
    w = cmath.sqrt(m * m - a * a / 4)
    if w.imag == 0:
        w = w.real
    return [LinearMode(w, a / 2), LinearMode(-w, a / 2)]


def manifold_table(p: PotentialSpec, m: float, omega_samples) -> list[ManifoldBranch]:
    """Group (omega, c) samples into continuous branches.

    Branches are continued in sorted amplitude order while the number of
    roots stays constant; any change in the root count (fold, birth or
    death of a branch) closes every open branch. The trivial branch c = 0
    spans all samples and comes first.
    """
    omegas = np.sort(np.asarray(omega_samples, dtype=float))
    if np.any(np.abs(omegas) >= m):
        raise ValueError("all omega samples must satisfy |omega| < m")
    branches = [ManifoldBranch(omegas.copy(), np.zeros_like(omegas))]
    open_ = []  # list of (omega list, amplitude list) per open branch
    prev = -1

    def close():
        for ws, cs in open_:
            branches.append(ManifoldBranch(np.array(ws), np.array(cs)))
        open_.clear()

    for w in omegas:
        cs = amplitudes_for_omega(w, p, m)
        if len(cs) != prev:
            close()
            open_.extend(([], []) for _ in cs)
            prev = len(cs)
        for (ws, amps), c in zip(open_, cs):
            ws.append(w)
            amps.append(c)
    close()
    return branches
