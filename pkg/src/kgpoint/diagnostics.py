"""Energy norm, local seminorms, and distance from a state to the solitary manifold.

All quadratures use forward differences for psi' and uniform dx weights.
The local versions keep nodes with |x| <= R; the forward difference attached
to the last node inside the window straddles the boundary and keeps full
weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import FieldState, Grid, PotentialSpec, forward_diff
from .solitary import SolitaryWave, amplitudes_for_omega, sample_profile

OMEGA_SAMPLES = 512
OMEGA_TOL = 1e-6
_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SeminormSpec:
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")


@dataclass(frozen=True)
class ManifoldDistance:
    dist: float
    omega_star: float
    theta_star: float
    c_star: float


def _parts(state: FieldState, grid: Grid, R: float | None):
    d = forward_diff(state.psi, grid.dx)
    if R is None:
        return d, state.psi, state.pi
    w = grid.window(R)
    return d[w], state.psi[w], state.pi[w]


def energy_inner(a: FieldState, b: FieldState, grid: Grid, R: float | None = None) -> complex:
    """<a, b>_{E,R}, conjugate-linear in a; R = None means the whole grid."""
    da, pa, qa = _parts(a, grid, R)
    db, pb, qb = _parts(b, grid, R)
    return grid.dx * (np.vdot(da, db) + np.vdot(pa, pb) + np.vdot(qa, qb))


def full_norm(state: FieldState, grid: Grid) -> float:
    return math.sqrt(max(energy_inner(state, state, grid).real, 0.0))


def local_seminorm(state: FieldState, s: SeminormSpec | float, grid: Grid) -> float:
    R = s.R if isinstance(s, SeminormSpec) else float(s)
    return math.sqrt(max(energy_inner(state, state, grid, R).real, 0.0))


def optimal_phase(state: FieldState, w: SolitaryWave, s: SeminormSpec, grid: Grid) -> float:
    """theta minimizing ||Psi - e^{i theta} Phi_w||_{E,R}; w.theta is ignored."""
    phi = sample_profile(SolitaryWave(w.omega, w.kappa, w.c, 0.0), grid)
    z = energy_inner(phi, state, grid, s.R)
    scale = local_seminorm(phi, s, grid) * local_seminorm(state, s, grid)
    if abs(z) <= 1e-14 * scale or z == 0:
        return 0.0
    return float(np.angle(z)) % (2 * math.pi)


class ManifoldProbe:
    """Candidate solitary profiles restricted to a window, for repeated distance queries.

    Profiles are stored per unit amplitude, e^{-kappa|x|} and its forward
    difference; the distance of Psi to the U(1) orbit of c Phi_omega is

        d^2 = ||Psi||^2 - 2 c |<phi, Psi>| + c^2 ||phi||^2,

    with <phi, Psi> = sum dx (D phi D psi + phi psi + i omega phi pi).
    """

    def __init__(self, p: PotentialSpec, m: float, grid: Grid, R: float, samples: int = OMEGA_SAMPLES):
        self.p, self.m, self.grid, self.R = p, m, grid, R
        self.win = grid.window(R)
        idx = np.flatnonzero(self.win)
        # window nodes plus the right neighbour used by the last forward difference
        ext = np.append(idx, idx[-1] + 1)
        n = grid.num_points
        self._wall = (ext == 0) | (ext >= n - 1)
        self.absx_ext = np.abs(grid.x[np.minimum(ext, n - 1)])

        step = 2 * m / samples
        self.omegas = -m + (np.arange(samples) + 0.5) * step
        cand_w, cand_c = [], []
        for om in self.omegas:
            for c in amplitudes_for_omega(om, p, m):
                cand_w.append(om)
                cand_c.append(c)
        self.cand_omega = np.array(cand_w)
        self.cand_c = np.array(cand_c)
        if len(cand_w):
            kap = np.sqrt((m - self.cand_omega) * (m + self.cand_omega))
            self.phi, self.dphi = self._profiles(kap)
            self.phi_sq = grid.dx * (
                np.sum(self.dphi**2, axis=1) + (1 + self.cand_omega**2) * np.sum(self.phi**2, axis=1)
            )
        # linear potential: at kappa = -u1 every amplitude is admissible
        self.free = []
        if p.degree == 1 and 0 < -p.coeffs[1] <= m:
            kap = -p.coeffs[1]
            om = math.sqrt((m - kap) * (m + kap))
            self.free = [om, -om] if om > 0 else [0.0]

    def _profiles(self, kappa):
        kappa = np.atleast_1d(kappa)
        ext = np.exp(-kappa[:, None] * self.absx_ext[None, :])
        ext[:, self._wall] = 0.0
        phi = ext[:, :-1]
        dphi = np.diff(ext, axis=1) / self.grid.dx
        return phi, dphi

    def _state_parts(self, state: FieldState):
        d, p, q = _parts(state, self.grid, self.R)
        nn = self.grid.dx * float(np.vdot(d, d).real + np.vdot(p, p).real + np.vdot(q, q).real)
        return d, p, q, nn

    def _inner(self, phi, dphi, omega, d, p, q):
        return self.grid.dx * (dphi @ d + phi @ p + 1j * omega * (phi @ q))

    def _single(self, omega, c, parts):
        d, p, q, nn = parts
        kap = math.sqrt(max((self.m - omega) * (self.m + omega), 0.0))
        phi, dphi = self._profiles(kap)
        z = self._inner(phi[0], dphi[0], omega, d, p, q)
        sq = self.grid.dx * (np.sum(dphi[0] ** 2) + (1 + omega**2) * np.sum(phi[0] ** 2))
        return nn - 2 * c * abs(z) + c * c * sq, z

    def _branch_amplitude(self, omega, c_ref):
        cs = amplitudes_for_omega(omega, self.p, self.m) if abs(omega) < self.m else np.empty(0)
        if len(cs) == 0:
            return None
        return float(cs[np.argmin(np.abs(cs - c_ref))])

    def distance(self, state: FieldState) -> ManifoldDistance:
        parts = self._state_parts(state)
        d, p, q, nn = parts
        best = (nn, 0.0, 0.0, 0.0, 0j)  # zero solution
        if len(self.cand_omega):
            z = self._inner(self.phi, self.dphi, self.cand_omega, d, p, q)
            d2 = nn - 2 * self.cand_c * np.abs(z) + self.cand_c**2 * self.phi_sq
            k = int(np.argmin(d2))
            if d2[k] < best[0]:
                best = self._refine(k, parts, d2[k], z[k])
        for om in self.free:
            kap = math.sqrt(max((self.m - om) * (self.m + om), 0.0))
            phi, dphi = self._profiles(kap)
            z = self._inner(phi[0], dphi[0], om, d, p, q)
            sq = self.grid.dx * (np.sum(dphi[0] ** 2) + (1 + om * om) * np.sum(phi[0] ** 2))
            c = abs(z) / sq
            d2 = nn - abs(z) ** 2 / sq
            if d2 < best[0]:
                best = (d2, om, c, 0.0, z)
        d2, om, c, _, z = best
        theta = float(np.angle(z)) % (2 * math.pi) if c > 0 and z != 0 else 0.0
        return ManifoldDistance(math.sqrt(max(d2, 0.0)), float(om), theta, float(c))

    def _refine(self, k, parts, d2k, zk):
        """Golden-section search in omega along the branch through candidate k."""
        om0, c0 = self.cand_omega[k], self.cand_c[k]
        h = 2 * self.m / len(self.omegas)
        lo = max(om0 - h, -self.m * (1 - 1e-12))
        hi = min(om0 + h, self.m * (1 - 1e-12))

        def f(om):
            c = self._branch_amplitude(om, c0)
            if c is None:
                return math.inf, c, 0j
            val, z = self._single(om, c, parts)
            return val, c, z

        a, b = lo, hi
        x1 = b - _GOLDEN * (b - a)
        x2 = a + _GOLDEN * (b - a)
        f1, f2 = f(x1), f(x2)
        while b - a > OMEGA_TOL:
            if f1[0] <= f2[0]:
                b, x2, f2 = x2, x1, f1
                x1 = b - _GOLDEN * (b - a)
                f1 = f(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + _GOLDEN * (b - a)
                f2 = f(x2)
        best = (d2k, om0, c0, 0.0, zk)
        for om, res in ((x1, f1), (x2, f2)):
            if res[0] < best[0]:
                best = (res[0], om, res[1], 0.0, res[2])
        return best


@lru_cache(maxsize=16)
def _probe(p: PotentialSpec, m: float, grid: Grid, R: float) -> ManifoldProbe:
    return ManifoldProbe(p, m, grid, R)


def dist_to_manifold(state: FieldState, p: PotentialSpec, m: float, s: SeminormSpec, grid: Grid) -> ManifoldDistance:
    """Distance in ||.||_{E,R} from ``state`` to the solitary manifold.

    Candidates: the zero solution, and c e^{i theta} Phi_omega for every
    amplitude on a 512-point omega grid in (-m, m), with theta chosen
    optimally in closed form. The best grid point is refined by golden
    section along its branch to 1e-6 in omega.
    """
    state.check_grid(grid)
    return _probe(p, float(m), grid, float(s.R)).distance(state)
