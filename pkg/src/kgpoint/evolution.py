"""Velocity-Verlet time stepping of the point-defect Klein-Gordon equation.

Semi-discretization on a uniform grid with the defect at the origin node:

    psi_tt[j] = (psi[j+1] - 2 psi[j] + psi[j-1]) / dx^2 - m^2 psi[j]
                + [j == origin] F(psi[origin]) / dx

with Dirichlet walls and an optional sponge that damps pi near the walls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .diagnostics import local_seminorm
from .model import (
    FieldState,
    Grid,
    PotentialSpec,
    energy,
    eval_force,
    eval_potential,
    forward_diff,
    validate_wellposedness,
)
from .solitary import SolitaryWave, sample_profile

CFL_LIMIT = 0.9
DEFAULT_GUARD = 1e6
SUPPORT_TOL = 1e-10


class ConfigError(ValueError):
    """Invalid simulation configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class BlowUpError(FloatingPointError):
    """max|psi| exceeded the guard or became non-finite."""


@dataclass(frozen=True)
class Sponge:
    width: float
    strength: float = 1.0


@dataclass(frozen=True)
class Gaussian:
    """psi = A exp(-((x - x0)/w)^2) e^{i k (x - x0)}, pi = -i omega psi."""

    amplitude: complex = 1.0
    width: float = 1.0
    center: float = 0.0
    k: float = 0.0
    omega: float = 0.0

    def materialize(self, grid: Grid, m: float) -> FieldState:
        y = grid.x - self.center
        psi = self.amplitude * np.exp(-((y / self.width) ** 2)) * np.exp(1j * self.k * y)
        return FieldState.from_samples(psi, -1j * self.omega * psi)


@dataclass(frozen=True)
class Solitary:
    wave: SolitaryWave

    def materialize(self, grid: Grid, m: float) -> FieldState:
        return sample_profile(self.wave, grid)


@dataclass(frozen=True)
class Superposition:
    parts: tuple

    def materialize(self, grid: Grid, m: float) -> FieldState:
        psi = np.zeros(grid.num_points, dtype=np.complex128)
        pi = np.zeros_like(psi)
        for part in self.parts:
            s = part.materialize(grid, m)
            psi += s.psi
            pi += s.pi
        return FieldState(psi, pi)


@dataclass(frozen=True)
class Samples:
    state: FieldState

    def materialize(self, grid: Grid, m: float) -> FieldState:
        self.state.check_grid(grid)
        return FieldState(self.state.psi, self.state.pi, 0.0)


InitialData = Union[Gaussian, Solitary, Superposition, Samples]


@dataclass
class SimConfig:
    m: float
    potential: PotentialSpec
    grid: Grid
    T: float
    initial: InitialData = field(default_factory=Gaussian)
    dt: float | None = None
    sponge: Sponge | None = None
    record_stride: int = 1
    R: float = 5.0
    guard: float = DEFAULT_GUARD
    snapshot_stride: int | None = None
    dist_stride: int = 1

    def __post_init__(self):
        if self.dt is None:
            self.dt = CFL_LIMIT * self.grid.dx

    @property
    def num_steps(self) -> int:
        """Smallest step count reaching T (final time lies in [T, T + dt))."""
        return max(1, math.ceil(self.T / self.dt - 1e-9))

    def validate(self):
        if not self.m > 0:
            raise ConfigError("model.m", "mass must be positive")
        wp = validate_wellposedness(self.potential, self.m)
        if not wp.ok:
            raise ConfigError("model.coeffs", f"well-posedness fails: {wp.reason}")
        if not self.dt > 0:
            raise ConfigError("time.dt", "time step must be positive")
        if self.dt > CFL_LIMIT * self.grid.dx * (1 + 1e-12):
            raise ConfigError(
                "time.dt", f"CFL violated: dt = {self.dt:g} > {CFL_LIMIT} dx = {CFL_LIMIT * self.grid.dx:g}"
            )
        if not self.T > 0:
            raise ConfigError("time.T", "horizon must be positive")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ConfigError("record.stride", "must be a positive integer")
        if int(self.dist_stride) != self.dist_stride or self.dist_stride < 1:
            raise ConfigError("record.dist_stride", "must be a positive integer")
        if not self.R > 0:
            raise ConfigError("record.R", "window half-width must be positive")
        if self.sponge is not None:
            L = self.grid.half_length
            if not 0 <= self.sponge.width < L / 2:
                raise ConfigError("sponge.width", f"must lie in [0, L/2) = [0, {L / 2:g})")
            if self.sponge.strength < 0:
                raise ConfigError("sponge.strength", "must be non-negative")
            if self.R >= L - self.sponge.width:
                raise ConfigError("record.R", "observation window overlaps the sponge layer")


@dataclass
class TraceRecord:
    """Quantities sampled every ``record_stride`` steps.

    ``local_energy`` is the energy functional restricted to |x| <= R and
    ``local_norm`` the seminorm ||Psi||_{E,R} on the same window.
    """

    times: list = field(default_factory=list)
    psi0: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    local_energy: list = field(default_factory=list)
    local_norm: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: FieldState | None = None

    @property
    def sample_step(self) -> float:
        return self.times[1] - self.times[0] if len(self.times) > 1 else float("nan")

    def energy_drift(self) -> float:
        e = np.asarray(self.energy)
        return float(np.max(np.abs(e - e[0])) / max(1.0, abs(e[0])))


def sponge_profile(grid: Grid, width: float, strength: float) -> np.ndarray:
    """Damping rate sigma(x) = strength * smoothstep(s)^2 inside the layer."""
    if width <= 0:
        return np.zeros(grid.num_points)
    L = grid.half_length
    s = np.clip((np.abs(grid.x) - (L - width)) / width, 0.0, 1.0)
    return strength * (3 * s**2 - 2 * s**3) ** 2


def support_radius(state: FieldState, grid: Grid, tol: float = SUPPORT_TOL) -> float:
    """Largest |x| where |psi| or |pi| exceeds tol times its maximum."""
    mag = np.maximum(np.abs(state.psi), np.abs(state.pi))
    top = mag.max()
    if top == 0:
        return 0.0
    return float(np.abs(grid.x[mag > tol * top]).max())


def local_energy(state: FieldState, p: PotentialSpec, m: float, grid: Grid, R: float) -> float:
    w = grid.window(R)
    dx = grid.dx
    d = forward_diff(state.psi, dx)[w]
    e = 0.5 * dx * float(
        np.sum(np.abs(state.pi[w]) ** 2) + np.sum(np.abs(d) ** 2) + m * m * np.sum(np.abs(state.psi[w]) ** 2)
    )
    if w[grid.origin_index]:
        e += float(eval_potential(p, abs(state.psi[grid.origin_index]) ** 2))
    return e


class _Stepper:
    """Preallocated buffers for repeated Verlet steps."""

    def __init__(self, cfg: SimConfig):
        g = cfg.grid
        self.dt = cfg.dt
        self.inv_dx2 = 1.0 / g.dx**2
        self.diag = 2.0 / g.dx**2 + cfg.m**2
        self.inv_dx = 1.0 / g.dx
        self.o = g.origin_index
        self.p = cfg.potential
        self.guard = cfg.guard
        self.damp = None
        if cfg.sponge is not None and cfg.sponge.width > 0 and cfg.sponge.strength > 0:
            self.damp = np.exp(-sponge_profile(g, cfg.sponge.width, cfg.sponge.strength) * cfg.dt)
        self.acc = np.zeros(g.num_points, dtype=np.complex128)

    def accel(self, psi, out):
        inner = out[1:-1]
        np.add(psi[2:], psi[:-2], out=inner)
        inner *= self.inv_dx2
        inner -= self.diag * psi[1:-1]
        out[0] = out[-1] = 0
        out[self.o] += eval_force(self.p, psi[self.o]) * self.inv_dx
        return out

    def prime(self, psi):
        self.accel(psi, self.acc)

    def advance(self, psi, pi):
        """One Verlet step in place; self.acc must hold a(psi) on entry."""
        h = 0.5 * self.dt
        pi += h * self.acc
        psi += self.dt * pi
        self.accel(psi, self.acc)
        pi += h * self.acc
        if self.damp is not None:
            pi *= self.damp

    def check(self, psi, t):
        top = np.max(np.abs(psi))
        if not np.isfinite(top) or top > self.guard:
            raise BlowUpError(f"max|psi| = {top:g} exceeds guard {self.guard:g} at t = {t:g}")


def discrete_rhs(state: FieldState, cfg: SimConfig) -> np.ndarray:
    """Acceleration psi_tt of the semi-discrete system at ``state``."""
    state.check_grid(cfg.grid)
    st = _Stepper(cfg)
    return st.accel(state.psi, np.empty_like(state.psi))


def step(state: FieldState, cfg: SimConfig) -> FieldState:
    """One velocity-Verlet step followed by sponge damping of pi."""
    state.check_grid(cfg.grid)
    st = _Stepper(cfg)
    psi = state.psi.copy()
    pi = state.pi.copy()
    st.prime(psi)
    st.advance(psi, pi)
    st.check(psi, state.t + cfg.dt)
    return FieldState(psi, pi, state.t + cfg.dt)


Hook = Callable[[FieldState], None]


def _reflection_budget(cfg: SimConfig, state0: FieldState):
    if cfg.sponge is not None and cfg.sponge.width > 0 and cfg.sponge.strength > 0:
        return
    a = support_radius(state0, cfg.grid)
    limit = 2 * cfg.grid.half_length - a - cfg.R
    if cfg.T > limit:
        raise ConfigError(
            "time.T",
            f"without a sponge T must satisfy T <= 2L - a - R = {limit:g} (a = {a:g}); got {cfg.T:g}",
        )


def run(cfg: SimConfig, hooks: Sequence[Hook] = (), state0: FieldState | None = None) -> TraceRecord:
    """Integrate to t = T, recording every ``record_stride`` steps.

    Hooks receive read-only snapshots at each record time. ``state0``
    overrides ``cfg.initial`` when given.
    """
    cfg.validate()
    g = cfg.grid
    if state0 is None:
        state0 = cfg.initial.materialize(g, cfg.m)
    state0.check_grid(g)
    _reflection_budget(cfg, state0)

    st = _Stepper(cfg)
    psi = state0.psi.copy()
    pi = state0.pi.copy()
    rec = TraceRecord()
    o = g.origin_index
    t0 = state0.t

    def record(k):
        snap = FieldState(psi, pi, t0 + k * cfg.dt)
        rec.times.append(snap.t)
        rec.psi0.append(complex(psi[o]))
        rec.energy.append(energy(snap, cfg.potential, cfg.m, g))
        rec.local_energy.append(local_energy(snap, cfg.potential, cfg.m, g, cfg.R))
        rec.local_norm.append(local_seminorm(snap, cfg.R, g))
        if cfg.snapshot_stride and (k // cfg.record_stride) % cfg.snapshot_stride == 0:
            rec.snapshots.append(snap)
        for hook in hooks:
            hook(snap)
        return snap

    st.prime(psi)
    record(0)
    n = cfg.num_steps
    for k in range(1, n + 1):
        st.advance(psi, pi)
        if k % cfg.record_stride == 0:
            st.check(psi, t0 + k * cfg.dt)
            record(k)
    st.check(psi, t0 + n * cfg.dt)
    rec.final = FieldState(psi, pi, t0 + n * cfg.dt)
    return rec
