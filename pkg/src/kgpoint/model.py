"""Potential/force pair, grid and field-state types, and the discrete energy.

The oscillator potential is a polynomial in |psi|^2,

    U(psi) = sum_n u_n |psi|^(2n),

and the force is its negative gradient with respect to (Re psi, Im psi),
F(psi) = -2 u'(|psi|^2) psi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class PotentialSpec:
    """Coefficients (u_0, ..., u_N) of U(s) = sum u_n s^n, s = |psi|^2."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) < 2:
            raise ValueError("potential needs at least (u0, u1); N >= 1")
        if not all(np.isfinite(coeffs)):
            raise ValueError("potential coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        """Effective N: index of the last nonzero coefficient, at least 1."""
        n = len(self.coeffs) - 1
        while n > 1 and self.coeffs[n] == 0.0:
            n -= 1
        return n

    @property
    def leading(self) -> float:
        return self.coeffs[self.degree]

    def derivative_coeffs(self) -> np.ndarray:
        """Coefficients of u'(s) in ascending powers of s."""
        u = np.asarray(self.coeffs[: self.degree + 1])
        return u[1:] * np.arange(1, len(u))


def _horner(coeffs, s):
    acc = np.zeros_like(s, dtype=float) if isinstance(s, np.ndarray) else 0.0
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def eval_potential(p: PotentialSpec, s):
    """U at |psi|^2 = s. Accepts scalars or arrays."""
    return _horner(p.coeffs, s)


def eval_force(p: PotentialSpec, psi0):
    """F(psi) = -2 u'(|psi|^2) psi, equivariant under psi -> e^{i theta} psi."""
    s = np.abs(psi0) ** 2
    return -2.0 * _horner(p.derivative_coeffs(), s) * psi0


@dataclass(frozen=True)
class WellPosedness:
    """Outcome of the lower-bound check U(s) >= A - B s with B < m."""

    ok: bool
    A: float | None = None
    B: float | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate_wellposedness(p: PotentialSpec, m: float) -> WellPosedness:
    """Check that U(s) >= A - B s for all s >= 0 with some B < m.

    Returns explicit constants. N = 1: A = u0, B = max(-u1, 0), ok iff u1 > -m.
    N >= 2 with u_N > 0: B = 0 and A is the minimum of U over s >= 0, found
    among s = 0 and the positive real critical points of U.
    """
    if m <= 0:
        raise ValueError("mass m must be positive")
    n = p.degree
    u = p.coeffs
    if n == 1:
        if u[1] > -m:
            return WellPosedness(True, A=u[0], B=max(-u[1], 0.0))
        return WellPosedness(
            False, reason=f"linear potential: B = -u1 = {-u[1]:g} violates B < m = {m:g}"
        )
    if u[n] > 0:
        crit = np.polynomial.polynomial.polyroots(p.derivative_coeffs())
        cand = [0.0] + [r.real for r in np.atleast_1d(crit) if abs(r.imag) < 1e-12 and r.real > 0]
        A = min(float(eval_potential(p, s)) for s in cand)
        return WellPosedness(True, A=A, B=0.0)
    return WellPosedness(
        False,
        reason=f"leading coefficient u_{n} = {u[n]:g} <= 0: U is unbounded below faster than any A - B s",
    )


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L] with an odd number of nodes; x = 0 is a node."""

    half_length: float
    num_points: int

    def __post_init__(self):
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")
        if int(self.num_points) != self.num_points or self.num_points < 3:
            raise ValueError("num_points must be an integer >= 3")
        if self.num_points % 2 == 0:
            raise ValueError("num_points must be odd so that x = 0 is a grid node")
        object.__setattr__(self, "num_points", int(self.num_points))
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / (self.num_points - 1)

    @property
    def origin_index(self) -> int:
        return (self.num_points - 1) // 2

    @cached_property
    def x(self) -> np.ndarray:
        # offsets from the origin keep x[origin] == 0.0 and exact symmetry
        j = np.arange(self.num_points) - self.origin_index
        x = j * self.dx
        x.flags.writeable = False
        return x

    def window(self, R: float) -> np.ndarray:
        """Boolean mask of nodes with |x| <= R."""
        return np.abs(self.x) <= R + 1e-9 * self.dx


@dataclass(frozen=True)
class FieldState:
    """Sampled pair (psi, pi) at time t. Arrays are copied and frozen."""

    psi: np.ndarray
    pi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        psi = np.array(self.psi, dtype=np.complex128)
        pi = np.array(self.pi, dtype=np.complex128)
        if psi.ndim != 1 or psi.shape != pi.shape:
            raise ValueError("psi and pi must be 1-D arrays of equal length")
        if psi[0] != 0 or psi[-1] != 0 or pi[0] != 0 or pi[-1] != 0:
            raise ValueError("Dirichlet endpoints violated: psi and pi must vanish at both ends")
        psi.flags.writeable = False
        pi.flags.writeable = False
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> "FieldState":
        z = np.zeros(grid.num_points, dtype=np.complex128)
        return cls(z, z, t)

    @classmethod
    def from_samples(cls, psi, pi, t: float = 0.0) -> "FieldState":
        """Build a state after forcing the Dirichlet endpoints to zero."""
        psi = np.array(psi, dtype=np.complex128)
        pi = np.array(pi, dtype=np.complex128)
        psi[[0, -1]] = 0
        pi[[0, -1]] = 0
        return cls(psi, pi, t)

    def rotated(self, theta: float) -> "FieldState":
        z = np.exp(1j * theta)
        return FieldState(z * self.psi, z * self.pi, self.t)

    def check_grid(self, grid: Grid):
        if len(self.psi) != grid.num_points:
            raise ValueError(
                f"state has {len(self.psi)} samples, grid has {grid.num_points}"
            )


def forward_diff(psi: np.ndarray, dx: float) -> np.ndarray:
    """(psi[j+1] - psi[j]) / dx, with psi beyond the right wall taken as 0."""
    d = np.empty_like(psi)
    d[:-1] = (psi[1:] - psi[:-1]) / dx
    d[-1] = -psi[-1] / dx
    return d


def free_energy(state: FieldState, m: float, grid: Grid) -> float:
    """0.5 * sum dx (|pi|^2 + |D psi|^2 + m^2 |psi|^2), no oscillator term."""
    dx = grid.dx
    d = forward_diff(state.psi, dx)
    return 0.5 * dx * float(
        np.vdot(state.pi, state.pi).real
        + np.vdot(d, d).real
        + m * m * np.vdot(state.psi, state.psi).real
    )


def energy(state: FieldState, p: PotentialSpec, m: float, grid: Grid) -> float:
    """Discrete Hamiltonian of the semi-discrete scheme.

    Forward differences for |psi'|^2, uniform dx weights, plus
    U(|psi(0)|^2) at the origin node. This is exactly the Hamiltonian
    generating :func:`kgpoint.evolution.discrete_rhs`.
    """
    state.check_grid(grid)
    s0 = abs(state.psi[grid.origin_index]) ** 2
    return free_energy(state, m, grid) + float(eval_potential(p, s0))
