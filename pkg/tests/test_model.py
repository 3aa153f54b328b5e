import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgpoint.model import (
    FieldState,
    Grid,
    PotentialSpec,
    energy,
    eval_force,
    eval_potential,
    free_energy,
    validate_wellposedness,
)
from kgpoint.solitary import SolitaryWave, sample_profile


def power_sum(coeffs, s):
    return sum(c * s**n for n, c in enumerate(coeffs))


def fd_gradient_force(p, psi, h=1e-5):
    """-(dU/dRe, dU/dIm) by central differences, returned as a complex number."""
    U = lambda z: power_sum(p.coeffs, abs(z) ** 2)
    gr = (U(psi + h) - U(psi - h)) / (2 * h)
    gi = (U(psi + 1j * h) - U(psi - 1j * h)) / (2 * h)
    return -(gr + 1j * gi)


coeff_lists = st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=5)
small_complex = st.builds(
    lambda r, a: r * complex(math.cos(a), math.sin(a)), st.floats(0, 2), st.floats(0, 2 * math.pi)
)


class TestPotential:
    def test_zero_potential(self):
        assert eval_potential(PotentialSpec((0, 0)), 3.7) == 0

    def test_quartic_value(self):
        p = PotentialSpec((0, -0.5, 0.25))
        assert eval_potential(p, 0.5) == pytest.approx(-0.1875, abs=1e-15)
        assert eval_potential(p, 0.5) == pytest.approx(power_sum(p.coeffs, 0.5), abs=1e-15)

    def test_constant_term(self):
        assert eval_potential(PotentialSpec((1, 0)), 0.0) == 1

    def test_needs_first_order_term(self):
        with pytest.raises(ValueError):
            PotentialSpec((1.0,))

    def test_degree_ignores_trailing_zeros(self):
        assert PotentialSpec((0, -0.5, 0.0, 0.0)).degree == 1
        assert PotentialSpec((0, 0)).degree == 1

    @given(coeff_lists, st.floats(0, 4))
    def test_horner_matches_power_sum(self, coeffs, s):
        p = PotentialSpec(tuple(coeffs))
        assert eval_potential(p, s) == pytest.approx(power_sum(coeffs, s), rel=1e-12, abs=1e-12)


class TestForce:
    def test_force_at_zero(self):
        assert eval_force(PotentialSpec((0.3, -1, 2)), 0j) == 0

    def test_linear_case(self):
        p = PotentialSpec((0, -0.6))
        assert eval_force(p, 1.0 + 0j) == pytest.approx(1.2)
        assert eval_force(p, 1.0 + 0j) == pytest.approx(fd_gradient_force(p, 1.0 + 0j), rel=1e-8)

    def test_cubic_force(self):
        p = PotentialSpec((0, 0, 1))
        assert eval_force(p, 1.0 + 0j) == pytest.approx(-4)
        assert eval_force(p, 1.0 + 0j) == pytest.approx(fd_gradient_force(p, 1.0 + 0j), rel=1e-8)

    def test_u1_equivariance_100_samples(self):
        rng = np.random.default_rng(11)
        p = PotentialSpec((0.2, -0.5, 0.25, 0.1))
        for _ in range(100):
            theta = rng.uniform(0, 2 * np.pi)
            psi = complex(*rng.normal(size=2))
            z = np.exp(1j * theta)
            assert abs(eval_force(p, z * psi) - z * eval_force(p, psi)) < 1e-12

    @settings(max_examples=200)
    @given(coeff_lists, small_complex)
    def test_gradient_consistency(self, coeffs, psi):
        p = PotentialSpec(tuple(coeffs))
        f = eval_force(p, psi)
        ref = fd_gradient_force(p, psi)
        scale = max(abs(ref), 1.0)
        assert abs(f - ref) / scale < 1e-6


class TestWellPosedness:
    def test_quartic_ok(self):
        v = validate_wellposedness(PotentialSpec((0, -0.5, 0.25)), 1.0)
        assert v.ok
        assert v.B == 0
        assert v.A == pytest.approx(-0.25)  # min at s = 1

    def test_linear_ok(self):
        v = validate_wellposedness(PotentialSpec((0, -0.6)), 1.0)
        assert v.ok and v.B == pytest.approx(0.6) and v.A == 0

    def test_linear_violated(self):
        v = validate_wellposedness(PotentialSpec((0, -1.5)), 1.0)
        assert not v.ok
        assert "B < m" in v.reason

    def test_negative_leading_violated(self):
        v = validate_wellposedness(PotentialSpec((0, 1, -0.1)), 1.0)
        assert not v.ok
        assert "u_2" in v.reason

    def test_repulsive_linear_has_zero_B(self):
        v = validate_wellposedness(PotentialSpec((0.5, 0.5)), 1.0)
        assert v.ok and v.B == 0 and v.A == 0.5

    @given(coeff_lists.filter(lambda c: c[-1] > 0.05 and len(c) >= 3))
    def test_A_is_a_lower_bound(self, coeffs):
        p = PotentialSpec(tuple(coeffs))
        v = validate_wellposedness(p, 1.0)
        assert v.ok
        s = np.linspace(0, 50, 20001)
        assert np.min(power_sum(coeffs, s)) >= v.A - 1e-9


GRID = Grid(20.0, 401)


def random_state(rng, grid, scale=1.0):
    n = grid.num_points
    x = grid.x
    env = np.exp(-(x / 6) ** 2)
    psi = scale * env * (rng.normal(size=n) + 1j * rng.normal(size=n))
    pi = scale * env * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return FieldState.from_samples(psi, pi)


class TestGridAndState:
    def test_origin_is_exact_zero(self):
        for n in (3, 11, 10001):
            g = Grid(100.0, n)
            assert g.x[g.origin_index] == 0.0
            assert g.x[0] == pytest.approx(-100.0)
            assert np.array_equal(g.x, -g.x[::-1])

    def test_even_points_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            Grid(10.0, 100)

    def test_dirichlet_enforced(self):
        with pytest.raises(ValueError, match="Dirichlet"):
            FieldState(np.ones(5), np.zeros(5))

    def test_state_is_frozen(self):
        s = FieldState.zeros(GRID)
        with pytest.raises(ValueError):
            s.psi[3] = 1.0


class TestEnergy:
    def test_zero_state(self):
        assert energy(FieldState.zeros(GRID), PotentialSpec((0, 1, 1)), 1.0, GRID) == 0

    def test_solitary_energy_analytic(self):
        g = Grid(100.0, 10001)
        k = 0.25
        w = SolitaryWave(math.sqrt(1 - k * k), k, math.sqrt(0.5))
        e = energy(sample_profile(w, g), PotentialSpec((0, -0.5, 0.25)), 1.0, g)
        # c^2 m^2 / kappa + U(c^2) = 2 - 0.1875
        assert e == pytest.approx(1.8125, abs=5 * g.dx**2)

    def test_solitary_energy_fine_quadrature_oracle(self):
        from scipy.integrate import quad

        k, c2, m = 0.25, 0.5, 1.0
        om2 = m * m - k * k
        dens = lambda x: 0.5 * c2 * (om2 + k * k + m * m) * math.exp(-2 * k * abs(x))
        val = 2 * quad(dens, 0, math.inf)[0] + (-0.5 * c2 + 0.25 * c2 * c2)
        assert val == pytest.approx(1.8125, rel=1e-10)

    def test_pi_sign_symmetry(self):
        x = GRID.x
        psi = np.exp(-x * x)
        a = FieldState.from_samples(psi, 1j * psi)
        b = FieldState.from_samples(psi, -1j * psi)
        p = PotentialSpec((0, -0.5, 0.25))
        assert energy(a, p, 1.0, GRID) == energy(b, p, 1.0, GRID)

    @given(st.integers(0, 10_000), st.floats(0, 2 * math.pi))
    def test_phase_invariance(self, seed, theta):
        s = random_state(np.random.default_rng(seed), GRID)
        p = PotentialSpec((0.1, -0.5, 0.25))
        e0 = energy(s, p, 1.0, GRID)
        e1 = energy(s.rotated(theta), p, 1.0, GRID)
        assert abs(e1 - e0) <= 1e-12 * max(1.0, abs(e0))

    @pytest.mark.parametrize("coeffs", [(0.0, -0.6), (0.0, -0.95), (0.3, -0.5, 0.25), (0.0, -2.0, 0.1, 0.05)])
    @given(seed=st.integers(0, 10_000), scale=st.floats(0.01, 3.0))
    def test_energy_bounded_below(self, coeffs, seed, scale):
        """E >= A + (1 - B/m) E_free via the discrete bound |psi(0)|^2 <= ||D psi|| ||psi||."""
        m = 1.0
        p = PotentialSpec(coeffs)
        v = validate_wellposedness(p, m)
        assert v.ok
        s = random_state(np.random.default_rng(seed), GRID, scale)
        e = energy(s, p, m, GRID)
        lower = v.A + (1 - v.B / m) * free_energy(s, m, GRID)
        assert e >= lower - 1e-9 * max(1.0, abs(e))
        assert e >= v.A - 1e-12
