import numpy as np
import pytest

from spheroidal_eq import potentials as pot
from spheroidal_eq.exceptions import BudgetWarning, DomainError
from spheroidal_eq.kernel import EnergyParams, w_alpha
from spheroidal_eq.oracle import chord_squares, convolution_oracle, sphere_area
from spheroidal_eq.potentials import Spheroid
from spheroidal_eq.sampling import stream, uniform_spheroid


def test_sphere_area():
    assert sphere_area(3) == pytest.approx(4 * np.pi)
    assert sphere_area(4) == pytest.approx(2 * np.pi**2)


def test_chord_of_unit_ball_from_centre():
    s = Spheroid(1, 1, 3)
    w = np.eye(3)
    assert np.allclose(chord_squares(np.zeros(3), w, s), 0.5)
    # a ray pointing away from a far point misses
    assert chord_squares(np.array([3.0, 0, 0]), np.array([[1.0, 0, 0]]), s)[0] == 0.0


def test_ball_interior_formula():
    s = Spheroid(1, 1, 3)
    x = np.array([0.3, -0.2, 0.5])
    est = convolution_oracle(x, s, 0.0, n_samples=200_000, seed=1)
    exact = (3 - x @ x) / 2
    assert abs(est.value - exact) <= 4 * est.stderr
    q = convolution_oracle(x, s, 0.0, method="quadrature", order=64)
    assert q.value == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("method", ["rays", "volume"])
def test_mc_matches_closed_form_exterior(method):
    s = Spheroid(0.8, 1.1, 3)
    x = np.array([0.4, 1.3, 0.5])
    est = convolution_oracle(x, s, 0.7, method=method, n_samples=200_000, seed=2)
    assert abs(est.value - pot.phi_alpha(x, s, 0.7)) <= 4 * est.stderr


def test_backends_agree_random_spheroid():
    s = Spheroid(1.2, 0.7, 3)
    x = np.array([0.5, 0.2, -0.3])
    mc = convolution_oracle(x, s, 0.7, n_samples=400_000, seed=3)
    q = convolution_oracle(x, s, 0.7, method="quadrature", order=64)
    assert abs(mc.value - q.value) <= 4 * np.hypot(mc.stderr, q.stderr)


def test_interior_n4_matches():
    s = Spheroid(1.3, 0.8, 4)
    x = uniform_spheroid(stream(4), 1, s.a, s.b, 4)[0]
    est = convolution_oracle(x, s, 0.0, n_samples=200_000, seed=4)
    assert abs(est.value - pot.phi0_inside(x, s)) <= 4 * est.stderr


def test_exterior_n5_matches():
    s = Spheroid(0.9, 1.2, 5)
    x = np.array([1.0, 0.8, 0.3, -0.4, 0.2])
    est = convolution_oracle(x, s, 0.0, n_samples=200_000, seed=5)
    assert abs(est.value - pot.phi0_outside(x, s)) <= 4 * est.stderr


def test_far_field_monopole():
    s = Spheroid(0.7, 1.3, 3)
    x = np.array([0.0, 60.0, 80.0])
    est = convolution_oracle(x, s, 0.5, method="quadrature", order=32)
    assert est.value == pytest.approx(w_alpha(x, EnergyParams(3, 0.5)), rel=1e-3)


def test_seeded_reproducible():
    s = Spheroid(1, 1, 3)
    x = np.array([0.1, 0.2, 0.3])
    a = convolution_oracle(x, s, 0.3, n_samples=10_000, seed=9)
    b = convolution_oracle(x, s, 0.3, n_samples=10_000, seed=9)
    assert a == b


def test_budget_warning_and_errors():
    s = Spheroid(1, 1, 3)
    with pytest.warns(BudgetWarning):
        convolution_oracle(np.array([0.2, 0.1, 0.0]), s, 0.0, n_samples=1000, target=1e-12)
    with pytest.raises(DomainError):
        convolution_oracle(np.zeros(4), s, 0.0)
    with pytest.raises(DomainError):
        convolution_oracle(np.zeros(4), Spheroid(1, 1, 4), 0.0, method="quadrature")
