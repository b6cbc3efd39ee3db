import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheroidal_eq.exceptions import DomainError
from spheroidal_eq.kernel import (
    EnergyParams,
    comparability_constant,
    fourier_prefactor,
    gamma_half,
    grad_w_alpha,
    w_alpha,
    w_alpha_rewritten,
    w_hat_alpha,
    w_hat_star,
    w_minus_one,
)


def test_w_alpha_examples():
    p = EnergyParams(3, 0.5)
    assert w_alpha(np.array([1.0, 0, 0]), p) == pytest.approx(1.5)
    assert w_alpha(np.array([0.0, 1, 0]), p) == pytest.approx(1.0)
    assert w_alpha(np.zeros(3), p) == math.inf


def test_w_alpha_batch_and_rewrite():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 4))
    p = EnergyParams(4, 1.3)
    assert np.allclose(w_alpha(x, p), w_alpha_rewritten(x, p), rtol=1e-13)


def test_grad_examples():
    g = grad_w_alpha(np.array([0.0, 1, 0]), EnergyParams(3, 0.7))
    assert g[0] == 0.0
    assert np.allclose(grad_w_alpha(np.array([1.0, 0, 0]), EnergyParams(3, 0.0)), [-1, 0, 0])
    with pytest.raises(DomainError):
        grad_w_alpha(np.zeros(3), EnergyParams(3, 0.0))


def test_grad_finite_difference():
    rng = np.random.default_rng(1)
    p = EnergyParams(4, 1.0)
    for _ in range(5):
        x = rng.normal(size=4)
        fd = np.array(
            [(w_alpha(x + 1e-6 * e, p) - w_alpha(x - 1e-6 * e, p)) / 2e-6 for e in np.eye(4)]
        )
        assert np.allclose(grad_w_alpha(x, p), fd, rtol=1e-6, atol=1e-9)


def test_w_hat_examples():
    assert w_hat_alpha(np.array([1.0, 0, 0, 0]), EnergyParams(4, 2.0)) == pytest.approx(0.0, abs=1e-15)
    assert w_hat_alpha(np.array([0.0, 1, 0, 0]), EnergyParams(4, 0.0)) == pytest.approx(1.0)
    v = w_hat_alpha(np.array([1.0, 1, 0]), EnergyParams(3, 1.0))
    assert v == pytest.approx(math.pi**-0.5 / (2 * math.sqrt(math.pi) / 2) * 2 / 4)


def test_w_minus_one_and_star():
    assert w_minus_one(np.array([1.0, 0, 0]), 3) == pytest.approx(0.0)
    assert w_minus_one(np.array([0.0, 1, 0]), 3) == pytest.approx(1.0)
    assert w_minus_one(np.array([1e-8, 0, 0]), 3) == pytest.approx(0.0, abs=1e-12)
    assert w_hat_star(np.array([0.0, 1, 0]), 3) == pytest.approx(0.0, abs=1e-15)
    for n in (3, 5):
        e1 = np.eye(n)[0]
        assert w_hat_star(e1, n) == pytest.approx(fourier_prefactor(n) * (n - 1))
    rng = np.random.default_rng(2)
    xi = rng.normal(size=(20, 5))
    diff = w_hat_alpha(xi, EnergyParams(5, -1 + 1e-8)) - w_hat_star(xi, 5)
    assert np.max(np.abs(diff)) <= 1e-6


def test_gamma_half():
    for n in range(1, 12):
        assert gamma_half(n) == pytest.approx(math.gamma(n / 2), rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(-0.99, 0.99), n=st.just(3))
def test_w_hat_positive(alpha, n):
    rng = np.random.default_rng(abs(hash(alpha)) % 2**32)
    assert np.all(w_hat_alpha(rng.normal(size=(200, n)), EnergyParams(n, alpha)) > 0)


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-0.99, 3.0), lam=st.floats(0.1, 10.0))
def test_homogeneity(alpha, lam):
    p = EnergyParams(3, alpha)
    x = np.array([0.3, -0.7, 1.1])
    assert w_alpha(lam * x, p) == pytest.approx(lam ** (2 - 3) * w_alpha(x, p), rel=1e-12)


def test_comparability_constant():
    assert comparability_constant(0.0) == pytest.approx(1.0)
    rng = np.random.default_rng(3)
    x = rng.normal(size=(500, 3))
    for a in (-0.5, 0.5, 2.0):
        c = comparability_constant(a)
        r = w_alpha(x, EnergyParams(3, a)) / w_alpha(x, EnergyParams(3, 0.0))
        assert np.all(r >= 1 / c - 1e-12) and np.all(r <= c + 1e-12)


@pytest.mark.parametrize("bad", [(2, 0.0), (3, np.inf), (3, np.nan), (3.5, 0.0)])
def test_params_validation(bad):
    with pytest.raises(DomainError):
        EnergyParams(*bad)


def test_params_any_alpha_for_kernel():
    assert EnergyParams(3, -1.0).alpha == -1.0
    assert not EnergyParams(3, -1.0).solvable


def test_params_solvable():
    assert EnergyParams(3, 1.0).solvable
    assert not EnergyParams(3, 1.5).solvable
    with pytest.raises(DomainError):
        EnergyParams(3, 1.5).require_solvable()
