import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheroidal_eq.exceptions import DomainError
from spheroidal_eq.special_functions import (
    aux_from_h,
    aux_integrals,
    h,
    h_eval,
    h_prime,
    k_integral,
    power_integral,
)

# values from a 30-digit mpmath quadrature oracle
GOLDEN_H = {(4.0, 3): 0.17356399753396423, (0.1, 6): 3.0659138545994345}
GOLDEN_HP = {(0.25, 3): -6.449064406166108, (10.0, 5): -0.0032637475002586882}


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_h_at_one(n):
    for method in ("quadrature", "closed_form", "series_near_1", "auto"):
        assert h(1.0, n, method) == pytest.approx(2 / n, abs=1e-12)
    assert h_prime(1.0, n) == pytest.approx(-3 / (n + 2), abs=1e-12)


def test_h_closed_form_n3():
    expected = -2 / (2 * 3) + 2 * math.acosh(2) / 3**1.5
    assert h(4.0, 3) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("key", sorted(GOLDEN_H))
def test_h_golden(key):
    for method in ("quadrature", "closed_form"):
        assert h(*key, method) == pytest.approx(GOLDEN_H[key], rel=1e-11)


@pytest.mark.parametrize("key", sorted(GOLDEN_HP))
def test_h_prime_golden(key):
    for method in ("quadrature", "closed_form", "auto"):
        assert h_prime(*key, method) == pytest.approx(GOLDEN_HP[key], rel=1e-10)


def test_aux_at_one_n3():
    j5, jb, jc = aux_integrals(1.0, 3)
    assert (j5, jb, jc) == pytest.approx((2 / 5, 2 / 3, 2 / 5), abs=1e-10)
    assert aux_from_h(1.0, 3) == pytest.approx((2 / 5, 2 / 3, 2 / 5), abs=1e-12)


@pytest.mark.parametrize("t", [0.01, 0.3, 0.95, 1.05, 3.0, 50.0])
@pytest.mark.parametrize("n", [3, 4, 7])
def test_routes_agree(t, n):
    q = h(t, n, "quadrature")
    assert h(t, n, "auto") == pytest.approx(q, rel=1e-10)
    assert h_prime(t, n, "auto") == pytest.approx(h_prime(t, n, "quadrature"), rel=1e-9)
    assert aux_from_h(t, n) == pytest.approx(aux_integrals(t, n), rel=1e-9)
    assert k_integral(t, n, "auto") == pytest.approx(k_integral(t, n, "quadrature"), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0.02, 40.0), n=st.integers(3, 8))
def test_hprime_ode(t, n):
    # -n H + 2 (1 - t) H' + 2 t^(-3/2) = 0
    hv, hp = h(t, n, "auto"), h_prime(t, n, "auto")
    scale = n * abs(hv) + 2 * abs((1 - t) * hp) + 2 * t**-1.5
    assert abs(-n * hv + 2 * (1 - t) * hp + 2 * t**-1.5) <= 1e-9 * scale


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.05, 20.0), n=st.integers(3, 6))
def test_h_positive_decreasing(t, n):
    assert h(t, n, "auto") > h(t * 1.1, n, "auto") > 0
    assert h_prime(t, n) < 0


def test_series_near_one_matches_quadrature():
    for dt in (1e-6, 1e-3, -0.05, 0.09):
        t = 1 + dt
        assert h(t, 6, "series_near_1") == pytest.approx(h(t, 6, "quadrature"), rel=1e-11)


def test_h_eval_and_power_integral():
    ev = h_eval(2.0, 4)
    assert ev.value == pytest.approx(h(2.0, 4))
    assert power_integral(1.5, 1.5, 2.0) == pytest.approx(h(2.0, 4), rel=1e-12)


@pytest.mark.parametrize("bad", [(0.0, 3), (-1.0, 3), (1.0, 2), (1.0, 3.5), (np.nan, 3)])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        h(*bad)
