"""The auxiliary integral H(t) and its relatives.

All integrals have the shape

    J(p, q; t) = int_0^inf (t + s)^(-p) (1 + s)^(-q) ds

with ``t = a^2 / b^2`` the aspect ratio of a spheroid and ``n`` the
dimension.  ``H = J(3/2, (n-1)/2)``; the other three integrals used by the
interior potential are expressible through ``H`` and ``H'``.

Three evaluation routes exist and are cross-checked in the tests:

* ``quadrature``: adaptive Gauss-Kronrod on the defining integral;
* ``closed_form``: the integrated ODE representation, where the remaining
  one-dimensional integral is reduced by ``s = cos^2`` (``t < 1``) or
  ``s = cosh^2`` (``t > 1``) to a power of a trigonometric/hyperbolic
  function and evaluated by the standard reduction formula;
* ``series_near_1``: Taylor series about ``t = 1``, where the closed form
  suffers catastrophic cancellation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .exceptions import DomainError, QuadratureError

Method = Literal["quadrature", "closed_form", "series_near_1", "auto"]

QUAD_TOL = 1e-10
# Below this distance from t = 1 the closed form loses more than ~1e-9
# relative accuracy in H' (n <= 6), so "auto" switches route.
NEAR_ONE = 0.1
MAX_DIM = 16
_SERIES_TERMS = 60


@dataclass(frozen=True)
class HEval:
    t: float
    n: int
    value: float
    method: str


def check_dimension(n) -> int:
    if int(n) != n or not 3 <= n <= MAX_DIM:
        raise DomainError(f"dimension must be an integer in [3, {MAX_DIM}], got {n!r}")
    return int(n)


def _check_t(t) -> float:
    t = float(t)
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"aspect ratio t must be positive and finite, got {t!r}")
    return t


def quiet_quad(f, lo, hi, **kw):
    """``scipy.integrate.quad`` without its warnings; callers check the error."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(f, lo, hi, **kw)


def _quad_checked(f, lo, hi, tol=QUAD_TOL):
    val, err = quiet_quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=400)
    if not err <= max(tol * abs(val), 1e-300):
        raise QuadratureError(
            f"quadrature on [{lo}, {hi}] stalled: value {val:.6g}, error {err:.3g}"
        )
    return val, err


def power_integral(p: float, q: float, t: float, tol: float = QUAD_TOL) -> float:
    """int_0^inf (t+s)^-p (1+s)^-q ds by adaptive quadrature.

    The half-line is split at ``min(t, 1)`` and ``max(t, 1)`` so that the
    peak of the integrand near ``s = 0`` (small ``t``) and the transition
    scale of the second factor are resolved; the last piece is mapped to a
    finite interval by scipy's QAGI transform.
    """
    t = _check_t(t)
    if p + q <= 1:
        raise DomainError("power integral diverges at infinity (p + q <= 1)")

    def f(s):
        return (t + s) ** -p * (1.0 + s) ** -q

    cuts = sorted({0.0, min(t, 1.0), max(t, 1.0)})
    total = 0.0
    err2 = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, e = _quad_checked(f, lo, hi, tol)
        total += v
        err2 += e * e
    v, e = _quad_checked(f, cuts[-1], np.inf, tol)
    total += v
    err2 += e * e
    if math.sqrt(err2) > tol * abs(total):
        raise QuadratureError(f"J({p}, {q}; {t}) error {math.sqrt(err2):.3g} exceeds tolerance")
    return total


def _cos_power_integral(k: int, x: float) -> float:
    # int_0^x cos^k
    if k == 0:
        return x
    if k == 1:
        return math.sin(x)
    return math.cos(x) ** (k - 1) * math.sin(x) / k + (k - 1) / k * _cos_power_integral(k - 2, x)


def _sinh_power_integral(k: int, x: float) -> float:
    # int_0^x sinh^k
    if k == 0:
        return x
    if k == 1:
        return math.cosh(x) - 1.0
    return math.sinh(x) ** (k - 1) * math.cosh(x) / k - (k - 1) / k * _sinh_power_integral(k - 2, x)


def signed_tail_integral(t: float, n: int) -> float:
    """int_t^1 |1-s|^(n/2-2) / sqrt(s) ds, signed (negative for t > 1)."""
    t = _check_t(t)
    k = n - 3
    if t < 1.0:
        phi = math.asin(math.sqrt(t))
        return 2.0 * (_cos_power_integral(k, math.pi / 2) - _cos_power_integral(k, phi))
    if t > 1.0:
        return -2.0 * _sinh_power_integral(k, math.acosh(math.sqrt(t)))
    return 0.0


def _h_closed(t: float, n: int) -> float:
    g = signed_tail_integral(t, n)
    return 2.0 / (math.sqrt(t) * (1.0 - t)) - (n - 2) / abs(1.0 - t) ** (n / 2) * g


def _h_prime_closed(t: float, n: int) -> float:
    g = signed_tail_integral(t, n)
    u = 1.0 - t
    return ((n + 1) * t - 1.0) / (t**1.5 * u * u) - 0.5 * n * (n - 2) * u / abs(u) ** (n / 2 + 2) * g


def _series(t: float, n: int, order: int) -> float:
    # d^k H / dt^k at t=1 equals (-1)^k (3/2)_k * 2 / (n + 2k)
    d = t - 1.0
    if abs(d) >= 0.5:
        raise DomainError("series about t = 1 is only used for |t - 1| < 0.5")
    total = 0.0
    coef = 1.0  # (-1)^m (3/2)_m / m! accumulated with m = order + j
    for m in range(order):
        coef *= -(1.5 + m) / (m + 1)
    for j in range(_SERIES_TERMS):
        m = order + j
        # coefficient of d^j in the order-th derivative: H^(m)(1) / j!
        falling = math.factorial(m) / math.factorial(j)
        term = coef * falling * 2.0 / (n + 2 * m) * d**j
        total += term
        coef *= -(1.5 + m) / (m + 1)
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def _resolve(method: str, t: float) -> str:
    if method == "auto":
        return "series_near_1" if abs(t - 1.0) < NEAR_ONE else "closed_form"
    if method == "closed_form" and t == 1.0:
        return "series_near_1"
    if method not in ("quadrature", "closed_form", "series_near_1"):
        raise ValueError(f"unknown method {method!r}")
    return method


def h(t: float, n: int, method: Method = "quadrature") -> float:
    """H(t) = int_0^inf (t+s)^(-3/2) (1+s)^(-(n-1)/2) ds."""
    n = check_dimension(n)
    t = _check_t(t)
    method = _resolve(method, t)
    if method == "quadrature":
        return power_integral(1.5, (n - 1) / 2, t)
    if method == "series_near_1":
        return _series(t, n, 0)
    return _h_closed(t, n)


def h_eval(t: float, n: int, method: Method = "quadrature") -> HEval:
    resolved = _resolve(method, _check_t(t))
    return HEval(t=float(t), n=check_dimension(n), value=h(t, n, resolved), method=resolved)


def h_prime(t: float, n: int, method: Method = "auto") -> float:
    """Derivative of :func:`h` with respect to the aspect ratio.

    The default route is the closed form away from ``t = 1`` and the
    differentiated integral ``-(3/2) J(5/2, (n-1)/2)`` near it.
    """
    n = check_dimension(n)
    t = _check_t(t)
    if method == "auto":
        method = "quadrature" if abs(t - 1.0) < NEAR_ONE else "closed_form"
    method = _resolve(method, t)
    if method == "quadrature":
        return -1.5 * power_integral(2.5, (n - 1) / 2, t)
    if method == "series_near_1":
        return _series(t, n, 1)
    return _h_prime_closed(t, n)


def aux_integrals(t: float, n: int) -> tuple[float, float, float]:
    """The three integrals of the interior potential, by direct quadrature.

    Returns ``(J5, Jb, Jc)`` with exponents ``(5/2, (n-1)/2)``,
    ``(1/2, (n+1)/2)`` and ``(3/2, (n+1)/2)`` respectively.
    """
    n = check_dimension(n)
    t = _check_t(t)
    return (
        power_integral(2.5, (n - 1) / 2, t),
        power_integral(0.5, (n + 1) / 2, t),
        power_integral(1.5, (n + 1) / 2, t),
    )


def aux_from_h(t: float, n: int, method: Method = "auto") -> tuple[float, float, float]:
    """``(J5, Jb, Jc)`` expressed through H and H' (fast path)."""
    hv = h(t, n, method)
    hp = h_prime(t, n, method)
    return (
        -2.0 / 3.0 * hp,
        2.0 / ((n - 1) * math.sqrt(t)) - hv / (n - 1),
        2.0 / ((n - 1) * t**1.5) + 2.0 * hp / (n - 1),
    )


def k_integral(t: float, n: int, method: Method = "quadrature") -> float:
    """int_0^inf (t+s)^(-1/2) (1+s)^(-(n-1)/2) ds, the interior Coulomb constant.

    Its t-derivative is ``-H/2``; for ``t != 1`` it follows from the
    ``useful-b`` relation one dimension down, but direct quadrature is used
    unless ``method='auto'`` and ``n >= 5``.
    """
    n = check_dimension(n)
    t = _check_t(t)
    if method == "auto" and n >= 5:
        # Jb for dimension n-2 has exponents (1/2, (n-1)/2)
        return 2.0 / ((n - 3) * math.sqrt(t)) - h(t, n - 2, "auto") / (n - 3)
    return power_integral(0.5, (n - 1) / 2, t)
