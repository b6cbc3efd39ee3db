"""Potentials of the normalised uniform measure on a spheroid.

For the spheroid ``Omega(a, b) = {x_1^2/a^2 + |x'|^2/b^2 <= 1}`` in R^n this
module evaluates

* ``phi0``: the Coulomb potential ``|x|^(2-n) * mu``,
* ``psi``: the anisotropic part ``(x_1^2 / |x|^n) * mu``,
* ``phi_alpha = phi0 + alpha * psi``,

inside (a quadratic polynomial with no linear terms) and outside (integrals
from the confocal parameter ``lambda(x)`` to infinity, with ``psi`` obtained
from ``phi0`` and its gradient).  Outside, ``phi_alpha + |x|^2/2`` is also
written as ``A(z) + B(z) rho^2`` in spheroidal coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .exceptions import DegenerateSpheroidError, DomainError, QuadratureError
from .kernel import gamma_half
from .special_functions import (
    QUAD_TOL,
    aux_from_h,
    aux_integrals,
    check_dimension,
    h,
    k_integral,
    quiet_quad,
)

# |t - 1| below this counts as a ball for the exterior spheroidal formulas
DEGENERATE_TOL = 1e-6
_BALL_SHIFT = 1e-3
_INSIDE_SLACK = 1e-12


@dataclass(frozen=True)
class Spheroid:
    """Semi-axis ``a`` along x_1 and ``b`` in the n-1 transverse directions."""

    a: float
    b: float
    n: int = 3

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"semi-axes must be positive, got a={self.a}, b={self.b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "n", check_dimension(self.n))

    @classmethod
    def from_aspect(cls, t: float, b: float, n: int = 3) -> "Spheroid":
        return cls(math.sqrt(t) * b, b, n)

    @property
    def t(self) -> float:
        return (self.a / self.b) ** 2

    @property
    def kind(self) -> str:
        if self.a < self.b:
            return "oblate"
        if self.a > self.b:
            return "prolate"
        return "ball"

    @property
    def c(self) -> float:
        return math.sqrt(abs(self.a**2 - self.b**2))

    @property
    def degenerate(self) -> bool:
        return abs(self.t - 1.0) < DEGENERATE_TOL

    @property
    def volume(self) -> float:
        n = self.n
        return math.pi ** (n / 2) / (n / 2 * gamma_half(n)) * self.a * self.b ** (n - 1)

    def level(self, x) -> np.ndarray:
        """x_1^2/a^2 + r^2/b^2; <= 1 on the closed spheroid."""
        x = _points(x, self.n)
        return x[:, 0] ** 2 / self.a**2 + np.sum(x[:, 1:] ** 2, axis=1) / self.b**2

    def contains(self, x) -> np.ndarray:
        return self.level(x) <= 1.0 + _INSIDE_SLACK

    @cached_property
    def _interior_cache(self) -> dict:
        return {}


@dataclass(frozen=True)
class SpheroidalPoint:
    """Oblate or prolate spheroidal coordinates of a point in the x_1 x_2 plane."""

    z: float
    rho: float
    c: float
    kind: str

    def to_cartesian(self) -> tuple[float, float]:
        z, rho, c = self.z, self.rho, self.c
        if self.kind == "oblate":
            return c * z * rho, c * math.sqrt((1 + z * z) * (1 - rho * rho))
        return c * z * rho, c * math.sqrt(max(z * z - 1, 0.0) * (1 - rho * rho))


def _points(x, n):
    x = np.asarray(x, dtype=float)
    x = np.atleast_2d(x)
    if x.shape[1] != n:
        raise DomainError(f"points must have {n} coordinates, got {x.shape[1]}")
    return x


def _split(x, n):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = _points(x, n)
    return x, single


def _ret(v, single):
    return float(v[0]) if single else v


# ---------------------------------------------------------------- interior


def interior_coefficients(s: Spheroid, alpha: float, route: str = "identities"):
    """Coefficients ``(c0, c1, c2)`` with ``phi_alpha = c0 + c1 x_1^2 + c2 r^2`` inside.

    ``route='identities'`` expresses the integrals through H and H';
    ``route='quadrature'`` integrates each one directly.
    """
    n, b, t = s.n, s.b, s.t
    key = (float(alpha), route)
    cache = s._interior_cache
    if key in cache:
        return cache[key]
    if route == "quadrature":
        hv = h(t, n, "quadrature")
        j5, jb, jc = aux_integrals(t, n)
        kv = k_integral(t, n, "quadrature")
    elif route == "identities":
        hv = h(t, n, "auto")
        j5, jb, jc = aux_from_h(t, n, "auto")
        kv = k_integral(t, n, "auto")
    else:
        raise ValueError(f"unknown route {route!r}")
    pref = n / (4.0 * b**n)
    c1 = pref * ((2 * alpha - (n - 2)) * hv - 3 * alpha * t * j5)
    c2 = pref * (-(n - 2) * jb - alpha * t * jc)
    # value at the centre: phi0(0) and psi(0) from the x=0 sigma-integrals
    c0 = (n * (n - 2) / 4.0 * kv + alpha * n * t / 4.0 * hv) * b ** (2 - n)
    cache[key] = (c0, c1, c2)
    return c0, c1, c2


def _inside_guard(x, s):
    if not np.all(s.contains(x)):
        raise DomainError("point lies outside the spheroid")


def phi_alpha_inside(x, s: Spheroid, alpha: float, route: str = "identities"):
    x, single = _split(x, s.n)
    _inside_guard(x, s)
    c0, c1, c2 = interior_coefficients(s, alpha, route)
    v = c0 + c1 * x[:, 0] ** 2 + c2 * np.sum(x[:, 1:] ** 2, axis=1)
    return _ret(v, single)


def phi0_inside(x, s: Spheroid, route: str = "identities"):
    return phi_alpha_inside(x, s, 0.0, route)


def psi_inside(x, s: Spheroid, route: str = "identities"):
    x, single = _split(x, s.n)
    _inside_guard(x, s)
    c0a, c1a, c2a = interior_coefficients(s, 1.0, route)
    c00, c10, c20 = interior_coefficients(s, 0.0, route)
    v = (c0a - c00) + (c1a - c10) * x[:, 0] ** 2 + (c2a - c20) * np.sum(x[:, 1:] ** 2, axis=1)
    return _ret(v, single)


def phi0_inside_integral(x, s: Spheroid):
    """Interior Coulomb potential straight from its sigma-integral (one quad per point)."""
    x, single = _split(x, s.n)
    _inside_guard(x, s)
    out = np.array([_phi0_integral(xi, s, 0.0) for xi in x])
    return _ret(out, single)


# ---------------------------------------------------------------- exterior


def lambda_root(x, s: Spheroid):
    """Largest root of x_1^2/(a^2+l) + r^2/(b^2+l) = 1 (confocal parameter)."""
    x, single = _split(x, s.n)
    if np.any(s.level(x) < 1.0 - 1e-12):
        raise DomainError("lambda(x) is only defined outside the spheroid")
    return _ret(_lambda_any(x, s), single)


def _lambda_any(x, s):
    # closed forms hold for every x; inside the spheroid they give the
    # confocal parameter in (-min(a,b)^2, 0)
    x1 = x[:, 0]
    r = np.sqrt(np.sum(x[:, 1:] ** 2, axis=1))
    a, b, c = s.a, s.b, s.c
    if s.kind == "ball":
        return x1**2 + r**2 - a**2
    if s.kind == "oblate":
        S = np.sqrt(x1**2 + (r + c) ** 2) + np.sqrt(x1**2 + (r - c) ** 2)
        return 0.25 * S**2 - b**2
    S = np.sqrt((x1 + c) ** 2 + r**2) + np.sqrt((x1 - c) ** 2 + r**2)
    return 0.25 * S**2 - a**2


def _tail(f, lo, scale):
    v1, e1 = quiet_quad(f, lo, lo + scale, epsabs=0.0, epsrel=1e-13, limit=200)
    v2, e2 = quiet_quad(f, lo + scale, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    v, e = v1 + v2, math.hypot(e1, e2)
    if e > max(QUAD_TOL * abs(v), 1e-14):
        raise QuadratureError(f"tail integral from {lo}: error {e:.3g} on value {v:.6g}")
    return v


def _phi0_integral(x, s, lam):
    a2, b2, n = s.a**2, s.b**2, s.n
    x1s = x[0] ** 2
    r2 = float(np.sum(x[1:] ** 2))

    def f(u):
        return (1.0 - x1s / (a2 + u) - r2 / (b2 + u)) / (math.sqrt(a2 + u) * (b2 + u) ** ((n - 1) / 2))

    return n * (n - 2) / 4.0 * _tail(f, lam, max(a2, b2, lam))


def phi0_outside(x, s: Spheroid):
    x, single = _split(x, s.n)
    lam = lambda_root(x, s)
    lam = np.atleast_1d(lam)
    out = np.array([_phi0_integral(xi, s, max(li, 0.0)) for xi, li in zip(x, lam)])
    return _ret(out, single)


def grad_phi0_outside(x, s: Spheroid, route: str = "spheroidal"):
    """Gradient of the exterior Coulomb potential.

    ``route='lambda'`` differentiates under the integral sign (the integrand
    vanishes at ``lambda(x)``); ``route='spheroidal'`` uses the
    spheroidal-coordinate integrals in ``sigma = a^2 + s``.  Both return the
    x_1 component and the radial component times ``x'``.
    """
    x, single = _split(x, s.n)
    lam = np.maximum(np.atleast_1d(lambda_root(x, s)), 0.0)
    n, a2, b2 = s.n, s.a**2, s.b**2
    pref = n * (n - 2) / 4.0
    out = np.empty_like(x)
    for i, (xi, li) in enumerate(zip(x, lam)):
        if route == "lambda":
            scale = max(a2, b2, li)
            g1 = _tail(lambda u: 1.0 / ((a2 + u) ** 1.5 * (b2 + u) ** ((n - 1) / 2)), li, scale)
            gr = _tail(lambda u: 1.0 / ((a2 + u) ** 0.5 * (b2 + u) ** ((n + 1) / 2)), li, scale)
        elif route == "spheroidal":
            if s.degenerate:
                raise DegenerateSpheroidError("spheroidal coordinates degenerate for a ball")
            sign = 1.0 if s.kind == "oblate" else -1.0
            c2 = s.c**2
            lo = a2 + li  # = c^2 z^2
            g1 = _tail(lambda u: 1.0 / (u**1.5 * (u + sign * c2) ** ((n - 1) / 2)), lo, max(lo, c2))
            gr = _tail(lambda u: 1.0 / (u**0.5 * (u + sign * c2) ** ((n + 1) / 2)), lo, max(lo, c2))
        else:
            raise ValueError(f"unknown route {route!r}")
        out[i, 0] = -2.0 * pref * xi[0] * g1
        out[i, 1:] = -2.0 * pref * xi[1:] * gr
    return out[0] if single else out


def _psi_outside_formula(x, s, route):
    a2, b2, n = s.a**2, s.b**2, s.n
    p0 = np.atleast_1d(phi0_outside(x, s))
    g = np.atleast_2d(grad_phi0_outside(x, s, route))
    proj = g[:, 0] * b2 * x[:, 0] + a2 * np.sum(g[:, 1:] * x[:, 1:], axis=1)
    return a2 / (a2 - b2) * p0 + proj / ((n - 2) * (a2 - b2))


def psi_outside(x, s: Spheroid, route: str = "spheroidal"):
    """Anisotropic potential outside the spheroid via the Coulomb potential.

    Near a ball the formula is 0/0; there the value is extrapolated linearly
    from the two shrunken spheroids with ``a`` scaled by ``1 - 1e-3`` and
    ``1 - 2e-3`` (both contain no exterior point of ``s``; error O(1e-6)).
    """
    x, single = _split(x, s.n)
    if np.any(s.level(x) < 1.0 - 1e-12):
        raise DomainError("psi_outside needs exterior points")
    if s.degenerate:
        one = Spheroid(s.a * (1 - _BALL_SHIFT), s.b, s.n)
        two = Spheroid(s.a * (1 - 2 * _BALL_SHIFT), s.b, s.n)
        v = 2.0 * _psi_outside_formula(x, one, "lambda") - _psi_outside_formula(x, two, "lambda")
        return _ret(v, single)
    return _ret(_psi_outside_formula(x, s, route), single)


def phi_alpha_outside(x, s: Spheroid, alpha: float, route: str = "spheroidal"):
    x, single = _split(x, s.n)
    v = np.atleast_1d(phi0_outside(x, s))
    if alpha != 0.0:
        v = v + alpha * np.atleast_1d(psi_outside(x, s, route))
    return _ret(v, single)


def phi_alpha(x, s: Spheroid, alpha: float):
    """Potential anywhere, dispatching on the inside/outside test."""
    x, single = _split(x, s.n)
    inside = s.contains(x)
    v = np.empty(len(x))
    if np.any(inside):
        v[inside] = phi_alpha_inside(x[inside], s, alpha)
    if np.any(~inside):
        v[~inside] = phi_alpha_outside(x[~inside], s, alpha)
    return _ret(v, single)


def components(x, s: Spheroid):
    """``(phi0, psi)`` at each point, inside or outside."""
    x = _points(x, s.n)
    inside = s.contains(x)
    p0 = np.empty(len(x))
    ps = np.empty(len(x))
    if np.any(inside):
        p0[inside] = phi0_inside(x[inside], s)
        ps[inside] = psi_inside(x[inside], s)
    if np.any(~inside):
        p0[~inside] = phi0_outside(x[~inside], s)
        ps[~inside] = psi_outside(x[~inside], s, "lambda" if s.degenerate else "spheroidal")
    return p0, ps


# ------------------------------------------------ spheroidal coordinates


def to_spheroidal(x, s: Spheroid) -> SpheroidalPoint:
    """Spheroidal coordinates of a single point (reduced to the x_1 x_2 plane)."""
    if s.degenerate:
        raise DegenerateSpheroidError("spheroidal coordinates need a != b")
    x = np.asarray(x, dtype=float)
    c = s.c
    lam = float(_lambda_any(x[None, :], s)[0])
    z = math.sqrt(max(lam + s.a**2, 0.0)) / c
    if z > 0:
        rho = float(np.clip(x[0] / (c * z), -1.0, 1.0))
    else:
        # focal disk of an oblate spheroid
        r = math.sqrt(float(np.sum(x[1:] ** 2)))
        rho = math.copysign(math.sqrt(max(1.0 - (r / c) ** 2, 0.0)), x[0] if x[0] else 1.0)
    return SpheroidalPoint(z=z, rho=rho, c=c, kind=s.kind)


def from_spheroidal(z: float, rho: float, s: Spheroid) -> np.ndarray:
    """Cartesian point in the x_1 x_2 plane with the given coordinates."""
    p = SpheroidalPoint(z, rho, s.c, s.kind)
    x = np.zeros(s.n)
    x[0], x[1] = p.to_cartesian()
    return x


def _profile_check(s):
    if s.degenerate:
        raise DegenerateSpheroidError("the exterior profile needs a != b")


def exterior_profile(z: float, s: Spheroid, alpha: float) -> tuple[float, float]:
    """``(A(z), B(z))`` with ``phi_alpha + |x|^2/2 = A + B rho^2`` for z >= a/c."""
    _profile_check(s)
    n, a2 = s.n, s.a**2
    c2 = s.c**2
    lo = c2 * z * z
    if z < s.a / s.c * (1 - 1e-12):
        raise DomainError(f"z={z} lies inside the spheroid (a/c={s.a / s.c})")
    if s.kind == "oblate":
        k = (n - 2) * c2 - n * alpha * a2

        def fa(u):
            return (k * (u - lo) + 2 * alpha * a2 * (u + c2)) / (c2 * math.sqrt(u) * (u + c2) ** ((n + 1) / 2))

        def fb(u):
            return (k * (u - lo) + 2 * alpha * lo * (u + c2)) / (u**1.5 * (u + c2) ** ((n + 1) / 2))

        A = n / 4.0 * _tail(fa, lo, max(lo, c2)) + c2 / 2 * (1 + z * z)
        B = n / 4.0 * _tail(fb, lo, max(lo, c2)) - c2 / 2
        return A, B
    ka = (n - 2) * c2 + n * alpha * a2

    def fa(u):
        return (ka * (u - lo) - 2 * alpha * a2 * (u - c2)) / (c2 * math.sqrt(u) * (u - c2) ** ((n + 1) / 2))

    def fb(u):
        return (-ka * (u - lo) + 2 * alpha * lo * (u - c2)) / (u**1.5 * (u - c2) ** ((n + 1) / 2))

    A = n / 4.0 * _tail(fa, lo, max(lo, c2)) + c2 / 2 * (z * z - 1)
    B = n / 4.0 * _tail(fb, lo, max(lo, c2)) + c2 / 2
    return A, B


def profile_curvatures(z, s: Spheroid, alpha: float):
    """Closed forms of ``((1/z) A')'`` and ``((1/z)(A' + B'))'``."""
    _profile_check(s)
    z = np.asarray(z, dtype=float)
    n, c = s.n, s.c
    q = s.a**2 / c**2
    if s.kind == "oblate":
        base = n / (c ** (n - 2) * z**2 * (1 + z**2) ** ((n + 1) / 2))
        d_a = base * ((n - 2) * z**2 + alpha * q)
        d_ab = base * ((n - 2) * (1 + alpha) * z**2 + n - 2 - alpha - alpha * q * (n - 1))
    else:
        base = n / (c ** (n - 2) * z**2 * (z**2 - 1) ** ((n + 1) / 2))
        d_a = base * ((n - 2) * z**2 + alpha * q)
        d_ab = base * ((n - 2) * (1 + alpha) * z**2 - (n - 2) + alpha - alpha * q * (n - 1))
    return d_a, d_ab


def el_constant(solution) -> float:
    """EL constant of a solved equilibrium: ``A(a/c)``, or ``phi_alpha(0)`` for a ball."""
    s = solution.spheroid
    alpha = solution.params.alpha
    if s.degenerate:
        return interior_coefficients(s, alpha)[0]
    return exterior_profile(s.a / s.c, s, alpha)[0]


def center_value(s: Spheroid, alpha: float) -> float:
    return interior_coefficients(s, alpha)[0]
