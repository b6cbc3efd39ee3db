"""Stationarity system for the equilibrium spheroid.

The aspect ratio ``t = a^2/b^2`` solves ``F(t, alpha) = 0`` with
``F = (A(t) alpha + B(t)) / sqrt(t)``; the transverse semi-axis then follows
from ``b^n = (n - 2 + alpha)/sqrt(t) - alpha H(t)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import potentials
from .exceptions import BracketError, DomainError
from .kernel import EnergyParams
from .special_functions import check_dimension, h, h_prime

RESIDUAL_TOL = 1e-10
_T_MIN = 1e-8
_T_CAP = 1e12


def coeff_ab(t: float, n: int, method: str = "auto") -> tuple[float, float]:
    """The pair ``(A(t), B(t))`` with ``sqrt(t) F(t, alpha) = A alpha + B``."""
    n = check_dimension(n)
    st = math.sqrt(t)
    hv = h(t, n, method)
    hp = h_prime(t, n, method)
    A = (n - 1) * st * hv + n * t * st * hp + 1.0
    B = -0.5 * n * (n - 2) * st * hv + (n - 2)
    return A, B


def stationarity_f(t: float, alpha: float, n: int, method: str = "auto") -> float:
    """Left side of the reduced stationarity equation."""
    n = check_dimension(n)
    hv = h(t, n, method)
    hp = h_prime(t, n, method)
    rt = 1.0 / math.sqrt(t)
    return alpha * ((n - 1) * hv + n * t * hp + rt) + (n - 2) * (-0.5 * n * hv + rt)


def coefficient_equations(t: float, b: float, alpha: float, n: int) -> tuple[float, float]:
    """Residuals of the x_1^2 and r^2 coefficient equations (both should vanish)."""
    hv = h(t, n, "auto")
    hp = h_prime(t, n, "auto")
    bn = b**n
    e1 = n / (4 * bn) * ((2 * alpha - (n - 2)) * hv + 2 * alpha * t * hp) + 0.5
    e2 = n / (4 * (n - 1) * bn) * (
        -2 * (n - 2 + alpha) / math.sqrt(t) + (n - 2) * hv - 2 * alpha * t * hp
    ) + 0.5
    return e1, e2


def b_power(t: float, alpha: float, n: int) -> float:
    """``b^n`` from the summed coefficient equation."""
    return (n - 2 + alpha) / math.sqrt(t) - alpha * h(t, n, "auto")


def _root(f, lo, hi):
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo:.3g}, {hi:.3g}]: F = {flo:.3g}, {fhi:.3g}")
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def _polish(f, t):
    # brentq stops on the bracket width; keep the better of t and its float neighbours
    cands = [t, np.nextafter(t, 0), np.nextafter(t, np.inf)]
    return min(cands, key=lambda u: abs(f(u)))


def solve_aspect_ratio(alpha: float, n: int) -> float:
    """Unique root t(alpha) of F(., alpha): in (0,1) for alpha > 0, (1, inf) for alpha < 0."""
    p = EnergyParams(n, alpha).require_solvable()
    alpha, n = p.alpha, p.n
    if alpha == 0.0:
        return 1.0

    def f(t):
        return stationarity_f(t, alpha, n)

    if alpha > 0:
        t = _root(f, _T_MIN, 1.0)
    else:
        hi = 2.0
        while f(hi) <= 0:
            hi *= 2.0
            if hi > _T_CAP:
                raise BracketError(f"F(t, {alpha}) stays negative up to t = {_T_CAP:g}")
        t = _root(f, 1.0, hi)
    return _polish(f, t)


@dataclass
class EquilibriumSolution:
    params: EnergyParams
    t: float
    a: float
    b: float
    c_alpha: float
    c_alpha_center: float = float("nan")
    residual: float = float("nan")
    extra: dict = field(default_factory=dict)

    @property
    def spheroid(self) -> potentials.Spheroid:
        return potentials.Spheroid(self.a, self.b, self.params.n)

    @property
    def kind(self) -> str:
        return self.spheroid.kind

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = {"n": self.params.n, "alpha": self.params.alpha}
        d["kind"] = self.kind
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EquilibriumSolution":
        p = d["params"]
        return cls(
            params=EnergyParams(p["n"], p["alpha"]),
            t=float(d["t"]),
            a=float(d["a"]),
            b=float(d["b"]),
            c_alpha=float(d["c_alpha"]),
            c_alpha_center=float(d.get("c_alpha_center", float("nan"))),
            residual=float(d.get("residual", float("nan"))),
            extra=dict(d.get("extra", {})),
        )


def solve_equilibrium(alpha: float, n: int) -> EquilibriumSolution:
    """Aspect ratio, semi-axes and EL constant of the minimising spheroid."""
    p = EnergyParams(n, alpha).require_solvable()
    t = solve_aspect_ratio(p.alpha, p.n)
    if p.alpha == 0.0:
        bn = float(p.n - 2)
    else:
        bn = b_power(t, p.alpha, p.n)
    if not bn > 0:
        raise DomainError(f"b^n = {bn} is not positive; stationarity solve is inconsistent")
    b = bn ** (1.0 / p.n)
    a = b * math.sqrt(t)
    sol = EquilibriumSolution(p, t, a, b, c_alpha=float("nan"))
    sol.c_alpha_center = potentials.center_value(sol.spheroid, p.alpha)
    sol.c_alpha = potentials.el_constant(sol)
    sol.residual = abs(stationarity_f(t, p.alpha, p.n))
    return sol


def limiting_equilibrium(n: int) -> tuple[float, float]:
    """``(t*, b*)``: the alpha -> -1+ limit of the equilibrium spheroid."""
    n = check_dimension(n)

    def g(t):
        return stationarity_f(t, -1.0, n)

    if g(1.0 + 1e-9) >= 0:
        raise BracketError("F(t, -1) is not negative just above t = 1")
    hi = 2.0
    while g(hi) <= 0:
        hi *= 2.0
        if hi > _T_CAP:
            raise BracketError("no root of F(t, -1) found")
    t_star = _polish(g, _root(g, 1.0 + 1e-9, hi))
    b_star = t_star ** (-1.0 / (2 * n)) * (n - 3 + math.sqrt(t_star) * h(t_star, n, "auto")) ** (1.0 / n)
    return t_star, b_star


def limit_convergence_table(n: int, eps=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5)) -> list[dict]:
    """t(-1 + eps) and its distance to t* for a decreasing sequence of eps."""
    t_star, b_star = limiting_equilibrium(n)
    rows = []
    for e in eps:
        sol = solve_equilibrium(-1.0 + e, n)
        rows.append(
            {"eps": e, "t": sol.t, "b": sol.b, "t_gap": abs(sol.t - t_star), "b_gap": abs(sol.b - b_star)}
        )
    return rows


def sign_changes(alpha: float, n: int, grid=None) -> int:
    """Number of sign changes of F(., alpha) on a log-spaced grid."""
    if grid is None:
        grid = np.logspace(-6, 6, 1000)
    v = np.sign([stationarity_f(t, alpha, n) for t in grid])
    v = v[v != 0]
    return int(np.sum(v[1:] != v[:-1]))
