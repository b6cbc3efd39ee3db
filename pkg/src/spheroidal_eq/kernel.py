"""The anisotropic Coulomb kernel, its gradient and its Fourier transform.

``W_alpha(x) = |x|^(2-n) + alpha * x_1^2 / |x|^n`` in dimension ``n >= 3``.
Every function accepts a single point of shape ``(n,)`` or a batch of shape
``(m, n)``; values at the origin are ``+inf`` rather than errors so that
energies of coincident particles come out infinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .special_functions import check_dimension


@dataclass(frozen=True)
class EnergyParams:
    """Dimension and anisotropy strength of one member of the energy family."""

    n: int = 3
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n", check_dimension(self.n))
        alpha = float(self.alpha)
        if not math.isfinite(alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def solvable(self) -> bool:
        return -1.0 < self.alpha <= self.n - 2

    def require_solvable(self):
        if not self.solvable:
            raise DomainError(
                f"alpha must lie in (-1, {self.n - 2}] for n={self.n}, got {self.alpha}"
            )
        return self


def gamma_half(n: int) -> float:
    """Gamma(n/2) for integer n >= 1 by the half-integer recursion."""
    if n < 1 or int(n) != n:
        raise DomainError("gamma_half needs a positive integer")
    g = 1.0 if n % 2 == 0 else math.sqrt(math.pi)
    k = 2 if n % 2 == 0 else 1
    while k < n:
        g *= k / 2
        k += 2
    return g


def fourier_prefactor(n: int) -> float:
    return math.pi ** (n / 2 - 2) / (2.0 * gamma_half(n))


def _as_points(x, n=None):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if n is not None and x.shape[1] != n:
        raise DomainError(f"points must have {n} coordinates, got {x.shape[1]}")
    return x, single


def _out(v, single):
    return v[0] if single else v


def w_alpha(x, p: EnergyParams):
    """Kernel value; ``+inf`` at the origin."""
    x, single = _as_points(x, p.n)
    r2 = np.einsum("ij,ij->i", x, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (r2 + p.alpha * x[:, 0] ** 2) * r2 ** (-p.n / 2)
    v = np.where(r2 > 0, v, np.inf)
    return _out(v, single)


def w_alpha_rewritten(x, p: EnergyParams):
    """Same kernel written as |x|^-n ((1+alpha) x_1^2 + sum_{i>=2} x_i^2)."""
    x, single = _as_points(x, p.n)
    r2 = np.einsum("ij,ij->i", x, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = ((1 + p.alpha) * x[:, 0] ** 2 + np.sum(x[:, 1:] ** 2, axis=1)) * r2 ** (-p.n / 2)
    return _out(np.where(r2 > 0, v, np.inf), single)


def grad_w_alpha(x, p: EnergyParams):
    """Analytic gradient; raises :class:`DomainError` at the origin."""
    x, single = _as_points(x, p.n)
    r2 = np.einsum("ij,ij->i", x, x)
    if np.any(r2 == 0):
        raise DomainError("kernel gradient is undefined at the origin")
    n = p.n
    rn = r2 ** (-n / 2)
    x1 = x[:, 0]
    g = (-(n - 2) * rn)[:, None] * x
    g += p.alpha * (-n * x1**2 * rn / r2)[:, None] * x
    g[:, 0] += p.alpha * 2 * x1 * rn
    return _out(g, single)


def w_hat_alpha(xi, p: EnergyParams):
    """Pointwise Fourier transform (convention exp(-2 pi i x.xi)) for xi != 0."""
    xi, single = _as_points(xi, p.n)
    k2 = np.einsum("ij,ij->i", xi, xi)
    if np.any(k2 == 0):
        raise DomainError("Fourier transform density is undefined at xi = 0")
    n = p.n
    num = (n - 2 - p.alpha) * xi[:, 0] ** 2 + (n - 2 + p.alpha) * (k2 - xi[:, 0] ** 2)
    return _out(fourier_prefactor(n) * num / k2**2, single)


def w_minus_one(x, n: int):
    """The alpha = -1 kernel (x_2^2 + ... + x_n^2) / |x|^n; ``+inf`` at 0."""
    n = check_dimension(n)
    x, single = _as_points(x, n)
    r2 = np.einsum("ij,ij->i", x, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.sum(x[:, 1:] ** 2, axis=1) * r2 ** (-n / 2)
    return _out(np.where(r2 > 0, v, np.inf), single)


def w_hat_star(xi, n: int):
    """Fourier density of the alpha -> -1 limit functional."""
    n = check_dimension(n)
    xi, single = _as_points(xi, n)
    k2 = np.einsum("ij,ij->i", xi, xi)
    if np.any(k2 == 0):
        raise DomainError("Fourier transform density is undefined at xi = 0")
    num = (n - 1) * xi[:, 0] ** 2 + (n - 3) * (k2 - xi[:, 0] ** 2)
    return _out(fourier_prefactor(n) * num / k2**2, single)


def comparability_constant(alpha: float) -> float:
    """C(alpha) with W_0 / C <= W_alpha <= C W_0, valid for alpha > -1."""
    if alpha <= -1:
        raise DomainError("kernel comparability needs alpha > -1")
    return max(1.0 + alpha, 1.0) * max(1.0, 1.0 / (1.0 + alpha))
