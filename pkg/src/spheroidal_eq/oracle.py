"""Brute-force evaluation of ``W_alpha * mu`` for a uniform spheroid.

Independent of the closed forms in :mod:`potentials`.  Three backends:

``rays``
    Monte-Carlo over directions.  Because ``W_alpha`` is homogeneous of
    degree ``2 - n``, integrating along the ray ``x + r w`` gives
    ``int W_alpha(w) (r_+^2 - r_-^2)/2 dw`` over the unit sphere, where
    ``[r_-, r_+]`` is the chord of the spheroid on that ray.  The integrand
    is bounded, so the variance is finite in every dimension.  Directions
    come in antithetic pairs ``(w, -w)``.
``volume``
    Plain Monte-Carlo over uniform points of the spheroid with antithetic
    pairs ``(y, -y)``.  Infinite variance for interior points when n >= 4.
``quadrature``
    Tensor Gauss-Legendre, n = 3 only.  Interior points use the ray form in
    polar angles about x (smooth, since the chord never degenerates);
    exterior points integrate over the spheroid in scaled spherical
    coordinates.  The error estimate is the difference to a coarser rule.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from scipy.optimize import brentq

from .exceptions import BudgetWarning, DomainError
from .kernel import EnergyParams, gamma_half, w_alpha
from .potentials import Spheroid
from .sampling import stream, uniform_spheroid, unit_directions

_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    stderr: float
    method: str
    evaluations: int


def sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2) / gamma_half(n)


def chord_squares(x, w, s: Spheroid) -> np.ndarray:
    """``(r_+^2 - r_-^2)/2`` for rays ``x + r w``, ``r >= 0``; zero on a miss."""
    d = np.full(s.n, 1.0 / s.b**2)
    d[0] = 1.0 / s.a**2
    qa = np.einsum("ij,ij,j->i", w, w, d)
    qb = 2.0 * (w @ (x * d))
    qc = float(np.sum(x * x * d)) - 1.0
    disc = qb * qb - 4.0 * qa * qc
    hit = disc > 0
    sq = np.sqrt(np.where(hit, disc, 0.0))
    r_hi = np.maximum((-qb + sq) / (2 * qa), 0.0)
    r_lo = np.maximum((-qb - sq) / (2 * qa), 0.0)
    return np.where(hit, 0.5 * (r_hi**2 - r_lo**2), 0.0)


def _rays(x, s, alpha, n_samples, seed):
    n = s.n
    scale = sphere_area(n) / s.volume
    pairs = max(n_samples // 2, 1)
    total = 0.0
    total2 = 0.0
    done = 0
    k = 0
    while done < pairs:
        m = min(_CHUNK, pairs - done)
        w = unit_directions(stream(seed, 1, k), m, n)
        kern = 1.0 + alpha * w[:, 0] ** 2
        g = 0.5 * kern * (chord_squares(x, w, s) + chord_squares(x, -w, s)) * scale
        total += g.sum()
        total2 += (g * g).sum()
        done += m
        k += 1
    mean = total / pairs
    var = max(total2 / pairs - mean * mean, 0.0)
    return mean, math.sqrt(var / max(pairs - 1, 1)), 2 * pairs


def _volume(x, s, alpha, n_samples, seed):
    p = EnergyParams(s.n, alpha)
    pairs = max(n_samples // 2, 1)
    total = 0.0
    total2 = 0.0
    done = 0
    k = 0
    while done < pairs:
        m = min(_CHUNK, pairs - done)
        y = uniform_spheroid(stream(seed, 2, k), m, s.a, s.b, s.n)
        g = 0.5 * (w_alpha(x - y, p) + w_alpha(x + y, p))
        total += g.sum()
        total2 += (g * g).sum()
        done += m
        k += 1
    mean = total / pairs
    var = max(total2 / pairs - mean * mean, 0.0)
    return mean, math.sqrt(var / max(pairs - 1, 1)), 2 * pairs


def _gl(m, lo, hi):
    u, wts = np.polynomial.legendre.leggauss(m)
    return 0.5 * (hi - lo) * u + 0.5 * (hi + lo), 0.5 * (hi - lo) * wts


def _quad_interior(x, s, alpha, m):
    u, wu = _gl(m, -1.0, 1.0)
    phi = 2 * math.pi * np.arange(2 * m) / (2 * m)
    U, P = np.meshgrid(u, phi, indexing="ij")
    st = np.sqrt(1 - U**2)
    w = np.stack([U, st * np.cos(P), st * np.sin(P)], axis=-1).reshape(-1, 3)
    g = (1.0 + alpha * w[:, 0] ** 2) * chord_squares(x, w, s)
    g = g.reshape(U.shape)
    return float(np.sum(wu[:, None] * g) * (2 * math.pi / (2 * m)) / s.volume)


def _nearest_on_surface(x, s):
    # y_i = x_i a_i^2 / (a_i^2 + mu), mu > 0 the root of sum (x_i a_i / (a_i^2 + mu))^2 = 1
    ax2 = np.array([s.a**2, s.b**2, s.b**2])

    def g(mu):
        return float(np.sum((x * np.sqrt(ax2) / (ax2 + mu)) ** 2)) - 1.0

    hi = float(np.linalg.norm(x)) * max(s.a, s.b) + 1.0
    mu = brentq(g, 0.0, hi, xtol=1e-15)
    return x * ax2 / (ax2 + mu)


def _graded(m, lo, hi, gap, toward_hi):
    # composite Gauss-Legendre with panels shrinking geometrically toward one end
    width = hi - lo
    cuts = [0.0]
    size = width / 2
    while size > gap / 4:
        cuts.append(width - size)
        size /= 2
    cuts.append(width)
    nodes, weights = [], []
    for c0, c1 in zip(cuts[:-1], cuts[1:]):
        u, wu = _gl(m, c0, c1)
        nodes.append(u)
        weights.append(wu)
    u = np.concatenate(nodes)
    wu = np.concatenate(weights)
    return (lo + u, wu) if toward_hi else (hi - u, wu)


def _quad_exterior(x, s, alpha, m):
    # unit-ball coordinates v = rho (cos th e + sin th (cos ph f + sin ph g)) with the
    # polar axis e through the surface point nearest to x; both rho -> 1 and th -> 0
    # are graded down to the gap, which resolves the near-singularity of the kernel
    p = EnergyParams(3, alpha)
    scale = np.array([s.a, s.b, s.b])
    near = _nearest_on_surface(x, s)
    e = near / scale
    e /= np.linalg.norm(e)
    f = np.cross(e, [1.0, 0, 0] if abs(e[0]) < 0.9 else [0, 1.0, 0])
    f /= np.linalg.norm(f)
    g = np.cross(e, f)
    gap = max(float(np.linalg.norm(x - near)) / max(s.a, s.b), 1e-12)
    rho, wr = _graded(m, 0.0, 1.0, gap, toward_hi=True)
    th, wt = _graded(m, 0.0, math.pi, gap, toward_hi=False)
    nphi = 2 * m
    ph = 2 * math.pi * np.arange(nphi) / nphi
    R, T, P = np.meshgrid(rho, th, ph, indexing="ij")
    st = np.sin(T)
    v = R[..., None] * (
        np.cos(T)[..., None] * e + st[..., None] * (np.cos(P)[..., None] * f + np.sin(P)[..., None] * g)
    )
    y = v * scale
    vals = w_alpha((x - y).reshape(-1, 3), p).reshape(R.shape) * R**2 * st
    wts = wr[:, None, None] * wt[None, :, None] * (2 * math.pi / nphi)
    return float(np.sum(vals * wts) * s.a * s.b**2 / s.volume)


def _quadrature(x, s, alpha, order):
    if s.n != 3:
        raise DomainError("the quadrature backend is implemented for n = 3 only")
    inside = bool(s.contains(x)[0])
    if inside:
        fine = _quad_interior(x, s, alpha, order)
        coarse = _quad_interior(x, s, alpha, (2 * order) // 3)
        return fine, abs(fine - coarse), 2 * order * order
    # exterior: ``order`` is split into panels of max(8, order // 6) nodes
    m = max(8, order // 6)
    fine = _quad_exterior(x, s, alpha, m)
    coarse = _quad_exterior(x, s, alpha, max(4, (2 * m) // 3))
    return fine, abs(fine - coarse), 0


def convolution_oracle(
    x,
    s: Spheroid,
    alpha: float,
    method: str = "rays",
    n_samples: int = 10**6,
    seed: int = 0,
    order: int = 96,
    target: float | None = None,
) -> OracleEstimate:
    """Estimate ``(1/|Omega|) int_Omega W_alpha(x - y) dy`` with an error bar.

    ``target`` is an optional requested error; exceeding it emits a
    :class:`BudgetWarning` rather than failing.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (s.n,):
        raise DomainError(f"x must be a single point with {s.n} coordinates")
    if method == "rays":
        v, e, k = _rays(x, s, alpha, n_samples, seed)
    elif method == "volume":
        v, e, k = _volume(x, s, alpha, n_samples, seed)
    elif method == "quadrature":
        v, e, k = _quadrature(x, s, alpha, order)
    else:
        raise ValueError(f"unknown oracle method {method!r}")
    if target is not None and e > target:
        warnings.warn(f"oracle error {e:.3g} exceeds requested {target:.3g}", BudgetWarning, stacklevel=2)
    return OracleEstimate(float(v), float(e), method, int(k))
