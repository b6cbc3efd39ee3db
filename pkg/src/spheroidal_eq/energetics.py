"""Euler-Lagrange verification, energies of spheroids and a Parseval check."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from . import potentials as pot
from .exceptions import BudgetWarning, DomainError
from .kernel import EnergyParams, fourier_prefactor, w_alpha, w_hat_alpha
from .oracle import sphere_area
from .potentials import Spheroid
from .sampling import stream, uniform_ball, unit_directions

log = logging.getLogger(__name__)

Z_MAX_FACTOR = 10.0


@dataclass
class ELReport:
    params: dict
    c_alpha: float
    interior_max_abs_dev: float
    interior_rel_dev: float
    interior_mean_constant: float
    exterior_min_slack: float
    derivative_min: float
    smoke_min_slack: float = float("nan")
    grids: dict = field(default_factory=dict)

    def passed(self, tol: float = 1e-6, slack_tol: float = 1e-8, deriv_tol: float = 1e-10) -> bool:
        return (
            self.interior_rel_dev <= tol
            and self.exterior_min_slack >= -slack_tol
            and self.derivative_min >= -deriv_tol
        )

    def to_dict(self) -> dict:
        return asdict(self)


def _interior_points(s: Spheroid, n_points: int, seed: int) -> np.ndarray:
    # scrambled Sobol points pushed into the unit ball, then scaled
    m = int(2 ** math.ceil(math.log2(max(n_points, 2))))
    u = qmc.Sobol(d=s.n + 1, scramble=True, seed=seed).random(m)
    from scipy.special import ndtri

    g = ndtri(np.clip(u[:, : s.n], 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1)[:, None]
    x = g * u[:, s.n : s.n + 1] ** (1.0 / s.n)
    x[:, 0] *= s.a
    x[:, 1:] *= s.b
    return x


def verify_el1(sol, n_points: int = 1024, seed: int = 0) -> dict:
    """Max deviation of ``phi_alpha + |x|^2/2`` from the EL constant inside."""
    s = sol.spheroid
    alpha = sol.params.alpha
    x = _interior_points(s, n_points, seed)
    v = pot.phi_alpha_inside(x, s, alpha) + 0.5 * np.sum(x * x, axis=1)
    dev = np.abs(v - sol.c_alpha)
    return {
        "interior_max_abs_dev": float(dev.max()),
        "interior_rel_dev": float(dev.max() / abs(sol.c_alpha)),
        "interior_mean_constant": float(v.mean()),
        "interior_points": int(len(x)),
    }


def _ball_el2(sol, z):
    # ball of radius R: outside phi_0 = r^(2-n) (Newton), psi = 0 when alpha = 0
    n = sol.params.n
    r = z * sol.a
    g = r ** (2 - n) + 0.5 * r * r - sol.c_alpha
    # d/dr of r^(1-n) ( -(n-2) r^(1-n) + r ) / r  -> derivative of g'(r)/r
    dd = (n - 2) * n * r ** (-n - 1)
    return g, dd


def verify_el2(
    sol,
    n_z: int = 400,
    z_max_factor: float = Z_MAX_FACTOR,
    smoke_points: int = 64,
    seed: int = 0,
) -> dict:
    """Minimum slack of ``A`` and ``A + B`` over ``[a/c, z_max]`` plus curvature signs."""
    s = sol.spheroid
    alpha = sol.params.alpha
    out = {}
    if s.degenerate:
        if alpha != 0.0:
            raise DomainError("EL-2 profile needs a non-degenerate spheroid for alpha != 0")
        z = np.geomspace(1.0, z_max_factor, n_z)
        g, dd = _ball_el2(sol, z)
        out.update(exterior_min_slack=float(g.min()), derivative_min=float(dd.min()))
        out["z_grid"] = {"kind": "radius/R", "min": 1.0, "max": z_max_factor, "count": n_z}
    else:
        z0 = s.a / s.c
        z = z0 * np.geomspace(1.0, z_max_factor, n_z)
        prof = np.array([pot.exterior_profile(zi, s, alpha) for zi in z])
        slack = np.minimum(prof[:, 0], prof[:, 0] + prof[:, 1]) - sol.c_alpha
        d_a, d_ab = pot.profile_curvatures(z, s, alpha)
        out.update(
            exterior_min_slack=float(slack.min()),
            derivative_min=float(min(d_a.min(), d_ab.min())),
            boundary_A=float(prof[0, 0]),
            boundary_B=float(prof[0, 1]),
        )
        out["z_grid"] = {"kind": "spheroidal z", "min": float(z0), "max": float(z[-1]), "count": n_z}
    log.debug(
        "far field beyond z_max: potential decays to 0 while |x|^2/2 grows, so the slack stays positive"
    )
    if smoke_points:
        out["smoke_min_slack"] = _smoke(sol, smoke_points, seed)
    return out


def _smoke(sol, count, seed):
    # coarse Cartesian check on random exterior points out to 3x the spheroid
    s = sol.spheroid
    rng = stream(seed, 7)
    w = unit_directions(rng, count, s.n)
    # boundary radius along w, scaled by a factor in [1, 3]
    rb = 1.0 / np.sqrt(w[:, 0] ** 2 / s.a**2 + np.sum(w[:, 1:] ** 2, axis=1) / s.b**2)
    x = w * (rb * (1.0 + 2.0 * rng.random(count)))[:, None]
    v = pot.phi_alpha_outside(x, s, sol.params.alpha, "lambda" if s.degenerate else "spheroidal")
    return float(np.min(v + 0.5 * np.sum(x * x, axis=1) - sol.c_alpha))


def el_report(sol, n_points: int = 1024, n_z: int = 400, smoke_points: int = 64, seed: int = 0) -> ELReport:
    e1 = verify_el1(sol, n_points, seed)
    e2 = verify_el2(sol, n_z=n_z, smoke_points=smoke_points, seed=seed)
    return ELReport(
        params={"n": sol.params.n, "alpha": sol.params.alpha, "t": sol.t, "a": sol.a, "b": sol.b},
        c_alpha=sol.c_alpha,
        interior_max_abs_dev=e1["interior_max_abs_dev"],
        interior_rel_dev=e1["interior_rel_dev"],
        interior_mean_constant=e1["interior_mean_constant"],
        exterior_min_slack=e2["exterior_min_slack"],
        derivative_min=e2["derivative_min"],
        smoke_min_slack=e2.get("smoke_min_slack", float("nan")),
        grids={"interior": {"kind": "scrambled Sobol", "count": e1["interior_points"]}, "z": e2["z_grid"]},
    )


# ----------------------------------------------------------------- energies


def second_moment(s: Spheroid) -> float:
    """Mean of |x|^2 under the uniform measure on the spheroid."""
    return (s.a**2 + (s.n - 1) * s.b**2) / (s.n + 2)


def interaction_energy(s: Spheroid, alpha: float) -> float:
    """Exact double integral of W_alpha against the uniform measure (closed form)."""
    c0, c1, c2 = pot.interior_coefficients(s, alpha)
    return c0 + (c1 * s.a**2 + c2 * (s.n - 1) * s.b**2) / (s.n + 2)


def spheroid_energy(s: Spheroid, alpha: float) -> float:
    return interaction_energy(s, alpha) + second_moment(s)


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    stderr: float
    interaction: float
    confinement: float
    samples: int
    method: str


def _pair_samples(s, alpha, ball_x, ball_y):
    # W_alpha(x - y) for independent uniform pairs (affine images of ball draws)
    scale = np.full(s.n, s.b)
    scale[0] = s.a
    return w_alpha((ball_x - ball_y) * scale, EnergyParams(s.n, alpha))


def _ray_samples(s, alpha, ball_x, dirs):
    # x uniform in s, w uniform direction; integrate W along the full line through x
    scale = np.full(s.n, s.b)
    scale[0] = s.a
    x = ball_x * scale
    d = 1.0 / scale**2
    out = np.zeros(len(x))
    for sign in (1.0, -1.0):
        w = sign * dirs
        qa = np.sum(w * w * d, axis=1)
        qb = 2.0 * np.sum(w * x * d, axis=1)
        qc = np.sum(x * x * d, axis=1) - 1.0
        disc = np.maximum(qb * qb - 4 * qa * qc, 0.0)
        r_hi = np.maximum((-qb + np.sqrt(disc)) / (2 * qa), 0.0)
        out += 0.5 * r_hi**2
    kern = 1.0 + alpha * dirs[:, 0] ** 2
    return 0.5 * kern * out * sphere_area(s.n) / s.volume


def total_energy(
    s: Spheroid,
    alpha: float,
    n_samples: int = 10**6,
    seed: int = 0,
    method: str = "rays",
    target: float | None = None,
) -> EnergyEstimate:
    """Monte-Carlo estimate of ``I_alpha`` for the uniform measure on ``s``.

    ``method='pairs'`` averages ``W_alpha(x - y)`` over independent uniform
    pairs (finite variance only for n = 3).  ``method='rays'`` pairs a
    uniform point ``x`` with a random direction and integrates the kernel
    exactly along the chord through ``x``; the estimator is bounded.
    The confinement term is the exact second moment.
    """
    g = _energy_samples(s, alpha, n_samples, seed, method)
    mean = float(g.mean())
    err = float(g.std(ddof=1) / math.sqrt(len(g)))
    if target is not None and err > target:
        warnings.warn(f"energy error {err:.3g} exceeds requested {target:.3g}", BudgetWarning, stacklevel=2)
    m2 = second_moment(s)
    return EnergyEstimate(mean + m2, err, mean, m2, len(g), method)


def _energy_samples(s, alpha, n_samples, seed, method):
    rng = stream(seed, 11)
    bx = uniform_ball(rng, n_samples, s.n)
    if method == "pairs":
        return _pair_samples(s, alpha, bx, uniform_ball(rng, n_samples, s.n))
    if method == "rays":
        return _ray_samples(s, alpha, bx, unit_directions(rng, n_samples, s.n))
    raise ValueError(f"unknown energy method {method!r}")


def energy_difference(
    s1: Spheroid, s2: Spheroid, alpha: float, n_samples: int = 10**6, seed: int = 0, method: str = "rays"
) -> tuple[float, float]:
    """``I(s2) - I(s1)`` and its standard error, using common random numbers.

    Both spheroids are sampled as affine images of the same unit-ball draws,
    so most of the sampling noise cancels in the difference.
    """
    g1 = _energy_samples(s1, alpha, n_samples, seed, method)
    g2 = _energy_samples(s2, alpha, n_samples, seed, method)
    d = g2 - g1
    diff = float(d.mean()) + second_moment(s2) - second_moment(s1)
    return diff, float(d.std(ddof=1) / math.sqrt(len(d)))


def perturbed_solution(sol, factor: float = 1.1):
    """Same ``b``, aspect ratio ``t * factor``; the constant is the centre value.

    Not an equilibrium: used as a negative control for the EL checks.
    """
    from .equilibrium_solver import EquilibriumSolution

    t = sol.t * factor
    a = sol.b * math.sqrt(t)
    s = Spheroid(a, sol.b, sol.params.n)
    c0 = pot.center_value(s, sol.params.alpha)
    return EquilibriumSolution(sol.params, t, a, sol.b, c0, c0, float("nan"), {"perturbed_by": factor})


def random_competitors(sol, count: int = 10, seed: int = 0, spread: float = 0.3) -> list[Spheroid]:
    """Spheroids with log-uniformly perturbed ``a`` and ``b`` (factors in ``exp(+-spread)``)."""
    rng = stream(seed, 13)
    f = np.exp(rng.uniform(-spread, spread, size=(count, 2)))
    return [Spheroid(sol.a * fa, sol.b * fb, sol.params.n) for fa, fb in f]


def constant_relations(sol) -> dict:
    """Both candidate identities linking the EL constant and the minimal energy.

    Integrating the interior EL identity against the measure gives
    ``C = I - M2/2``; the other candidate is ``C = 2I - M2/2``.  Neither is
    used to compute ``C``; their residuals are only reported.
    """
    s = sol.spheroid
    energy = spheroid_energy(s, sol.params.alpha)
    m2 = second_moment(s)
    return {
        "energy": energy,
        "second_moment": m2,
        "c_alpha": sol.c_alpha,
        "integrated_el_residual": sol.c_alpha - (energy - 0.5 * m2),
        "doubled_energy_residual": sol.c_alpha - (2.0 * energy - 0.5 * m2),
    }


# ------------------------------------------------------------------ Parseval


def cube_integral(f, degree: float, n: int, order: int = 24) -> float:
    """Integral over [-1/2, 1/2]^n of a function homogeneous of ``degree`` (> -n).

    The cube is cut into 2n pyramids with apex at the origin; homogeneity
    reduces each to a smooth (n-1)-dimensional integral over a face.
    """
    u, wu = np.polynomial.legendre.leggauss(order)
    grids = np.meshgrid(*([u] * (n - 1)), indexing="ij")
    v = np.stack([g.ravel() for g in grids], axis=1)
    wts = np.ones(len(v))
    for j in range(n - 1):
        wts = wts * wu[np.searchsorted(u, v[:, j])]
    radial = 0.5 ** (degree + n) / (degree + n)
    total = 0.0
    for k in range(n):
        for sign in (1.0, -1.0):
            pts = np.insert(v, k, sign, axis=1)
            total += float(np.sum(f(pts) * wts))
    return total * radial


@dataclass(frozen=True)
class ParsevalResult:
    real_side: float
    fourier_side: float
    rel_diff: float
    grid: tuple
    box: float


def parseval_check(
    masses: np.ndarray,
    spacing: float,
    alpha: float,
    pad_factor: int = 4,
    bound: float = 1e-2,
) -> ParsevalResult:
    """Interaction energy of a grid measure in real space and in Fourier space.

    ``masses`` holds the (possibly signed) mass of each cell of a uniform
    grid with the given spacing.  The real side is the discrete double sum
    with the diagonal replaced by the cell average of the kernel; the
    Fourier side is a Riemann sum of ``W_hat |nu_hat|^2`` over the
    frequencies of a zero-padded box ``pad_factor`` times larger, with the
    zero-frequency cell integrated exactly.
    """
    masses = np.asarray(masses, dtype=float)
    n = masses.ndim
    p = EnergyParams(n, alpha)
    shape = masses.shape
    hh = float(spacing)

    # real side: linear convolution through zero padding to twice the grid
    big = tuple(2 * m for m in shape)
    idx = [np.fft.fftfreq(m, 1.0 / m) for m in big]
    offs = np.stack(np.meshgrid(*idx, indexing="ij"), axis=-1).reshape(-1, n) * hh
    kern = np.empty(len(offs))
    nz = np.any(offs != 0, axis=1)
    kern[nz] = w_alpha(offs[nz], p)
    # mean of W over one cell: h^(2-n) * cube integral / h^n * h^n
    kern[~nz] = hh ** (2 - n) * cube_integral(lambda z: w_alpha(z, p), 2 - n, n)
    kern = kern.reshape(big)
    axes = tuple(range(n))
    pot_grid = np.fft.irfftn(np.fft.rfftn(kern) * np.fft.rfftn(masses, big, axes), big, axes)
    sl = tuple(slice(0, m) for m in shape)
    real_side = float(np.sum(pot_grid[sl] * masses))

    # Fourier side: continuous transform nu_hat(xi) ~ sum_j m_j exp(-2 pi i xi x_j)
    box = tuple(pad_factor * m for m in shape)
    if len(set(box)) != 1:
        raise DomainError("parseval_check needs a cubic grid")
    length = box[0] * hh
    spec = (np.abs(np.fft.fftn(masses, box, axes)) ** 2).ravel()
    fgrid = np.meshgrid(*[np.fft.fftfreq(m, hh) for m in box], indexing="ij")
    freqs = np.stack([g.ravel() for g in fgrid], axis=1)
    rho2 = np.sum(freqs * freqs, axis=1)
    # subtract |nu_hat(0)|^2 exp(-pi rho^2) so the integrand stays bounded at 0;
    # the subtracted Gaussian term is integrated in closed form
    g0 = float(np.sum(masses)) ** 2
    gauss = g0 * np.exp(-np.pi * rho2)
    integrand = np.zeros(len(freqs))
    nz = rho2 > 0
    integrand[nz] = w_hat_alpha(freqs[nz], p) * (spec[nz] - gauss[nz])
    fourier_side = float(np.sum(integrand)) / length**n + g0 * gaussian_w_hat_integral(n, alpha)
    rel = abs(real_side - fourier_side) / max(abs(real_side), abs(fourier_side), 1e-300)
    if rel > bound:
        warnings.warn(
            f"Parseval sides differ by {rel:.3g} (> {bound:g}); grid too coarse?", BudgetWarning, stacklevel=2
        )
    return ParsevalResult(real_side, fourier_side, rel, shape, float(length))


def gaussian_w_hat_integral(n: int, alpha: float) -> float:
    """Integral of ``W_hat_alpha(xi) exp(-pi |xi|^2)`` over R^n.

    The angular means of ``xi_1^2 / |xi|^2`` and of the transverse part are
    ``1/n`` and ``(n-1)/n``; the radial part is a Gamma integral.
    """
    ang = ((n - 2 - alpha) + (n - 2 + alpha) * (n - 1)) / n
    radial = math.gamma((n - 2) / 2) / (2 * math.pi ** ((n - 2) / 2))
    return fourier_prefactor(n) * ang * sphere_area(n) * radial


def _grid(size, n, radius):
    hh = 2.0 * radius / size
    c = (np.arange(size) + 0.5) * hh - radius
    return np.meshgrid(*([c] * n), indexing="ij"), hh


def _bump(grids, center, radius):
    r2 = sum((g - c) ** 2 for g, c in zip(grids, center)) / radius**2
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(r2 < 1, np.exp(-1.0 / np.maximum(1 - r2, 1e-300)), 0.0)


def smooth_bump(size: int, n: int = 3, radius: float = 1.0, modulation: float = 0.0, phase: float = 0.0):
    """A C-infinity bump sampled on a cubic grid covering its support.

    Returns ``(masses, spacing)``.  Masses sum to one unless a modulation
    ``cos(2 pi k x_1 - phase)`` is applied, which makes the measure signed;
    ``phase = pi/2`` gives an odd density with zero total mass.
    """
    grids, hh = _grid(size, n, radius)
    f = _bump(grids, [0.0] * n, radius)
    f /= f.sum()
    if modulation:
        f = f * np.cos(2 * np.pi * modulation * grids[0] - phase)
    return f, hh


def two_bump_difference(size: int, n: int = 3, shift: float = 0.4, width: float = 0.5):
    """Difference of two unit-mass bumps displaced along different axes."""
    grids, hh = _grid(size, n, 1.0)
    c1 = [0.0] * n
    c2 = [0.0] * n
    c1[0] = shift
    c2[1] = -shift
    f1 = _bump(grids, c1, width)
    f2 = _bump(grids, c2, width * 0.8)
    return f1 / f1.sum() - f2 / f2.sum(), hh


def radial_coulomb_energy(profile, radius: float, order: int = 4000) -> float:
    """Reference Coulomb (n = 3, alpha = 0) energy of a radial density by shells.

    ``profile(r)`` is the unnormalised density; the result is normalised to
    unit mass.  Uses ``E = int 4 pi r^2 rho(r) phi(r) dr`` with
    ``phi(r) = M(r)/r + int_r^R 4 pi s rho(s) ds``.
    """
    r = (np.arange(order) + 0.5) * radius / order
    dr = radius / order
    rho = profile(r)
    shell = 4 * np.pi * r**2 * rho * dr
    mass = shell.sum()
    shell /= mass
    m_in = np.cumsum(shell) - 0.5 * shell
    outer = np.cumsum((shell / r)[::-1])[::-1] - 0.5 * shell / r
    return float(np.sum(shell * (m_in / r + outer)))
