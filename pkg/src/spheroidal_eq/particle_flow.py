"""N-particle gradient flow for the discrete anisotropic energy."""
from __future__ import annotations

import logging
import math
import os
import warnings
from dataclasses import asdict, dataclass, replace

import numba
import numpy as np

from .exceptions import DomainError, StagnationWarning
from .kernel import EnergyParams
from .sampling import stream, uniform_ball

log = logging.getLogger(__name__)

THREADS_ENV = "SPHEROIDAL_EQ_THREADS"
MIN_STEP = 1e-14
CONV_WINDOW = 100
CONV_TOL = 1e-9

# the TBB layer is tried first by default and may be too old; workqueue is always present
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"


def configure_threads(count: int | None = None) -> int:
    """Set the numba thread pool size from ``count`` or the environment."""
    if count is None:
        raw = os.environ.get(THREADS_ENV)
        if not raw:
            return numba.get_num_threads()
        try:
            count = int(raw)
        except ValueError as exc:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if count < 1:
        raise DomainError("thread count must be positive")
    count = min(count, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(count)
    return count


@numba.njit(cache=True)
def _energy_grad_serial(x, alpha):
    npts, n = x.shape
    grad = np.zeros_like(x)
    e = 0.0
    for i in range(npts):
        for j in range(i + 1, npts):
            r2 = 0.0
            for k in range(n):
                d = x[i, k] - x[j, k]
                r2 += d * d
            if r2 == 0.0:
                return np.inf, grad
            d1 = x[i, 0] - x[j, 0]
            rn = r2 ** (-0.5 * n)
            w = (r2 + alpha * d1 * d1) * rn
            e += 2.0 * w
            for k in range(n):
                d = x[i, k] - x[j, k]
                g = 2.0 * d * rn - n * w / r2 * d
                if k == 0:
                    g += 2.0 * alpha * d1 * rn
                grad[i, k] += 2.0 * g
                grad[j, k] -= 2.0 * g
    nn = float(npts) * npts
    conf = 0.0
    for i in range(npts):
        for k in range(n):
            conf += x[i, k] ** 2
            grad[i, k] = grad[i, k] / nn + 2.0 * x[i, k] / npts
    return e / nn + conf / npts, grad


@numba.njit(cache=True, parallel=True)
def _energy_grad_parallel(x, alpha):
    # each row is summed in full by one thread; the energy total is a
    # parallel reduction whose order is not fixed
    npts, n = x.shape
    grad = np.zeros_like(x)
    rows = np.zeros(npts)
    for i in numba.prange(npts):
        acc = 0.0
        for j in range(npts):
            if j == i:
                continue
            r2 = 0.0
            for k in range(n):
                d = x[i, k] - x[j, k]
                r2 += d * d
            if r2 == 0.0:
                acc = np.inf
                continue
            d1 = x[i, 0] - x[j, 0]
            rn = r2 ** (-0.5 * n)
            w = (r2 + alpha * d1 * d1) * rn
            acc += w
            for k in range(n):
                d = x[i, k] - x[j, k]
                g = 2.0 * d * rn - n * w / r2 * d
                if k == 0:
                    g += 2.0 * alpha * d1 * rn
                grad[i, k] += 2.0 * g
        rows[i] = acc
    nn = float(npts) * npts
    e = 0.0
    for i in numba.prange(npts):
        c = 0.0
        for k in range(n):
            c += x[i, k] ** 2
        e += rows[i] / nn + c / npts
    for i in numba.prange(npts):
        for k in range(n):
            grad[i, k] = grad[i, k] / nn + 2.0 * x[i, k] / npts
    return e, grad


def energy_and_gradient(points, alpha: float, mode: str = "reproducible"):
    x = np.ascontiguousarray(points, dtype=float)
    if mode == "reproducible":
        return _energy_grad_serial(x, float(alpha))
    if mode == "fast":
        return _energy_grad_parallel(x, float(alpha))
    raise DomainError(f"mode must be 'reproducible' or 'fast', got {mode!r}")


@dataclass(frozen=True)
class ParticleConfig:
    points: np.ndarray
    params: EnergyParams
    step: float = 0.05
    seed: int = 42
    iteration: int = 0
    energy: float = float("nan")
    mode: str = "reproducible"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.params.n:
            raise DomainError(f"points must have shape (N, {self.params.n})")
        if not self.step > 0:
            raise DomainError("step must be positive")
        object.__setattr__(self, "points", pts)

    @classmethod
    def initial(cls, n_particles: int, params: EnergyParams, seed: int = 42, step: float = 0.05, mode="reproducible"):
        """Seeded uniform samples from the unit ball."""
        if n_particles < 1:
            raise DomainError("need at least one particle")
        pts = uniform_ball(stream(seed, 3), n_particles, params.n)
        return cls(pts, params, step, seed, 0, discrete_energy_points(pts, params), mode)

    @property
    def n_particles(self) -> int:
        return self.points.shape[0]


def discrete_energy_points(points, params: EnergyParams) -> float:
    return float(energy_and_gradient(points, params.alpha)[0])


def discrete_energy(cfg: ParticleConfig) -> float:
    """``(1/N^2) sum_{i != j} W(x_i - x_j) + (1/N) sum |x_i|^2``; +inf on coincidence."""
    return discrete_energy_points(cfg.points, cfg.params)


def flow_step(cfg: ParticleConfig, grow: float = 1.1, grad=None) -> ParticleConfig:
    """One accepted gradient step with backtracking.

    The update is ``x <- x - step * N * grad``; the factor N makes the step
    size independent of the particle count.  The step is halved until the
    energy does not increase and multiplied by ``grow`` after acceptance.
    """
    e0 = cfg.energy if math.isfinite(cfg.energy) else None
    if e0 is None or grad is None:
        e0, grad = energy_and_gradient(cfg.points, cfg.params.alpha, cfg.mode)
    if not math.isfinite(e0):
        raise DomainError("flow_step needs a configuration with finite energy")
    tau = cfg.step
    npts = cfg.n_particles
    while tau >= MIN_STEP:
        trial = cfg.points - tau * npts * grad
        e1, g1 = energy_and_gradient(trial, cfg.params.alpha, cfg.mode)
        if e1 <= e0:
            nxt = replace(cfg, points=trial, step=tau * grow, iteration=cfg.iteration + 1, energy=float(e1))
            object.__setattr__(nxt, "_grad", g1)
            return nxt
        tau *= 0.5
    warnings.warn(f"step underflow at iteration {cfg.iteration}", StagnationWarning, stacklevel=2)
    return replace(cfg, step=MIN_STEP, energy=float(e0))


@dataclass
class FlowResult:
    config: ParticleConfig
    energies: np.ndarray
    converged: bool
    stagnated: bool

    @property
    def steps(self) -> int:
        return self.config.iteration


def run_flow(
    cfg: ParticleConfig,
    max_iter: int = 10_000,
    tol: float = CONV_TOL,
    window: int = CONV_WINDOW,
    callback=None,
) -> FlowResult:
    """Iterate ``flow_step`` until the energy stalls or ``max_iter`` is reached.

    Converged means the relative energy decrease over the last ``window``
    accepted steps fell below ``tol``.
    """
    e0, grad = energy_and_gradient(cfg.points, cfg.params.alpha, cfg.mode)
    cfg = replace(cfg, energy=float(e0))
    energies = [float(e0)]
    converged = stagnated = False
    for _ in range(max_iter):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", StagnationWarning)
            nxt = flow_step(cfg, grad=grad)
        if caught:
            stagnated = True
            warnings.warn(str(caught[0].message), StagnationWarning, stacklevel=2)
            cfg = nxt
            break
        if nxt.energy > cfg.energy:  # pragma: no cover - backtracking contract
            raise AssertionError("energy increased on an accepted step")
        grad = nxt.__dict__.pop("_grad")
        cfg = nxt
        energies.append(cfg.energy)
        if callback is not None:
            callback(cfg)
        if len(energies) > window:
            old = energies[-window - 1]
            if (old - cfg.energy) <= tol * abs(old):
                converged = True
                break
    log.info("flow stopped after %d steps, energy %.12g", cfg.iteration, cfg.energy)
    return FlowResult(cfg, np.asarray(energies), converged, stagnated)


@dataclass(frozen=True)
class ShapeFit:
    t_hat: float
    b_hat: float
    center: tuple
    residual: float

    @property
    def a_hat(self) -> float:
        return self.b_hat * math.sqrt(self.t_hat)

    def to_dict(self) -> dict:
        return asdict(self)


def fit_shape(points) -> ShapeFit:
    """Second-moment fit of a uniform spheroid to a point cloud."""
    x = np.asarray(points, dtype=float)
    if x.ndim != 2:
        raise DomainError("points must be a 2-d array")
    npts, n = x.shape
    if npts < n + 1:
        raise DomainError(f"need at least n+1 = {n + 1} points, got {npts}")
    center = x.mean(axis=0)
    cov = np.cov(x, rowvar=False, bias=True)
    trans = np.diag(cov)[1:]
    mt = float(trans.mean())
    if not (mt > 0 and cov[0, 0] > 0):
        raise DomainError("degenerate covariance; points lie in a lower-dimensional set")
    residual = float(np.max(np.abs(trans - mt)) / mt)
    return ShapeFit(float(cov[0, 0] / mt), math.sqrt((n + 2) * mt), tuple(center.tolist()), residual)


def snapshot_rows(cfg: ParticleConfig) -> list[dict]:
    names = [f"x{k + 1}" for k in range(cfg.params.n)]
    return [dict(zip(names, row)) for row in cfg.points.tolist()]


def run_metadata(result: FlowResult) -> dict:
    cfg = result.config
    return {
        "seed": cfg.seed,
        "alpha": cfg.params.alpha,
        "n": cfg.params.n,
        "N": cfg.n_particles,
        "steps": cfg.iteration,
        "final_energy": cfg.energy,
        "final_step": cfg.step,
        "converged": result.converged,
        "stagnated": result.stagnated,
        "mode": cfg.mode,
        "shape_fit": fit_shape(cfg.points).to_dict(),
    }
