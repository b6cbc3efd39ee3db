"""Seeded random streams and uniform samplers.

Streams are Philox (counter-based) generators keyed by ``(seed, *keys)`` so
that a task's draws do not depend on how many other tasks ran before it.
"""
from __future__ import annotations

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), *map(int, keys)])
    return np.random.Generator(np.random.Philox(ss))


def unit_directions(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    w = rng.standard_normal((size, n))
    w /= np.linalg.norm(w, axis=1)[:, None]
    return w


def uniform_ball(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    w = unit_directions(rng, size, n)
    return w * rng.random(size)[:, None] ** (1.0 / n)


def uniform_spheroid(rng: np.random.Generator, size: int, a: float, b: float, n: int) -> np.ndarray:
    scale = np.full(n, float(b))
    scale[0] = a
    return uniform_ball(rng, size, n) * scale
