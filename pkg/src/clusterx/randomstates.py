"""Random transforms and states for property checks."""
from __future__ import annotations

import numpy as np

from . import gaussian as gs
from .metrics import SingleModeGaussian


def random_orthogonal(k: int, rng: np.random.Generator) -> np.ndarray:
    q, rr = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(rr))


def random_transform(n: int, rng: np.random.Generator, steps: int = 4, max_r: float = 0.6) -> gs.SymplecticTransform:
    """Composition of ``steps`` random squeezers, rotations, splitters, permutations and displacements."""
    t = gs.identity(n)
    for _ in range(steps):
        kind = rng.integers(5)
        if kind == 0:
            part = gs.squeezer(n, int(rng.integers(n)), float(rng.uniform(0, max_r)), "XY"[rng.integers(2)])
        elif kind == 1:
            part = gs.rotation(n, int(rng.integers(n)), float(rng.uniform(-np.pi, np.pi)))
        elif kind == 2 and n > 1:
            i, j = rng.choice(n, 2, replace=False)
            part = gs.beamsplitter(n, int(i), int(j), random_orthogonal(2, rng))
        elif kind == 3:
            part = gs.permutation(rng.permutation(n))
        else:
            part = gs.displacement(rng.normal(0, 2, 2 * n))
        t = t.then(part)
    return t


def random_state(n: int, rng: np.random.Generator, pure: bool = False, max_r: float = 0.6) -> gs.GaussianState:
    """Random valid state: thermal (or vacuum) noise pushed through a random transform."""
    nu = np.ones(n) if pure else rng.uniform(1.0, 3.0, n)
    base = gs.GaussianState(np.zeros(2 * n), np.diag(np.repeat(nu, 2)))
    return gs.apply(base, random_transform(n, rng, max_r=max_r))


def random_single_mode(rng: np.random.Generator) -> SingleModeGaussian:
    st = random_state(1, rng)
    return SingleModeGaussian(st.cov, st.mean)
