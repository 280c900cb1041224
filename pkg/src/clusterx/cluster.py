"""Linear four-mode cluster state built from four squeezed vacua.

Seed modes a1 and a4 are squeezed in Y, a2 and a3 in X. Modes a3 and a4 are
then rotated by -90 degrees and all four are mixed by one real orthogonal
network ``NETWORK`` to give the cluster modes b1..b4. With equal squeezing the
four nullifiers

    Y_b1 - Y_b2
    X_b1 + X_b2 + X_b3
    -Y_b2 + Y_b3 + Y_b4
    X_b3 - X_b4

depend only on squeezed seed quadratures and have variances
``2, 3, 3, 2`` times ``e^{-2r}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gaussian as gs
from .heisenberg import QuadratureCombo

_S2, _S10 = np.sqrt(2.0), np.sqrt(10.0)

NETWORK = np.array(
    [
        [_S2 / 2, _S10 / 5, _S10 / 10, 0.0],
        [-_S2 / 2, _S10 / 5, _S10 / 10, 0.0],
        [0.0, _S10 / 10, -_S10 / 5, _S2 / 2],
        [0.0, _S10 / 10, -_S10 / 5, -_S2 / 2],
    ]
)
SQUEEZE_AXES = ("Y", "X", "X", "Y")
PRE_ROTATIONS = (0.0, 0.0, -np.pi / 2, -np.pi / 2)

NULLIFIER_NAMES = (
    "Y_b1 - Y_b2",
    "X_b1 + X_b2 + X_b3",
    "-Y_b2 + Y_b3 + Y_b4",
    "X_b3 - X_b4",
)
# (quadrature, weight) per cluster mode b1..b4
_NULLIFIER_WEIGHTS = (
    ("Y", (1, -1, 0, 0)),
    ("X", (1, 1, 1, 0)),
    ("Y", (0, -1, 1, 1)),
    ("X", (0, 0, 1, -1)),
)


def _squeezings(r) -> np.ndarray:
    rs = np.broadcast_to(np.asarray(r, dtype=float), (4,)).copy()
    if not np.all(np.isfinite(rs)) or np.any(rs < 0):
        raise ValueError(f"squeezing parameter must be finite and >= 0, got {r}")
    return rs


@dataclass(frozen=True)
class Cluster:
    """Cluster state in both representations.

    ``x[k]`` and ``y[k]`` are the Heisenberg combos for the quadratures of
    ``b_{k+1}``; ``state`` is the four-mode covariance-engine state.
    """

    r: np.ndarray
    state: gs.GaussianState
    x: tuple
    y: tuple


def cluster_transform(r) -> gs.SymplecticTransform:
    """Symplectic map from four vacua to the cluster modes b1..b4."""
    rs = _squeezings(r)
    t = gs.identity(4)
    for k in range(4):
        t = t.then(gs.squeezer(4, k, rs[k], SQUEEZE_AXES[k]))
    for k in range(4):
        if PRE_ROTATIONS[k]:
            t = t.then(gs.rotation(4, k, PRE_ROTATIONS[k]))
    return t.then(gs.passive(4, range(4), NETWORK))


def _seed_combos(rs: np.ndarray) -> tuple:
    xs, ys = [], []
    for k in range(4):
        lo, hi = np.exp(-rs[k]), np.exp(rs[k])
        x0 = QuadratureCombo.label(f"X0_a{k + 1}")
        y0 = QuadratureCombo.label(f"Y0_a{k + 1}")
        if SQUEEZE_AXES[k] == "X":
            x, y = lo * x0, hi * y0
        else:
            x, y = hi * x0, lo * y0
        theta = PRE_ROTATIONS[k]
        if theta:
            c, s = np.round(np.cos(theta)), np.round(np.sin(theta))
            x, y = c * x + s * y, -s * x + c * y
        xs.append(x)
        ys.append(y)
    return xs, ys


def cluster_combos(r) -> tuple:
    """Heisenberg combos ``(x, y)`` of b1..b4 only, without the covariance state."""
    xs, ys = _seed_combos(_squeezings(r))
    bx = tuple(sum((NETWORK[i, j] * xs[j] for j in range(4)), QuadratureCombo()) for i in range(4))
    by = tuple(sum((NETWORK[i, j] * ys[j] for j in range(4)), QuadratureCombo()) for i in range(4))
    return bx, by


def build_cluster(r) -> Cluster:
    """Build the cluster at squeezing ``r`` (scalar, or one value per seed mode)."""
    rs = _squeezings(r)
    state = gs.apply(gs.vacuum_state(4), cluster_transform(rs))
    bx, by = cluster_combos(rs)
    return Cluster(rs, state, bx, by)


def nullifier_combos(cluster: Cluster) -> list:
    out = []
    for quad, weights in _NULLIFIER_WEIGHTS:
        src = cluster.x if quad == "X" else cluster.y
        out.append(sum((w * src[i] for i, w in enumerate(weights) if w), QuadratureCombo()))
    return out


def nullifier_rows() -> np.ndarray:
    """Nullifiers as rows acting on the interleaved 8-vector of b1..b4."""
    rows = np.zeros((4, 8))
    for n, (quad, weights) in enumerate(_NULLIFIER_WEIGHTS):
        off = 0 if quad == "X" else 1
        for i, w in enumerate(weights):
            rows[n, 2 * i + off] = w
    return rows


def nullifier_closed_form(r: float) -> np.ndarray:
    return np.array([2.0, 3.0, 3.0, 2.0]) * np.exp(-2.0 * r)


@dataclass(frozen=True)
class NullifierRecord:
    name: str
    variance: float
    snl: float

    @property
    def db(self) -> float:
        return float(10.0 * np.log10(self.variance / self.snl))


def nullifier_report(r, check_tol: float = 1e-10) -> list:
    """Nullifier variances from the covariance engine, cross-checked against the Heisenberg engine.

    The shot-noise reference of each combination is its vacuum variance,
    the sum of the squared weights (2 or 3).
    """
    cl = build_cluster(r)
    rows = nullifier_rows()
    cov_var = np.einsum("ij,jk,ik->i", rows, cl.state.cov, rows)
    heis_var = np.array([c.vector @ c.vector for c in nullifier_combos(cl)])
    if np.abs(cov_var - heis_var).max() > check_tol * max(1.0, np.abs(cov_var).max()):
        raise RuntimeError(f"engine mismatch on nullifiers: {cov_var} vs {heis_var}")
    snl = (rows**2).sum(axis=1)
    return [NullifierRecord(NULLIFIER_NAMES[k], float(cov_var[k]), float(snl[k])) for k in range(4)]
