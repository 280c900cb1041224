"""Multimode Gaussian states and symplectic / homodyne machinery.

Conventions
-----------
* Quadratures ``X = a + a^dagger`` and ``Y = (a - a^dagger)/i``; the vacuum has
  unit variance in both (the shot-noise limit, SNL).
* Phase-space vectors are interleaved: ``(X_1, Y_1, ..., X_N, Y_N)``.
* The symplectic form is block diagonal with blocks ``[[0, 1], [-1, 0]]``.
  With vacuum variance 1 the uncertainty principle reads ``cov + i*Omega >= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9
SYMPLECTIC_TOL = 1e-12


class GaussianError(ValueError):
    """Raised for invalid states, transforms or mode indices."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_modes(n_modes: int, modes: Sequence[int]) -> None:
    for m in modes:
        if not (0 <= int(m) < n_modes) or int(m) != m:
            raise GaussianError(f"mode index {m} out of range for {n_modes} modes")


def min_uncertainty_eigenvalue(cov: np.ndarray) -> float:
    """Smallest eigenvalue of ``cov + i*Omega`` (>= 0 for physical states)."""
    n = cov.shape[0] // 2
    return float(np.linalg.eigvalsh(cov + 1j * symplectic_form(n)).min())


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix (all >= 1 for valid states)."""
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    return np.sort(np.abs(ev.real))[::2]


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of an ``n_modes``-mode Gaussian state.

    The constructor validates symmetry and the uncertainty relation, so every
    instance is a physical state. Arrays are copied and made read-only.
    """

    mean: np.ndarray
    cov: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise GaussianError("mean must have even, nonzero length 2N")
        if cov.shape != (mean.size, mean.size):
            raise GaussianError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise GaussianError("state contains non-finite entries")
        if np.abs(cov - cov.T).max() > SYMMETRY_TOL * max(1.0, np.abs(cov).max()):
            raise GaussianError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        lam = min_uncertainty_eigenvalue(cov)
        if lam < -PSD_TOL * max(1.0, np.abs(cov).max()):
            raise GaussianError(f"cov + i*Omega is not positive semidefinite (min eigenvalue {lam:.3e})")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "n_modes", mean.size // 2)

    def variance(self, mode: int, quadrature: str = "X") -> float:
        _check_modes(self.n_modes, [mode])
        k = 2 * mode + _quad_offset(quadrature)
        return float(self.cov[k, k])

    def purity(self) -> float:
        """``1/sqrt(det cov)``; equal to 1 for pure states."""
        return float(1.0 / np.sqrt(np.linalg.det(self.cov)))

    def tensor(self, other: "GaussianState") -> "GaussianState":
        cov = np.zeros((self.cov.shape[0] + other.cov.shape[0],) * 2)
        k = self.cov.shape[0]
        cov[:k, :k] = self.cov
        cov[k:, k:] = other.cov
        return GaussianState(np.concatenate([self.mean, other.mean]), cov)


def _quad_offset(quadrature: str) -> int:
    q = quadrature.upper()
    if q not in ("X", "Y"):
        raise GaussianError(f"quadrature must be 'X' or 'Y', got {quadrature!r}")
    return 0 if q == "X" else 1


def vacuum_state(n: int) -> GaussianState:
    """``n``-mode vacuum: zero mean, identity covariance."""
    if int(n) != n or n < 1:
        raise GaussianError(f"mode count must be a positive integer, got {n}")
    return GaussianState(np.zeros(2 * n), np.eye(2 * n))


def coherent_state(means: Sequence[float]) -> GaussianState:
    """Coherent state(s) with the given quadrature means and unit variances."""
    means = np.asarray(means, dtype=float)
    return GaussianState(means, np.eye(means.size))


@dataclass(frozen=True)
class SymplecticTransform:
    """Affine phase-space map ``v -> matrix @ v + shift``."""

    matrix: np.ndarray
    shift: np.ndarray = None

    def __post_init__(self):
        S = np.array(self.matrix, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise GaussianError(f"symplectic matrix must be square 2N x 2N, got {S.shape}")
        d = np.zeros(S.shape[0]) if self.shift is None else np.array(self.shift, dtype=float).reshape(-1)
        if d.size != S.shape[0]:
            raise GaussianError("shift length does not match matrix dimension")
        omega = symplectic_form(S.shape[0] // 2)
        err = np.abs(S @ omega @ S.T - omega).max()
        if err > SYMPLECTIC_TOL * max(1.0, np.abs(S).max() ** 2):
            raise GaussianError(f"matrix is not symplectic (deviation {err:.3e})")
        S.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "matrix", S)
        object.__setattr__(self, "shift", d)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def then(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """The transform that applies ``self`` first and ``other`` second."""
        if other.n_modes != self.n_modes:
            raise GaussianError("cannot compose transforms on different mode counts")
        return SymplecticTransform(other.matrix @ self.matrix, other.matrix @ self.shift + other.shift)

    def inverse(self) -> "SymplecticTransform":
        n = self.n_modes
        omega = symplectic_form(n)
        inv = -omega @ self.matrix.T @ omega
        return SymplecticTransform(inv, -inv @ self.shift)


def identity(n_modes: int) -> SymplecticTransform:
    return SymplecticTransform(np.eye(2 * n_modes))


def squeezer(n_modes: int, mode: int, r: float, axis: str = "X") -> SymplecticTransform:
    """Single-mode squeezer; ``axis`` is the quadrature whose noise is reduced by ``e^{-r}``."""
    _check_modes(n_modes, [mode])
    if not np.isfinite(r) or r < 0:
        raise GaussianError(f"squeezing parameter must be finite and >= 0, got {r}")
    S = np.eye(2 * n_modes)
    lo, hi = np.exp(-r), np.exp(r)
    if _quad_offset(axis) == 0:
        S[2 * mode, 2 * mode], S[2 * mode + 1, 2 * mode + 1] = lo, hi
    else:
        S[2 * mode, 2 * mode], S[2 * mode + 1, 2 * mode + 1] = hi, lo
    return SymplecticTransform(S)


def rotation(n_modes: int, mode: int, theta: float) -> SymplecticTransform:
    """Phase rotation: ``X -> cos(t) X + sin(t) Y``, ``Y -> -sin(t) X + cos(t) Y``."""
    _check_modes(n_modes, [mode])
    c, s = np.cos(theta), np.sin(theta)
    # exact quarter turns keep integer matrices exact
    if np.isclose(c, np.round(c), atol=1e-15) and np.isclose(s, np.round(s), atol=1e-15):
        c, s = float(np.round(c)), float(np.round(s))
    S = np.eye(2 * n_modes)
    S[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = [[c, s], [-s, c]]
    return SymplecticTransform(S)


def passive(n_modes: int, modes: Sequence[int], mixing: np.ndarray) -> SymplecticTransform:
    """Real orthogonal interferometer acting identically on X and Y.

    Output mode ``modes[i]`` receives ``sum_j mixing[i, j] * input mode modes[j]``.
    """
    modes = list(modes)
    _check_modes(n_modes, modes)
    if len(set(modes)) != len(modes):
        raise GaussianError("duplicate mode indices")
    O = np.asarray(mixing, dtype=float)
    k = len(modes)
    if O.shape != (k, k):
        raise GaussianError(f"mixing matrix must be {k}x{k}")
    if np.abs(O @ O.T - np.eye(k)).max() > 1e-12:
        raise GaussianError("mixing matrix is not orthogonal")
    S = np.eye(2 * n_modes)
    for a, ma in enumerate(modes):
        for b, mb in enumerate(modes):
            S[2 * ma, 2 * mb] = O[a, b]
            S[2 * ma + 1, 2 * mb + 1] = O[a, b]
    return SymplecticTransform(S)


def beamsplitter(n_modes: int, i: int, j: int, mixing: np.ndarray) -> SymplecticTransform:
    """Two-mode splitter with an explicit 2x2 orthogonal mixing matrix.

    ``out_i = m00 in_i + m01 in_j`` and ``out_j = m10 in_i + m11 in_j``.
    """
    return passive(n_modes, [i, j], mixing)


def permutation(perm: Sequence[int]) -> SymplecticTransform:
    """Relabel modes: output mode ``k`` is input mode ``perm[k]``."""
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise GaussianError(f"{perm} is not a permutation of range({n})")
    P = np.zeros((n, n))
    P[np.arange(n), perm] = 1.0
    return SymplecticTransform(np.kron(P, np.eye(2)))


def displacement(vector: Sequence[float]) -> SymplecticTransform:
    d = np.asarray(vector, dtype=float).reshape(-1)
    return SymplecticTransform(np.eye(d.size), d)


_BUILDERS = {
    "squeezer": squeezer,
    "rotation": rotation,
    "beamsplitter": beamsplitter,
    "passive": passive,
    "permutation": permutation,
    "displacement": displacement,
}


def make_symplectic(kind: str, *args, **kwargs) -> SymplecticTransform:
    """Dispatch to a named transform builder, e.g. ``make_symplectic("squeezer", 1, 0, 0.35)``."""
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise GaussianError(f"unknown transform kind {kind!r}; expected one of {sorted(_BUILDERS)}") from None
    return builder(*args, **kwargs)


def apply(state: GaussianState, t: SymplecticTransform) -> GaussianState:
    """Heisenberg action on moments: ``mean' = S mean + d``, ``cov' = S cov S^T``."""
    if t.n_modes != state.n_modes:
        raise GaussianError(f"transform acts on {t.n_modes} modes, state has {state.n_modes}")
    S = t.matrix
    return GaussianState(S @ state.mean + t.shift, S @ state.cov @ S.T)


def marginal(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Reduced state on ``modes`` (in the given order)."""
    modes = list(modes)
    if not modes:
        raise GaussianError("marginal needs at least one mode")
    if len(set(modes)) != len(modes):
        raise GaussianError("duplicate mode indices")
    _check_modes(state.n_modes, modes)
    idx = np.ravel([[2 * m, 2 * m + 1] for m in modes])
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


@dataclass(frozen=True)
class HomodyneResult:
    """Outcome of jointly measuring one quadrature on each of several modes.

    ``conditional`` is the post-measurement state of the unmeasured modes for
    the supplied outcomes. ``gain`` maps outcome deviations from
    ``outcome_mean`` to shifts of the conditional mean; ``outcome_cov`` is the
    covariance of the measurement record.
    """

    conditional: GaussianState
    kept_modes: tuple
    gain: np.ndarray
    outcome_mean: np.ndarray
    outcome_cov: np.ndarray


def measure_quadratures(
    state: GaussianState,
    measurements: Sequence[tuple],
    outcomes: Sequence[float] | None = None,
) -> HomodyneResult:
    """Condition ``state`` on homodyne outcomes.

    Parameters
    ----------
    measurements : sequence of ``(mode, angle)``
        Each entry measures ``cos(angle) X + sin(angle) Y`` on ``mode``.
    outcomes : sequence of float, optional
        Measured values, defaults to zeros. The conditional covariance does
        not depend on them.
    """
    modes = [int(m) for m, _ in measurements]
    if len(set(modes)) != len(modes):
        raise GaussianError("each mode can be measured at most once")
    _check_modes(state.n_modes, modes)
    if len(modes) >= state.n_modes:
        raise GaussianError("at least one mode must remain unmeasured")
    outcomes = np.zeros(len(modes)) if outcomes is None else np.asarray(outcomes, dtype=float).reshape(-1)
    if outcomes.size != len(modes):
        raise GaussianError("number of outcomes does not match number of measurements")

    rot = identity(state.n_modes)
    for m, angle in measurements:
        rot = rot.then(rotation(state.n_modes, m, angle))
    st = apply(state, rot)

    kept = tuple(k for k in range(state.n_modes) if k not in modes)
    mi = np.array([2 * m for m in modes])
    ki = np.ravel([[2 * k, 2 * k + 1] for k in kept])
    s_mm = st.cov[np.ix_(mi, mi)]
    s_km = st.cov[np.ix_(ki, mi)]
    gain = s_km @ np.linalg.pinv(s_mm)
    mean = st.mean[ki] + gain @ (outcomes - st.mean[mi])
    cov = st.cov[np.ix_(ki, ki)] - gain @ s_km.T
    # exact result is symmetric; roundoff from cancellation scales with the input
    cov = 0.5 * (cov + cov.T)
    return HomodyneResult(GaussianState(mean, cov), kept, gain, st.mean[mi].copy(), s_mm.copy())


def homodyne_condition(state: GaussianState, mode: int, angle: float, outcome: float) -> GaussianState:
    """State of the remaining modes after measuring ``cos(angle) X + sin(angle) Y`` on ``mode``."""
    return measure_quadratures(state, [(mode, angle)], [outcome]).conditional
