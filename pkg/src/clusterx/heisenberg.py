"""Exact-moment bookkeeping in the Heisenberg picture.

Every quadrature in the protocol is a real linear combination of mutually
independent, unit-variance noise operators: the eight seed quadratures of the
squeezers and the four input-signal quadratures. Means live on the labels, so
a combination's moments follow from its coefficient vector alone.
"""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

SEED_LABELS = tuple(f"{q}0_a{i}" for i in range(1, 5) for q in ("X", "Y"))
INPUT_LABELS = ("X_t", "Y_t", "X_c", "Y_c")
LABELS = SEED_LABELS + INPUT_LABELS
_INDEX = {name: k for k, name in enumerate(LABELS)}


def label_index(label: str) -> int:
    try:
        return _INDEX[label]
    except KeyError:
        raise KeyError(f"unknown noise label {label!r}") from None


class QuadratureCombo:
    """A linear combination ``sum_k c_k * label_k`` of independent noise labels."""

    __slots__ = ("_c",)

    def __init__(self, coefficients: Mapping[str, float] | np.ndarray | None = None):
        if coefficients is None:
            c = np.zeros(len(LABELS))
        elif isinstance(coefficients, np.ndarray):
            c = np.array(coefficients, dtype=float)
            if c.shape != (len(LABELS),):
                raise ValueError(f"coefficient vector must have length {len(LABELS)}")
        else:
            c = np.zeros(len(LABELS))
            for name, value in coefficients.items():
                c[label_index(name)] += float(value)
        c.flags.writeable = False
        self._c = c

    @classmethod
    def _wrap(cls, c: np.ndarray) -> "QuadratureCombo":
        # trusted fast path for arithmetic results
        obj = object.__new__(cls)
        c.flags.writeable = False
        obj._c = c
        return obj

    @classmethod
    def label(cls, name: str, coefficient: float = 1.0) -> "QuadratureCombo":
        return cls({name: coefficient})

    @property
    def vector(self) -> np.ndarray:
        return self._c

    @property
    def coefficients(self) -> dict:
        """Nonzero coefficients keyed by label."""
        return {LABELS[k]: float(v) for k, v in enumerate(self._c) if v != 0.0}

    def __add__(self, other):
        if not isinstance(other, QuadratureCombo):
            return NotImplemented
        return QuadratureCombo._wrap(self._c + other._c)

    def __sub__(self, other):
        if not isinstance(other, QuadratureCombo):
            return NotImplemented
        return QuadratureCombo._wrap(self._c - other._c)

    def __neg__(self):
        return QuadratureCombo._wrap(-self._c)

    def __mul__(self, k):
        if isinstance(k, QuadratureCombo):
            return NotImplemented
        return QuadratureCombo._wrap(float(k) * self._c)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return QuadratureCombo._wrap(self._c / float(k))

    def __eq__(self, other):
        return isinstance(other, QuadratureCombo) and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other: "QuadratureCombo", atol: float = 1e-12) -> bool:
        return bool(np.abs(self._c - other._c).max() <= atol)

    def __repr__(self):
        terms = " ".join(f"{v:+.6g}*{k}" for k, v in self.coefficients.items())
        return f"QuadratureCombo({terms or '0'})"


ZERO = QuadratureCombo()


def linear_combine(terms: Iterable[tuple]) -> QuadratureCombo:
    """``sum_i w_i * combo_i`` for ``terms = [(w_i, combo_i), ...]``."""
    c = np.zeros(len(LABELS))
    for w, combo in terms:
        c = c + float(w) * combo.vector
    return QuadratureCombo(c)


def _mean_vector(means: Mapping[str, float] | None) -> np.ndarray:
    mu = np.zeros(len(LABELS))
    for name, value in (means or {}).items():
        mu[label_index(name)] = float(value)
    return mu


def moments(a: QuadratureCombo, b: QuadratureCombo, means: Mapping[str, float] | None = None) -> tuple:
    """``(mean_a, var_a, cov_ab)`` assuming independent unit-variance labels."""
    mu = _mean_vector(means)
    return float(a.vector @ mu), float(a.vector @ a.vector), float(a.vector @ b.vector)


def covariance_matrix(combos, means: Mapping[str, float] | None = None) -> tuple:
    """Mean vector and covariance matrix of several combos at once."""
    C = np.array([c.vector for c in combos])
    return C @ _mean_vector(means), C @ C.T
