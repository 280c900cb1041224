"""Cluster-state controlled-X gate: coupling, homodyne readout and feed-forward.

Mode layout for the covariance engine (six modes)::

    0: b1   1: b2   2: b3   3: b4   4: a_t   5: a_c

The inputs meet b2 and b3 on balanced splitters

    t1 = (a_t + b2)/sqrt2     t2 = (-a_t + b2)/sqrt2
    c1 = (-a_c + b3)/sqrt2    c2 = (a_c + b3)/sqrt2

after which ``X_t1, Y_t2, X_c1, Y_c2`` are measured and fed forward onto b1
(target output) and b4 (control output) with gain ``g``:

    X_b1 += sqrt2 g (X_t1 + X_c1)      Y_b1 += -sqrt2 g Y_t2
    X_b4 += -sqrt2 g X_c1              Y_b4 += sqrt2 g (-Y_t2 + Y_c2)

Output quadratures are reported in the order ``(X_t, Y_t, X_c, Y_c)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import gaussian as gs
from .cluster import build_cluster, cluster_combos
from .heisenberg import QuadratureCombo, covariance_matrix
from .metrics import SingleModeGaussian, duan_witness, gaussian_fidelity, ideal_reference, to_db

SQRT2 = np.sqrt(2.0)
OUTPUT_NAMES = ("X_t", "Y_t", "X_c", "Y_c")
# order used for tabulated output levels
DISPLAY_ORDER = ("X_t", "X_c", "Y_t", "Y_c")
ENGINES = ("covariance", "heisenberg", "both")
ENGINE_TOL = 1e-9

# (mode, angle) of X_t1, Y_t2, X_c1, Y_c2 in the six-mode layout
_MEASUREMENTS = ((4, 0.0), (1, np.pi / 2), (5, 0.0), (2, np.pi / 2))
_TARGET_SPLITTER = np.array([[1.0, 1.0], [-1.0, 1.0]]) / SQRT2  # (a_t, b2) -> (t1, t2)
_CONTROL_SPLITTER = np.array([[-1.0, 1.0], [1.0, 1.0]]) / SQRT2  # (a_c, b3) -> (c1, c2)


class EngineMismatchError(RuntimeError):
    """The covariance and Heisenberg engines disagree beyond tolerance."""


def _as_gains(g) -> tuple:
    arr = np.broadcast_to(np.asarray(g, dtype=float), (4,))
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"gain must be finite, got {g}")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class ExperimentConfig:
    """One gate run.

    ``gain`` is a scalar or a per-channel quadruple ordered as the
    displacements (X on b1, Y on b1, X on b4, Y on b4). ``means`` holds the
    input quadrature means ``(X_t, Y_t, X_c, Y_c)``.
    """

    r: float = 0.35
    gain: tuple = (1.0, 1.0, 1.0, 1.0)
    means: tuple = (0.0, 0.0, 0.0, 0.0)
    engine: str = "both"
    use_cluster: bool = True
    mc_samples: int | None = None
    mc_seed: int = 20100

    def __post_init__(self):
        r = float(self.r)
        if not np.isfinite(r) or r < 0:
            raise ValueError(f"r must be finite and >= 0, got {self.r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "gain", _as_gains(self.gain))
        means = tuple(float(m) for m in self.means)
        if len(means) != 4 or not all(np.isfinite(means)):
            raise ValueError("means must be four finite numbers (X_t, Y_t, X_c, Y_c)")
        object.__setattr__(self, "means", means)
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.mc_samples is not None and int(self.mc_samples) < 1:
            raise ValueError("mc_samples must be a positive integer")

    @property
    def mean_map(self) -> dict:
        return dict(zip(OUTPUT_NAMES, self.means))

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def ideal_controlled_x() -> gs.SymplecticTransform:
    """Two-mode (target, control) map ``X_t -> X_t - X_c``, ``Y_c -> Y_c + Y_t``."""
    return gs.SymplecticTransform(
        np.array(
            [
                [1.0, 0.0, -1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 1.0],
            ]
        )
    )


def feedforward_matrix(gain) -> np.ndarray:
    """Map from the record ``(X_t1, Y_t2, X_c1, Y_c2)`` to shifts of ``(X_b1, Y_b1, X_b4, Y_b4)``."""
    g = _as_gains(gain)
    G = np.array(
        [
            [1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, -1.0, 0.0, 1.0],
        ]
    )
    return SQRT2 * np.asarray(g)[:, None] * G


def _resource_state(config: ExperimentConfig) -> gs.GaussianState:
    if config.use_cluster:
        return build_cluster(config.r).state
    return gs.vacuum_state(4)


def prepared_state(config: ExperimentConfig) -> gs.GaussianState:
    """Six-mode state right before the homodyne detectors."""
    state = _resource_state(config).tensor(gs.coherent_state(config.means))
    state = gs.apply(state, gs.beamsplitter(6, 4, 1, _TARGET_SPLITTER))
    return gs.apply(state, gs.beamsplitter(6, 5, 2, _CONTROL_SPLITTER))


@dataclass(frozen=True)
class EngineResult:
    engine: str
    mean: np.ndarray
    cov: np.ndarray


def covariance_engine(config: ExperimentConfig) -> EngineResult:
    """Output moments by Gaussian conditioning on the homodyne record, averaged over outcomes.

    For a record ``m`` the conditional mean of b1, b4 is
    ``mu_k + K (m - mu_m)``; the feed-forward adds ``G m``. Averaging over
    ``m ~ N(mu_m, S_mm)`` gives mean ``mu_k + G mu_m`` and covariance
    ``S_cond + (K + G) S_mm (K + G)^T``.
    """
    meas = gs.measure_quadratures(prepared_state(config), _MEASUREMENTS)
    G = feedforward_matrix(config.gain)
    cond = meas.conditional
    # cond.mean is evaluated at the all-zero record
    mean = cond.mean + (meas.gain + G) @ meas.outcome_mean
    KG = meas.gain + G
    cov = cond.cov + KG @ meas.outcome_cov @ KG.T
    return EngineResult("covariance", mean, 0.5 * (cov + cov.T))


def conditional_output(config: ExperimentConfig, outcomes: Sequence[float]) -> gs.GaussianState:
    """Output state of b1, b4 for one homodyne record ``(X_t1, Y_t2, X_c1, Y_c2)``, after feed-forward."""
    m = np.asarray(outcomes, dtype=float)
    meas = gs.measure_quadratures(prepared_state(config), _MEASUREMENTS, m)
    shifted = meas.conditional.mean + feedforward_matrix(config.gain) @ m
    return gs.GaussianState(shifted, meas.conditional.cov)


def output_combos(config: ExperimentConfig) -> tuple:
    """Heisenberg combos of ``(X_t^out, Y_t^out, X_c^out, Y_c^out)``."""
    if config.use_cluster:
        bx, by = cluster_combos(config.r)
    else:
        bx = tuple(QuadratureCombo.label(f"X0_a{k}") for k in range(1, 5))
        by = tuple(QuadratureCombo.label(f"Y0_a{k}") for k in range(1, 5))
    xt, yt = QuadratureCombo.label("X_t"), QuadratureCombo.label("Y_t")
    xc, yc = QuadratureCombo.label("X_c"), QuadratureCombo.label("Y_c")

    x_t1 = (xt + bx[1]) / SQRT2
    y_t2 = (-yt + by[1]) / SQRT2
    x_c1 = (-xc + bx[2]) / SQRT2
    y_c2 = (yc + by[2]) / SQRT2

    g = config.gain
    out_xt = bx[0] + SQRT2 * g[0] * (x_t1 + x_c1)
    out_yt = by[0] - SQRT2 * g[1] * y_t2
    out_xc = bx[3] - SQRT2 * g[2] * x_c1
    out_yc = by[3] + SQRT2 * g[3] * (y_c2 - y_t2)
    return out_xt, out_yt, out_xc, out_yc


def heisenberg_engine(config: ExperimentConfig) -> EngineResult:
    mean, cov = covariance_matrix(output_combos(config), config.mean_map)
    return EngineResult("heisenberg", mean, cov)


@dataclass
class GateReport:
    """Output moments of one gate run and the figures of merit derived from them."""

    config: ExperimentConfig
    engine: str
    mean: np.ndarray
    cov: np.ndarray
    fidelity_t: float
    fidelity_c: float
    duan: float
    max_engine_deviation: float | None = None
    mc: object | None = field(default=None, repr=False)

    @property
    def variances(self) -> dict:
        return {k: float(self.cov[i, i]) for i, k in enumerate(OUTPUT_NAMES)}

    @property
    def means(self) -> dict:
        return {k: float(self.mean[i]) for i, k in enumerate(OUTPUT_NAMES)}

    @property
    def db(self) -> dict:
        return {k: to_db(v) for k, v in self.variances.items()}

    def output_state(self) -> gs.GaussianState:
        return gs.GaussianState(self.mean, self.cov)


def fidelities(config: ExperimentConfig, mean: np.ndarray, cov: np.ndarray) -> tuple:
    """``(F_t, F_c)`` of the single-mode outputs against the ideal gate's outputs."""
    ref_t, ref_c = ideal_reference(*config.means)
    out_t = SingleModeGaussian(cov[:2, :2], mean[:2])
    out_c = SingleModeGaussian(cov[2:, 2:], mean[2:])
    return gaussian_fidelity(ref_t, out_t), gaussian_fidelity(ref_c, out_c)


def run_gate(config: ExperimentConfig) -> GateReport:
    """Run the protocol with the requested engine(s).

    With ``engine="both"`` the two exact engines must agree to ``ENGINE_TOL``
    on every mean and covariance entry, otherwise :class:`EngineMismatchError`
    is raised. When ``config.mc_samples`` is set, a Monte Carlo estimate is
    attached as ``report.mc``.
    """
    results = []
    if config.engine in ("covariance", "both"):
        results.append(covariance_engine(config))
    if config.engine in ("heisenberg", "both"):
        results.append(heisenberg_engine(config))
    deviation = None
    if len(results) == 2:
        a, b = results
        deviation = float(max(np.abs(a.mean - b.mean).max(), np.abs(a.cov - b.cov).max()))
        scale = max(1.0, np.abs(a.cov).max(), np.abs(a.mean).max())
        if deviation > ENGINE_TOL * scale:
            raise EngineMismatchError(f"covariance and Heisenberg engines differ by {deviation:.3e}")
    res = results[0]
    f_t, f_c = fidelities(config, res.mean, res.cov)
    report = GateReport(
        config=config,
        engine=config.engine,
        mean=res.mean,
        cov=res.cov,
        fidelity_t=f_t,
        fidelity_c=f_c,
        duan=duan_witness(res.cov),
        max_engine_deviation=deviation,
    )
    if config.mc_samples:
        from .montecarlo import McSettings, mc_estimate

        report.mc = mc_estimate(config, McSettings(int(config.mc_samples), int(config.mc_seed)))
    return report


def output_witness(r: float, gain=1.0) -> float:
    """Unit-gain Duan sum of the gate output for vacuum inputs."""
    return duan_witness(heisenberg_engine(ExperimentConfig(r=r, gain=gain, engine="heisenberg")).cov)


POWER_CONVENTIONS = ("total", "signal")
MODULATED = ("X_t", "Y_t", "X_c", "Y_c")


def modulation_amplitude(power_db: float, convention: str = "total") -> float:
    """Quadrature mean giving ``power_db`` above the SNL.

    ``"total"`` reads the level as signal plus unit vacuum noise,
    ``mu^2 + 1 = 10^(P/10)``; ``"signal"`` uses ``mu^2 = 10^(P/10)``.
    """
    lin = 10.0 ** (power_db / 10.0)
    if convention == "total":
        if lin < 1.0:
            raise ValueError("modulation power must be >= 0 dB above the SNL")
        return float(np.sqrt(lin - 1.0))
    if convention == "signal":
        return float(np.sqrt(lin))
    raise ValueError(f"convention must be one of {POWER_CONVENTIONS}")


def mean_power_db(mu: float, convention: str = "total") -> float:
    """Inverse of :func:`modulation_amplitude`."""
    if convention == "total":
        return float(10.0 * np.log10(mu * mu + 1.0))
    if convention == "signal":
        return float(10.0 * np.log10(mu * mu)) if mu else float("-inf")
    raise ValueError(f"convention must be one of {POWER_CONVENTIONS}")


@dataclass
class ModulationResult:
    modulated: str
    amplitude: float
    input_power_db: float
    report: GateReport
    convention: str = "total"

    @property
    def output_mean_power_db(self) -> dict:
        return {k: mean_power_db(v, self.convention) for k, v in self.report.means.items()}

    @property
    def output_total_power_db(self) -> dict:
        """Level a spectrum analyzer would read: mean squared plus noise."""
        return {
            k: float(10.0 * np.log10(self.report.means[k] ** 2 + self.report.variances[k])) for k in OUTPUT_NAMES
        }

    @property
    def carriers(self) -> tuple:
        """Output quadratures whose mean is nonzero."""
        return tuple(k for k, v in self.report.means.items() if abs(v) > 1e-9 * max(1.0, self.amplitude))


def modulation_scenarios(
    r: float = 0.35,
    g=1.0,
    modulation_power_db: float = 12.0,
    convention: str = "total",
    engine: str = "both",
) -> list:
    """Four runs, each with exactly one input quadrature modulated to ``modulation_power_db``."""
    if 10.0 ** (modulation_power_db / 10.0) - (1.0 if convention == "total" else 0.0) < 0:
        raise ValueError("modulation power must be >= 0 dB above the SNL")
    mu = modulation_amplitude(modulation_power_db, convention)
    out = []
    for k, name in enumerate(MODULATED):
        means = [0.0] * 4
        means[k] = mu
        report = run_gate(ExperimentConfig(r=r, gain=g, means=tuple(means), engine=engine))
        out.append(ModulationResult(name, mu, mean_power_db(mu, convention), report, convention))
    return out
