"""Simulator for a measurement-based continuous-variable controlled-X gate.

A four-mode linear cluster state, two homodyne teleporters and classical
feed-forward implement ``X_t -> X_t - X_c``, ``Y_c -> Y_c + Y_t``. Output
moments are computed by two exact engines (covariance matrices and
Heisenberg-picture noise bookkeeping) and checked by Monte Carlo sampling.
"""
__version__ = "0.1.0"

from .gaussian import (
    GaussianError,
    GaussianState,
    SymplecticTransform,
    apply,
    homodyne_condition,
    make_symplectic,
    marginal,
    measure_quadratures,
    vacuum_state,
)
from .heisenberg import QuadratureCombo, linear_combine, moments
from .cluster import build_cluster, nullifier_report
from .protocol import (
    EngineMismatchError,
    ExperimentConfig,
    GateReport,
    ideal_controlled_x,
    modulation_scenarios,
    run_gate,
)
from .metrics import (
    SingleModeGaussian,
    duan_witness,
    entanglement_threshold_scan,
    gaussian_fidelity,
    ideal_reference,
    to_db,
)
from .montecarlo import McSettings, mc_estimate
from .config import parse_config
