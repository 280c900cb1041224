"""Monte Carlo oracle: sample every noise label and push samples through the protocol.

All states in the protocol are Gaussian with nonnegative Wigner functions, so
drawing the twelve independent unit-variance labels as classical normals and
applying the protocol's arithmetic sample by sample reproduces the output
moments. Nothing here uses the covariance or Heisenberg engines.

Draws come in fixed-size batches. Batch ``b`` uses its own PCG64 stream
spawned from ``SeedSequence(seed)``, and batch statistics are merged in batch
order, so the estimate does not depend on how many workers run the batches.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._accel import backend_name
from .cluster import NETWORK, PRE_ROTATIONS, SQUEEZE_AXES
from .metrics import duan_witness, fidelity_from_moments, ideal_reference
from .protocol import OUTPUT_NAMES, ExperimentConfig, GateReport

BATCH_SIZE = 1 << 16
GENERATOR = "numpy PCG64 (SeedSequence.spawn per batch)"
ACCEPTANCE_MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class McSettings:
    samples: int
    seed: int = 20100

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 2:
            raise ValueError(f"samples must be an integer >= 2, got {self.samples}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed}")

    @property
    def acceptance_grade(self) -> bool:
        return self.samples >= ACCEPTANCE_MIN_SAMPLES


@dataclass
class McEstimate:
    """Sample moments of the output quadratures with standard errors.

    ``cov`` uses the unbiased ``1/(N-1)`` normalization. Standard errors
    assume Gaussian samples: ``sqrt(V/N)`` for means,
    ``sqrt((V_i V_j + C_ij^2)/N)`` for covariance entries (``V sqrt(2/N)``
    on the diagonal).
    """

    mean: np.ndarray
    cov: np.ndarray
    se_mean: np.ndarray
    se_cov: np.ndarray
    settings: McSettings
    report: GateReport
    generator: str = GENERATOR
    backend: str = "numpy"

    def z_scores(self, mean: np.ndarray, cov: np.ndarray) -> tuple:
        """Deviations of exact moments from the estimate in units of standard error."""
        zm = np.abs(self.mean - mean) / self.se_mean
        zc = np.abs(self.cov - cov) / self.se_cov
        return zm, zc

    def agrees_with(self, mean: np.ndarray, cov: np.ndarray, nsigma: float = 3.0) -> bool:
        """True when every mean and every covariance entry is within ``nsigma`` standard errors."""
        zm, zc = self.z_scores(mean, cov)
        return bool(np.all(zm <= nsigma) and np.all(zc <= nsigma))


def protocol_params(config: ExperimentConfig) -> np.ndarray:
    return _kernels.pack_params(
        np.full(4, config.r),
        [1.0 if a == "X" else 0.0 for a in SQUEEZE_AXES],
        [1.0 if t else 0.0 for t in PRE_ROTATIONS],
        NETWORK,
        config.gain,
        config.means,
        config.use_cluster,
    )


def _batch_sizes(n: int) -> list:
    full, rem = divmod(n, BATCH_SIZE)
    return [BATCH_SIZE] * full + ([rem] if rem else [])


def sample_outputs(config: ExperimentConfig, settings: McSettings, backend=None) -> np.ndarray:
    """All output samples as an ``(N, 4)`` array (memory-bound; use for diagnostics)."""
    params = protocol_params(config)
    seqs = np.random.SeedSequence(settings.seed).spawn(len(_batch_sizes(settings.samples)))
    chunks = []
    for size, ss in zip(_batch_sizes(settings.samples), seqs):
        z = np.random.Generator(np.random.PCG64(ss)).standard_normal((size, 12))
        chunks.append(_kernels.protocol_outputs(z, params, backend))
    return np.concatenate(chunks)


def _run_batch(args):
    size, ss, params, backend = args
    z = np.random.Generator(np.random.PCG64(ss)).standard_normal((size, 12))
    x = _kernels.protocol_outputs(z, params, backend)
    mean, m2 = _kernels.batch_moments(x, backend)
    return size, mean, m2


def _merge(a, b):
    # pairwise update of counts, means and co-moments
    na, ma, Ma = a
    nb, mb, Mb = b
    n = na + nb
    d = mb - ma
    return n, ma + d * (nb / n), Ma + Mb + np.outer(d, d) * (na * nb / n)


def mc_estimate(config: ExperimentConfig, settings: McSettings, workers: int = 1, backend=None) -> McEstimate:
    """Estimate output moments of ``config`` from ``settings.samples`` draws."""
    if not isinstance(settings, McSettings):
        raise TypeError("settings must be an McSettings")
    params = protocol_params(config)
    sizes = _batch_sizes(settings.samples)
    seqs = np.random.SeedSequence(settings.seed).spawn(len(sizes))
    jobs = [(size, ss, params, backend) for size, ss in zip(sizes, seqs)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_batch, jobs))
    else:
        parts = [_run_batch(j) for j in jobs]
    acc = parts[0]
    for part in parts[1:]:
        acc = _merge(acc, part)
    n, mean, m2 = acc
    cov = m2 / (n - 1)
    var = np.diag(cov)
    se_mean = np.sqrt(var / n)
    se_cov = np.sqrt((np.outer(var, var) + cov**2) / n)
    # sample moments may sit marginally outside the physical set, so skip validation
    ref_t, ref_c = ideal_reference(*config.means)
    f_t = fidelity_from_moments(ref_t.cov, ref_t.mean, cov[:2, :2], mean[:2])
    f_c = fidelity_from_moments(ref_c.cov, ref_c.mean, cov[2:, 2:], mean[2:])
    report = GateReport(config, "monte-carlo", mean, cov, f_t, f_c, duan_witness(cov, validate=False))
    used = backend or backend_name()
    return McEstimate(mean, cov, se_mean, se_cov, settings, report, GENERATOR, used)


def summary_rows(est: McEstimate, exact_mean: np.ndarray, exact_cov: np.ndarray) -> list:
    """``(quantity, exact, estimate, se, z)`` rows for means, variances and cross-covariances."""
    rows = []
    for i, k in enumerate(OUTPUT_NAMES):
        z = abs(est.mean[i] - exact_mean[i]) / est.se_mean[i]
        rows.append((f"mean {k}", exact_mean[i], est.mean[i], est.se_mean[i], z))
    for i, k in enumerate(OUTPUT_NAMES):
        z = abs(est.cov[i, i] - exact_cov[i, i]) / est.se_cov[i, i]
        rows.append((f"var {k}", exact_cov[i, i], est.cov[i, i], est.se_cov[i, i], z))
    for i, j in ((0, 2), (1, 3), (0, 1), (2, 3)):
        z = abs(est.cov[i, j] - exact_cov[i, j]) / est.se_cov[i, j]
        rows.append((f"cov {OUTPUT_NAMES[i]},{OUTPUT_NAMES[j]}", exact_cov[i, j], est.cov[i, j], est.se_cov[i, j], z))
    return rows
