import numpy as np
import pytest

from clusterx import _kernels
from clusterx._accel import USING_NUMBA
from clusterx.montecarlo import BATCH_SIZE, McSettings, mc_estimate, sample_outputs, summary_rows
from clusterx.protocol import ExperimentConfig, run_gate

CFG = ExperimentConfig(r=0.35, gain=0.95, means=(0.5, -0.3, 1.2, 0.7))


def test_vacuum_estimate():
    cfg = ExperimentConfig(r=0.0, gain=0.0)
    est = mc_estimate(cfg, McSettings(200_000, 1))
    assert est.agrees_with(np.zeros(4), np.eye(4))


@pytest.mark.parametrize("r, g", [(0.0, 1.0), (0.35, 1.0), (1.0, 0.95), (0.35, (1.0, 0.9, 0.8, 0.7))])
def test_matches_exact_engines(r, g):
    cfg = ExperimentConfig(r=r, gain=g, means=(0.5, -0.3, 1.2, 0.7))
    rep = run_gate(cfg)
    est = mc_estimate(cfg, McSettings(300_000, 20100))
    assert est.agrees_with(rep.mean, rep.cov, 4.0)


def test_no_cluster_path():
    cfg = ExperimentConfig(r=0.35, use_cluster=False)
    rep = run_gate(cfg)
    assert mc_estimate(cfg, McSettings(200_000, 5)).agrees_with(rep.mean, rep.cov, 4.0)


def test_deterministic_for_seed():
    a = mc_estimate(CFG, McSettings(50_000, 42))
    b = mc_estimate(CFG, McSettings(50_000, 42))
    c = mc_estimate(CFG, McSettings(50_000, 43))
    assert np.array_equal(a.cov, b.cov) and np.array_equal(a.mean, b.mean)
    assert not np.array_equal(a.cov, c.cov)


def test_worker_count_does_not_change_result():
    n = 3 * BATCH_SIZE + 123
    a = mc_estimate(CFG, McSettings(n, 9), workers=1)
    b = mc_estimate(CFG, McSettings(n, 9), workers=3)
    np.testing.assert_allclose(a.cov, b.cov, rtol=0, atol=1e-12)
    np.testing.assert_allclose(a.mean, b.mean, rtol=0, atol=1e-12)


def test_merge_matches_direct_moments():
    n = 2 * BATCH_SIZE + 17
    x = sample_outputs(CFG, McSettings(n, 11))
    est = mc_estimate(CFG, McSettings(n, 11))
    np.testing.assert_allclose(est.mean, x.mean(axis=0), atol=1e-12)
    np.testing.assert_allclose(est.cov, np.cov(x.T), atol=1e-10)


@pytest.mark.skipif(not USING_NUMBA, reason="numba disabled")
def test_backends_agree():
    a = mc_estimate(CFG, McSettings(100_000, 3), backend="numba")
    b = mc_estimate(CFG, McSettings(100_000, 3), backend="numpy")
    np.testing.assert_allclose(a.cov, b.cov, atol=1e-12)
    np.testing.assert_allclose(a.mean, b.mean, atol=1e-12)
    assert a.backend == "numba" and b.backend == "numpy"


@pytest.mark.skipif(not USING_NUMBA, reason="numba disabled")
def test_kernel_outputs_agree_across_backends():
    z = np.random.default_rng(0).standard_normal((1000, 12))
    p = _kernels.pack_params(np.full(4, 0.35), [0, 1, 1, 0], [0, 0, 1, 1], np.eye(4), (1, 1, 1, 1), (0, 0, 0, 0), True)
    np.testing.assert_allclose(
        _kernels.protocol_outputs(z, p, "numba"), _kernels.protocol_outputs(z, p, "numpy"), atol=1e-12
    )


def test_standard_errors_shrink():
    small = mc_estimate(CFG, McSettings(10_000, 1))
    big = mc_estimate(CFG, McSettings(160_000, 1))
    assert np.all(big.se_cov < small.se_cov / 3)


def test_summary_rows():
    rep = run_gate(CFG)
    est = mc_estimate(CFG, McSettings(20_000, 1))
    rows = summary_rows(est, rep.mean, rep.cov)
    assert rows[0][0] == "mean X_t"
    assert all(len(r) == 5 for r in rows)


@pytest.mark.parametrize("kwargs", [dict(samples=1), dict(samples=2.5), dict(samples=10, seed=-1), dict(samples=10, seed=2**64)])
def test_settings_validation(kwargs):
    with pytest.raises(ValueError):
        McSettings(**kwargs)


def test_acceptance_grade():
    assert not McSettings(9_999).acceptance_grade
    assert McSettings(10_000).acceptance_grade


def test_settings_type_check():
    with pytest.raises(TypeError):
        mc_estimate(CFG, 1000)


def test_env_flag_forces_numpy():
    import os
    import subprocess
    import sys

    env = dict(os.environ, CLUSTERX_DISABLE_NUMBA="1")
    code = "from clusterx._accel import backend_name, USING_NUMBA; print(backend_name(), USING_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["numpy", "False"]
