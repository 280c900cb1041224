import numpy as np
import pytest

from clusterx import gaussian as gs
from clusterx import protocol
from clusterx.protocol import (
    EngineMismatchError,
    ExperimentConfig,
    conditional_output,
    covariance_engine,
    heisenberg_engine,
    ideal_controlled_x,
    modulation_amplitude,
    modulation_scenarios,
    mean_power_db,
    run_gate,
)


def _ideal(means):
    st = gs.GaussianState(np.asarray(means, dtype=float), np.eye(4))
    return gs.apply(st, ideal_controlled_x())


def test_ideal_gate_shifts_means():
    out = _ideal([1.0, 0.0, 2.0, 0.0])
    np.testing.assert_array_equal(out.mean, [-1.0, 0.0, 2.0, 0.0])
    out = _ideal([0.0, 1.0, 0.0, 3.0])
    np.testing.assert_array_equal(out.mean, [0.0, 1.0, 0.0, 4.0])


def test_ideal_gate_vacuum_variances():
    np.testing.assert_array_equal(np.diag(_ideal([0, 0, 0, 0]).cov), [2.0, 1.0, 1.0, 2.0])


@pytest.mark.parametrize("r", [0.0, 0.35])
def test_run_gate_levels(r):
    rep = run_gate(ExperimentConfig(r=r, gain=1.0))
    e = np.exp(-2 * r)
    np.testing.assert_allclose(
        [rep.variances[k] for k in ("X_t", "Y_t", "X_c", "Y_c")],
        [2 + 3 * e, 1 + 2 * e, 1 + 2 * e, 2 + 3 * e],
        atol=1e-10,
    )


def test_run_gate_rounded_db():
    rep = run_gate(ExperimentConfig(r=0.35))
    assert [round(rep.db[k], 2) for k in ("X_t", "X_c", "Y_t", "Y_c")] == [5.43, 3.00, 3.00, 5.43]
    rep = run_gate(ExperimentConfig(r=0.0))
    assert [round(rep.db[k], 2) for k in ("X_t", "X_c", "Y_t", "Y_c")] == [6.99, 4.77, 4.77, 6.99]


def test_no_cluster_equals_unsqueezed():
    a = run_gate(ExperimentConfig(r=0.0))
    b = run_gate(ExperimentConfig(r=0.9, use_cluster=False))
    np.testing.assert_allclose(a.cov, b.cov, atol=1e-12)


def test_zero_gain_passes_cluster_modes():
    # without feed-forward the outputs are just b1 and b4
    from clusterx.cluster import build_cluster

    r = 0.35
    rep = run_gate(ExperimentConfig(r=r, gain=0.0, means=(1.0, 2.0, 3.0, 4.0)))
    st = gs.marginal(build_cluster(r).state, [0, 3])
    np.testing.assert_allclose(rep.cov, st.cov, atol=1e-12)
    np.testing.assert_allclose(rep.mean, 0.0, atol=1e-12)


@pytest.mark.parametrize("g", [0.0, 0.5, 0.95, 1.0, 1.3])
def test_mean_transfer_scales_with_gain(g):
    m = (0.5, -0.3, 1.2, 0.7)
    rep = run_gate(ExperimentConfig(r=0.35, gain=g, means=m))
    ideal = _ideal(m).mean
    np.testing.assert_allclose(rep.mean, g * ideal, atol=1e-12)
    # the deficit from the ideal gate is linear in (1 - g)
    np.testing.assert_allclose(ideal - rep.mean, (1 - g) * ideal, atol=1e-12)


def test_strong_squeezing_approaches_ideal():
    ideal = _ideal([0, 0, 0, 0]).cov
    for r in (2.0, 4.0, 6.0):
        rep = run_gate(ExperimentConfig(r=r))
        excess = np.abs(rep.cov - ideal).max()
        assert excess < 10 * np.exp(-2 * r)


def test_fidelity_tends_to_one():
    assert run_gate(ExperimentConfig(r=5.0)).fidelity_t > 0.9999


def test_fidelity_with_means_matches_vacuum_case():
    a = run_gate(ExperimentConfig(r=0.35))
    b = run_gate(ExperimentConfig(r=0.35, means=(0.5, -0.3, 1.2, 0.7)))
    assert a.fidelity_t == pytest.approx(b.fidelity_t, abs=1e-12)
    assert a.fidelity_c == pytest.approx(b.fidelity_c, abs=1e-12)


@pytest.mark.parametrize("r", [0.0, 0.35, 1.0, 2.0])
@pytest.mark.parametrize("g", [0.0, 0.7, 1.0, (1.0, 0.9, 0.8, 0.7)])
def test_engines_agree(r, g):
    cfg = ExperimentConfig(r=r, gain=g, means=(0.1, 0.2, -0.3, 0.4))
    a, b = covariance_engine(cfg), heisenberg_engine(cfg)
    assert np.abs(a.cov - b.cov).max() < 1e-10
    assert np.abs(a.mean - b.mean).max() < 1e-10


def test_conditional_output_average_recovers_engine():
    cfg = ExperimentConfig(r=0.35, means=(0.5, -0.3, 1.2, 0.7))
    meas = gs.measure_quadratures(protocol.prepared_state(cfg), protocol._MEASUREMENTS)
    m0 = meas.outcome_mean
    c = conditional_output(cfg, m0)
    # at the mean record, the conditional mean equals the averaged mean
    np.testing.assert_allclose(c.mean, covariance_engine(cfg).mean, atol=1e-12)
    # the conditional covariance does not depend on the record
    c2 = conditional_output(cfg, m0 + 1.0)
    np.testing.assert_allclose(c.cov, c2.cov, atol=1e-12)


def test_engine_mismatch_raises(monkeypatch):
    real = protocol.heisenberg_engine

    def broken(cfg):
        res = real(cfg)
        return protocol.EngineResult(res.engine, res.mean, res.cov + 1e-6)

    monkeypatch.setattr(protocol, "heisenberg_engine", broken)
    with pytest.raises(EngineMismatchError):
        run_gate(ExperimentConfig(engine="both"))


@pytest.mark.parametrize(
    "kwargs",
    [dict(r=-0.1), dict(r=np.nan), dict(gain=np.inf), dict(means=(0, 0, 0)), dict(engine="magic"), dict(gain=(1, 2))],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_modulation_power_conventions():
    mu = modulation_amplitude(12.0)
    assert mu == pytest.approx(np.sqrt(10**1.2 - 1))
    assert mean_power_db(mu) == pytest.approx(12.0)
    assert modulation_amplitude(12.0, "signal") == pytest.approx(10**0.6)
    with pytest.raises(ValueError):
        modulation_amplitude(-1.0)
    with pytest.raises(ValueError):
        modulation_amplitude(3.0, "loud")


def test_modulation_carriers():
    res = {m.modulated: m for m in modulation_scenarios(0.35, 1.0, 12.0, engine="heisenberg")}
    assert set(res["X_t"].carriers) == {"X_t"}
    assert set(res["Y_t"].carriers) == {"Y_t", "Y_c"}
    assert set(res["X_c"].carriers) == {"X_t", "X_c"}
    assert set(res["Y_c"].carriers) == {"Y_c"}
    for m in res.values():
        for k in m.carriers:
            assert m.output_mean_power_db[k] == pytest.approx(12.0, abs=1e-9)


def test_twelve_db_amplitude():
    # sqrt(10**1.2 - 1) = 3.85343; quoted elsewhere rounded as 3.8536
    assert modulation_amplitude(12.0) == pytest.approx(3.8536, abs=5e-4)
    assert mean_power_db(modulation_amplitude(12.0)) == pytest.approx(12.00, abs=1e-12)


def test_modulation_rejects_negative_linear_power():
    with pytest.raises(ValueError):
        modulation_scenarios(0.35, 1.0, -3.0)
