import numpy as np
import pytest

from clusterx import gaussian as gs
from clusterx.cluster import (
    NETWORK,
    build_cluster,
    nullifier_closed_form,
    nullifier_combos,
    nullifier_report,
    nullifier_rows,
)
from clusterx.heisenberg import QuadratureCombo

L = QuadratureCombo.label


def test_network_orthogonal():
    assert np.abs(NETWORK @ NETWORK.T - np.eye(4)).max() < 1e-12


def test_unsqueezed_cluster_is_vacuum():
    np.testing.assert_allclose(build_cluster(0.0).state.cov, np.eye(8), atol=1e-15)


def test_cluster_is_pure():
    assert abs(np.linalg.det(build_cluster(0.9).state.cov) - 1.0) < 1e-9


def test_known_nullifiers_at_operating_point():
    recs = nullifier_report(0.35)
    assert recs[0].variance == pytest.approx(0.99317, abs=5e-6)
    assert recs[1].variance == pytest.approx(1.48976, abs=5e-6)
    assert [rec.snl for rec in recs] == [2, 3, 3, 2]
    for rec in recs:
        assert rec.db == pytest.approx(10 * np.log10(np.exp(-0.7)), abs=1e-12)
        assert round(rec.db, 2) == -3.04


def test_no_squeezing_sits_at_snl():
    assert all(abs(rec.db) < 1e-12 for rec in nullifier_report(0.0))


def test_strong_squeezing_limit():
    prev = None
    for r in np.linspace(0, 4, 9):
        v = np.array([rec.variance / rec.snl for rec in nullifier_report(r)])
        if prev is not None:
            assert np.all(v < prev)
        prev = v
    assert np.all(prev < 1e-3)


@pytest.mark.parametrize("r", np.round(np.arange(0.0, 2.01, 0.1), 1))
def test_three_way_agreement(r):
    cl = build_cluster(r)
    rows = nullifier_rows()
    cov_engine = np.einsum("ij,jk,ik->i", rows, cl.state.cov, rows)
    heis = np.array([c.vector @ c.vector for c in nullifier_combos(cl)])
    closed = nullifier_closed_form(r)
    assert np.abs(cov_engine - closed).max() < 1e-10
    assert np.abs(heis - closed).max() < 1e-10


@pytest.mark.parametrize("r", [0.0, 0.35, 1.7])
def test_nullifier_noise_terms(r):
    e = np.exp(-r)
    expected = [
        np.sqrt(2) * e * L("Y0_a1"),
        np.sqrt(10) / 2 * e * L("X0_a2") - np.sqrt(2) / 2 * e * L("Y0_a4"),
        -np.sqrt(10) / 2 * e * L("X0_a3") + np.sqrt(2) / 2 * e * L("Y0_a1"),
        -np.sqrt(2) * e * L("Y0_a4"),
    ]
    for got, want in zip(nullifier_combos(build_cluster(r)), expected):
        assert got.allclose(want, atol=1e-12)


@pytest.mark.parametrize("r", [0.1, 0.35, 1.0])
def test_single_mode_marginals_mixed(r):
    cl = build_cluster(r)
    for k in range(4):
        nu = gs.symplectic_eigenvalues(gs.marginal(cl.state, [k]).cov)
        assert nu.min() > 1.0


def test_per_mode_squeezing_accepted():
    cl = build_cluster([0.1, 0.2, 0.3, 0.4])
    assert gs.min_uncertainty_eigenvalue(cl.state.cov) > -1e-9


@pytest.mark.parametrize("bad", [-0.1, np.nan, np.inf])
def test_rejects_bad_r(bad):
    with pytest.raises(ValueError):
        build_cluster(bad)
