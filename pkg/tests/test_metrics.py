import numpy as np
import pytest

from clusterx.gaussian import GaussianError
from clusterx.metrics import (
    SingleModeGaussian,
    duan_bound,
    duan_witness,
    entanglement_threshold_scan,
    fidelity_from_moments,
    gaussian_fidelity,
    ideal_reference,
    optimal_duan_weight,
    squeezing_db,
    to_db,
)
from clusterx.protocol import output_witness

scipy_linalg = pytest.importorskip("scipy.linalg")

# Fock-space oracle: build density matrices of diagonal-covariance states in a
# truncated basis and evaluate Uhlmann's fidelity directly.
DIM = 120
_a = np.diag(np.sqrt(np.arange(1, DIM)), 1)
_ad = _a.T


def _fock_state(cov_diag, mean):
    vx, vy = cov_diag
    nu = np.sqrt(vx * vy)
    nbar = (nu - 1) / 2
    s = 0.25 * np.log(vy / vx)
    p = (nbar / (nbar + 1)) ** np.arange(DIM) / (nbar + 1)
    sq = scipy_linalg.expm(0.5 * (s * _a @ _a - s * _ad @ _ad))
    alpha = (mean[0] + 1j * mean[1]) / 2
    disp = scipy_linalg.expm(alpha * _ad - np.conj(alpha) * _a)
    u = disp @ sq
    return u @ np.diag(p) @ u.conj().T


def _psqrt(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _uhlmann(r1, r2):
    s = _psqrt(r1)
    return float(np.real(np.trace(_psqrt(s @ r2 @ s))) ** 2)


@pytest.mark.parametrize(
    "d1, m1, d2, m2",
    [
        ((2.0, 1.0), (0.0, 0.0), (5.0, 3.0), (0.0, 0.0)),
        ((2.0, 1.0), (0.0, 0.0), (2 + 3 * np.exp(-0.7), 1 + 2 * np.exp(-0.7)), (0.0, 0.0)),
        ((2.0, 1.0), (0.0, 0.0), (5.0, 3.0), (0.7, -0.4)),
        ((1.0, 1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 0.0)),
        ((0.5, 2.0), (0.3, 0.2), (1.5, 1.5), (-0.2, 0.4)),
    ],
)
def test_fidelity_matches_fock_oracle(d1, m1, d2, m2):
    got = gaussian_fidelity(SingleModeGaussian(np.diag(d1), m1), SingleModeGaussian(np.diag(d2), m2))
    want = _uhlmann(_fock_state(d1, m1), _fock_state(d2, m2))
    assert got == pytest.approx(want, abs=1e-6)


def test_fidelity_closed_forms():
    ref = SingleModeGaussian(np.diag([2.0, 1.0]))
    out0 = SingleModeGaussian(np.diag([5.0, 3.0]))
    assert gaussian_fidelity(ref, out0) == pytest.approx(2 / (np.sqrt(42) - np.sqrt(14)), abs=1e-12)
    assert gaussian_fidelity(ref, out0) == pytest.approx(0.7302, abs=5e-5)
    e = np.exp(-0.7)
    out35 = SingleModeGaussian(np.diag([2 + 3 * e, 1 + 2 * e]))
    assert gaussian_fidelity(ref, out35) == pytest.approx(0.8729, abs=5e-5)


def test_coherent_states_overlap():
    v = SingleModeGaussian(np.eye(2))
    c = SingleModeGaussian(np.eye(2), (1.0, 0.0))
    # |<0|alpha>|^2 = exp(-|alpha|^2) with alpha = 1/2
    assert gaussian_fidelity(v, c) == pytest.approx(np.exp(-0.25), abs=1e-14)


def test_fidelity_self_and_symmetry(rng):
    from clusterx.randomstates import random_single_mode

    for _ in range(100):
        s1, s2 = random_single_mode(rng), random_single_mode(rng)
        assert gaussian_fidelity(s1, s1) == pytest.approx(1.0, abs=1e-12)
        f = gaussian_fidelity(s1, s2)
        assert 0.0 <= f <= 1.0 + 1e-12
        assert f == pytest.approx(gaussian_fidelity(s2, s1), abs=1e-12)


def test_single_mode_validation():
    with pytest.raises(GaussianError):
        SingleModeGaussian(np.diag([0.5, 0.5]))
    with pytest.raises(GaussianError):
        SingleModeGaussian(np.eye(3))


def test_fidelity_from_moments_singular():
    with pytest.raises(AssertionError):
        fidelity_from_moments(np.zeros((2, 2)), (0, 0), np.zeros((2, 2)), (0, 0))


def test_ideal_reference():
    t, c = ideal_reference(1.0, 2.0, 3.0, 4.0)
    np.testing.assert_array_equal(t.mean, [-2.0, 2.0])
    np.testing.assert_array_equal(c.mean, [3.0, 6.0])
    np.testing.assert_array_equal(t.cov, np.diag([2.0, 1.0]))
    np.testing.assert_array_equal(c.cov, np.diag([1.0, 2.0]))


def test_to_db():
    assert to_db(1.0) == 0.0
    assert to_db(2.0, 2.0) == 0.0
    assert to_db(10.0) == pytest.approx(10.0)
    np.testing.assert_allclose(to_db([1.0, 100.0]), [0.0, 20.0])
    with pytest.raises(ValueError):
        to_db(0.0)
    with pytest.raises(ValueError):
        to_db(1.0, -1.0)


def test_squeezing_db():
    assert squeezing_db(0.35) == pytest.approx(3.0401, abs=1e-4)
    assert squeezing_db(0.5 * np.log(3)) == pytest.approx(4.7712, abs=1e-4)


def test_duan_witness_product_vacuum():
    assert duan_witness(np.eye(4)) == 4.0
    assert duan_bound() == 4.0
    assert duan_bound(2.0) == pytest.approx(8.5)


def test_duan_witness_bad_shape():
    with pytest.raises(GaussianError):
        duan_witness(np.eye(2))


def test_optimal_weight_never_worse_than_unit():
    for r in (0.0, 0.35, 1.0):
        from clusterx.protocol import ExperimentConfig, heisenberg_engine

        cov = heisenberg_engine(ExperimentConfig(r=r, engine="heisenberg")).cov
        w, wit, b = optimal_duan_weight(cov)
        assert wit / b <= duan_witness(cov) / 4.0 + 1e-9


@pytest.mark.parametrize("r", [0.0, 0.35, 1.0, 2.0])
def test_output_witness_closed_form(r):
    assert output_witness(r) == pytest.approx(2 + 6 * np.exp(-2 * r), abs=1e-12)


def test_threshold_scan():
    res = entanglement_threshold_scan(0.4, 0.7, 1e-4)
    assert abs(res.r - 0.5 * np.log(3)) <= 1e-4
    assert round(res.db, 2) == 4.77
    assert res.found
    assert "open question" in res.note


def test_threshold_scan_not_found():
    res = entanglement_threshold_scan(0.0, 0.3, 0.1)
    assert not res.found


@pytest.mark.parametrize("args", [(0.5, 0.1, 0.1), (0.0, 1.0, 0.0), (-1.0, 1.0, 0.1), (0.0, np.inf, 0.1)])
def test_threshold_scan_rejects(args):
    with pytest.raises(ValueError):
        entanglement_threshold_scan(*args)
