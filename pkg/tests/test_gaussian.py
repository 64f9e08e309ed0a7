import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavity_clock.gaussian import (
    VACUUM_VARIANCE,
    GaussianState,
    StateParams,
    extract_params,
    make_state,
    mean_photon_number,
    photon_number_from_moments,
    pure_loss,
    rotate_phase,
    wrap_angle,
)

angles = st.floats(-np.pi + 1e-3, np.pi - 1e-3)
params_strategy = st.builds(
    StateParams,
    alpha=st.floats(0.01, 5.0),
    theta=angles,
    r=st.floats(0.01, 1.5),
    phi=angles,
    purity=st.floats(0.2, 1.0),
)


def test_vacuum_covariance_is_quarter_identity():
    state = make_state(StateParams())
    np.testing.assert_allclose(state.covariance, VACUUM_VARIANCE * np.eye(2), atol=1e-15)
    np.testing.assert_array_equal(state.first_moments, [0.0, 0.0])
    assert state.purity == pytest.approx(1.0)


def test_coherent_state_moments():
    state = make_state(StateParams(alpha=2.0, theta=np.pi / 3))
    np.testing.assert_allclose(state.first_moments, [1.0, np.sqrt(3.0)], atol=1e-14)
    np.testing.assert_allclose(state.covariance, np.eye(2) / 4, atol=1e-15)


def test_phase_squeezing_reduces_the_phase_quadrature():
    # displacement along X1, phi = 0: the orthogonal (phase) quadrature X2 is squeezed
    r = 0.7
    cov = make_state(StateParams(alpha=1.0, r=r)).covariance
    np.testing.assert_allclose(np.diag(cov), [np.exp(2 * r) / 4, np.exp(-2 * r) / 4], rtol=1e-14)
    assert abs(cov[0, 1]) < 1e-15
    amp = make_state(StateParams(alpha=1.0, r=r, phi=np.pi)).covariance
    assert amp[0, 0] < VACUUM_VARIANCE < amp[1, 1]


def test_mixed_state_purity():
    state = make_state(StateParams(r=0.4, purity=0.3))
    assert state.purity == pytest.approx(0.3, rel=1e-12)
    assert np.sqrt(np.linalg.det(state.covariance)) == pytest.approx(1 / (4 * 0.3))


@settings(max_examples=200, deadline=None)
@given(params_strategy)
def test_extract_inverts_make_state(params):
    back = extract_params(make_state(params))
    assert back.alpha == pytest.approx(params.alpha, rel=1e-9, abs=1e-12)
    assert back.r == pytest.approx(params.r, rel=1e-8, abs=1e-10)
    assert back.purity == pytest.approx(params.purity, rel=1e-10)
    assert abs(wrap_angle(back.theta - params.theta)) < 1e-9
    assert abs(wrap_angle(back.phi - params.phi)) < 1e-7


@settings(max_examples=200, deadline=None)
@given(params_strategy)
def test_make_state_inverts_extract(params):
    state = make_state(params)
    assert make_state(extract_params(state)).allclose(state, atol=1e-10)


def test_degenerate_angles_reported_as_zero():
    back = extract_params(make_state(StateParams(r=0.3, phi=1.0)))
    assert back.theta == 0.0
    back = extract_params(make_state(StateParams(alpha=1.0, theta=0.5)))
    assert back.phi == 0.0 and back.theta == pytest.approx(0.5)


def test_photon_number_identity_over_random_states():
    rng = np.random.default_rng(20261014)
    for _ in range(1000):
        p = StateParams(
            alpha=rng.uniform(0, 4),
            theta=rng.uniform(-np.pi, np.pi),
            r=rng.uniform(0, 1.5),
            phi=rng.uniform(-np.pi, np.pi),
            purity=rng.uniform(0.05, 1.0),
        )
        n = mean_photon_number(p)
        assert photon_number_from_moments(make_state(p)) == pytest.approx(n, rel=1e-11, abs=1e-12)


def test_named_families_photon_numbers():
    assert mean_photon_number(StateParams.coherent(7.0)) == pytest.approx(7.0)
    assert mean_photon_number(StateParams.squeezed_vacuum(7.0)) == pytest.approx(7.0)
    for s in (0.0, 0.3, 1.0):
        assert mean_photon_number(StateParams.from_split(5.0, s)) == pytest.approx(5.0)


def test_rotate_phase_shifts_theta_only():
    p = StateParams(alpha=1.2, theta=0.1, r=0.5, phi=0.4, purity=0.8)
    back = extract_params(rotate_phase(make_state(p), 0.3))
    assert back.theta == pytest.approx(0.4)
    assert back.phi == pytest.approx(0.4)
    assert back.r == pytest.approx(0.5)


def test_pure_loss_on_coherent_and_squeezed_states():
    coh = pure_loss(make_state(StateParams.coherent(9.0)), 0.25)
    assert photon_number_from_moments(coh) == pytest.approx(9.0 * 0.25)
    assert coh.purity == pytest.approx(1.0)
    sq = pure_loss(make_state(StateParams.squeezed_vacuum(4.0)), 0.5)
    assert photon_number_from_moments(sq) == pytest.approx(2.0)
    assert sq.purity < 1.0
    assert pure_loss(make_state(StateParams.squeezed_vacuum(4.0)), 0.0).allclose(GaussianState.vacuum())


@pytest.mark.parametrize(
    "kwargs",
    [dict(purity=0.0), dict(purity=1.1), dict(alpha=-1.0), dict(r=-0.1)],
)
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ValueError):
        StateParams(**kwargs)


def test_unphysical_covariances_rejected():
    with pytest.raises(ValueError, match="symmetric"):
        GaussianState([0, 0], [[0.25, 0.1], [0.0, 0.25]])
    with pytest.raises(ValueError, match="positive definite"):
        GaussianState([0, 0], [[0.25, 0.3], [0.3, 0.25]])
    with pytest.raises(ValueError, match="purity"):
        GaussianState([0, 0], 0.1 * np.eye(2))
    with pytest.raises(ValueError):
        pure_loss(GaussianState.vacuum(), 1.5)


def test_arrays_are_read_only():
    state = make_state(StateParams(alpha=1.0))
    with pytest.raises(ValueError):
        state.covariance[0, 0] = 1.0


def test_multimode_vacuum_and_single_mode_guard():
    vac = GaussianState.vacuum(3)
    assert vac.n_modes == 3 and vac.purity == pytest.approx(1.0)
    with pytest.raises(ValueError, match="single-mode"):
        extract_params(vac)
