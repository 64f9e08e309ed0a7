import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavity_clock.gaussian import GaussianState, StateParams, make_state, mean_photon_number, rotate_phase
from cavity_clock.metrology import (
    gaussian_qfi,
    optimal_photon_split,
    phase_variance,
    qfi,
    qfi_closed_form,
    qfi_general,
    split_params,
)


def test_coherent_qfi_is_four_n():
    for n in (0.5, 1.0, 10.0, 78.5):
        assert qfi_closed_form(StateParams.coherent(n)) == pytest.approx(4 * n, rel=1e-14)


def test_vacuum_qfi_is_zero():
    assert qfi_closed_form(StateParams()) == 0.0
    assert qfi_general(GaussianState.vacuum()) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0, 2.0])
def test_squeezed_vacuum_qfi(r):
    n = np.sinh(r) ** 2
    h = qfi_closed_form(StateParams(r=r))
    assert h == pytest.approx(2 * np.sinh(2 * r) ** 2, rel=1e-13)
    assert h == pytest.approx(8 * n * (n + 1), rel=1e-12)


def test_phase_versus_amplitude_squeezing():
    phase = qfi_closed_form(StateParams(alpha=1.0, r=0.5, phi=0.0))
    amplitude = qfi_closed_form(StateParams(alpha=1.0, r=0.5, phi=np.pi))
    assert phase == pytest.approx(4 * np.exp(1.0) + 2 * np.sinh(1.0) ** 2)
    assert amplitude == pytest.approx(4 * np.exp(-1.0) + 2 * np.sinh(1.0) ** 2)


def test_thermal_family_purity_term():
    """P = tau, sigma = I/(4 tau): only the purity term contributes, H = 1/(tau^2 (1 - tau^2)).

    The family is parametrized by tau itself (not a phase), so this exercises
    the P' term of the general formula directly.
    """
    for tau in (0.2, 0.5, 0.9):
        cov = np.eye(2) / (4 * tau)
        d_cov = -np.eye(2) / (4 * tau**2)
        value = gaussian_qfi(np.zeros(2), np.zeros(2), cov, d_cov)
        assert value == pytest.approx(1.0 / (tau**2 * (1 - tau**2)), rel=1e-12)


mixed = st.builds(
    StateParams,
    alpha=st.floats(0, 4),
    theta=st.floats(-3, 3),
    r=st.floats(0, 1.5),
    phi=st.floats(-3, 3),
    purity=st.floats(0.1, 1.0),
)


@settings(max_examples=300, deadline=None)
@given(mixed)
def test_general_matches_closed_form(params):
    closed = qfi_closed_form(params)
    general = qfi_general(make_state(params))
    assert general == pytest.approx(closed, rel=1e-9, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(mixed, st.floats(-3, 3))
def test_qfi_invariant_under_phase_rotation(params, delta):
    state = make_state(params)
    assert qfi_general(rotate_phase(state, delta)) == pytest.approx(qfi_general(state), rel=1e-10, abs=1e-10)


def test_finite_difference_cross_check():
    state = make_state(StateParams(alpha=1.5, theta=0.3, r=0.6, phi=0.8, purity=0.7))
    analytic = qfi_general(state)
    fd = qfi_general(state, derivative="finite_difference")
    assert fd == pytest.approx(analytic, rel=1e-6)
    with pytest.raises(ValueError):
        qfi_general(state, derivative="spline")


def test_qfi_result_records_inputs():
    res = qfi(make_state(StateParams.coherent(2.0)), method="general")
    assert res.method == "general"
    assert res.value == pytest.approx(8.0)
    assert res.input_params.alpha == pytest.approx(np.sqrt(2.0))


def test_phase_variance():
    assert phase_variance(4.0) == 0.5
    assert phase_variance(4.0, 4) == 0.25
    with pytest.raises(ValueError):
        phase_variance(0.0)
    with pytest.raises(ValueError):
        phase_variance(1.0, 0)


@pytest.mark.parametrize("n", [1.0, 5.0, 10.0])
@pytest.mark.parametrize("phi0", [0.0, np.pi])
def test_squeezed_vacuum_is_optimal_for_pure_states(n, phi0):
    assert optimal_photon_split(n, phi0) == 0.0


def test_optimal_split_for_mixed_states_stays_in_range():
    s = optimal_photon_split(5.0, 0.0, purity=0.5)
    assert 0.0 <= s <= 1.0
    best = qfi_closed_form(split_params(5.0, s, 0.0, 0.5))
    for other in np.linspace(0, 1 - 0.5 / 5.0, 37):
        assert best >= qfi_closed_form(split_params(5.0, other, 0.0, 0.5)) - 1e-9


def test_split_params_budget():
    p = split_params(4.0, 0.25, 0.0, purity=0.8)
    assert mean_photon_number(p) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        split_params(0.1, 0.9, 0.0, purity=0.2)
