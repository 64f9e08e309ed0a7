import math
from dataclasses import replace

import numpy as np
import pytest

from cavity_clock.circuit import (
    FLUX_QUANTUM,
    LONG_CAVITY,
    SHORT_CAVITY,
    SNR_COLUMNS,
    CircuitParams,
    cavity_frequency,
    decay,
    decay_time,
    lossy_state,
    max_photon_number,
    optimal_trajectories,
    physical_length,
    snr_at,
    snr_vs_trajectories,
    squid_critical_current,
    squid_inductance,
    transmissivity,
)


def test_squid_critical_current():
    assert squid_critical_current(0.5e-6, 0.0) == pytest.approx(1e-6)
    assert squid_critical_current(0.5e-6, 0.5) == pytest.approx(0.0, abs=1e-20)
    assert squid_critical_current(0.5e-6, 0.4) == pytest.approx(0.309e-6, rel=1e-3)
    assert squid_critical_current(0.5e-6, -0.4) == squid_critical_current(0.5e-6, 0.4)
    with pytest.raises(ValueError):
        squid_critical_current(0.0, 0.1)


def test_squid_inductance():
    assert squid_inductance(1e-6) == pytest.approx(FLUX_QUANTUM / (2 * math.pi * 1e-6))
    assert squid_inductance(1e-6, math.pi / 3) == pytest.approx(2 * squid_inductance(1e-6))


def test_decay_law():
    omega = 2 * math.pi * 5e9
    tau = decay_time(1e4, omega)
    assert tau == pytest.approx(6.37e-7, rel=1e-3)
    assert decay(10.0, 0.0, 1e4, omega) == 10.0
    assert decay(10.0, tau, 1e4, omega) == pytest.approx(10.0 / math.e)


def test_cavity_lengths():
    assert cavity_frequency(LONG_CAVITY) == pytest.approx(math.pi * 1.2e8 / 0.06)
    lam = physical_length(LONG_CAVITY)
    assert 0.0 < lam < LONG_CAVITY.L_eff


@pytest.mark.parametrize("cavity,target,tol", [(LONG_CAVITY, 78.5, 0.10), (SHORT_CAVITY, 2.98, 0.30)])
def test_max_photon_number_reproduces_estimates(cavity, target, tol):
    assert max_photon_number(cavity) == pytest.approx(target, rel=tol)


def test_max_photon_number_vanishes_with_current():
    tiny = max_photon_number(replace(LONG_CAVITY, kappa=1e-6))
    small = max_photon_number(replace(LONG_CAVITY, kappa=1e-3))
    assert tiny < 1e-8
    assert tiny / small == pytest.approx(1e-6, rel=1e-5)  # N ~ kappa^2
    assert max_photon_number(replace(LONG_CAVITY, kappa=0.4)) > max_photon_number(LONG_CAVITY)


def test_max_photon_number_falls_with_flux():
    # larger flux lowers the SQUID critical current and with it the current budget
    fluxes = np.linspace(0.0, 0.45, 10)
    values = [max_photon_number(replace(LONG_CAVITY, phi_ext=f)) for f in fluxes]
    assert np.all(np.diff(values) < 0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(kappa=1.0), dict(kappa=0.0), dict(phi_ext=0.5), dict(Q=0.0), dict(L_eff=-1.0)],
)
def test_parameter_validation(kwargs):
    with pytest.raises(ValueError):
        replace(LONG_CAVITY, **kwargs)


def test_transmissivity():
    assert transmissivity(SHORT_CAVITY, 0) == 1.0
    tau = decay_time(SHORT_CAVITY.Q, cavity_frequency(SHORT_CAVITY))
    assert transmissivity(SHORT_CAVITY, 10) == pytest.approx(math.exp(-10 * 4e-9 / tau))


def test_snr_table_schema_and_first_row():
    table = snr_vs_trajectories(SHORT_CAVITY, "coherent", 20)
    assert table.columns == SNR_COLUMNS == ("k", "theta", "delta_theta", "snr", "n_remaining")
    assert len(table) == 21
    assert table.rows[0][3] == 0.0
    assert np.all(np.diff(table.column("n_remaining")) < 0)


@pytest.mark.parametrize("cavity", [SHORT_CAVITY, LONG_CAVITY])
def test_coherent_snr_closed_form(cavity):
    n0 = max_photon_number(cavity)
    table = snr_vs_trajectories(cavity, "coherent", 200)
    k = table.column("k")
    eta = transmissivity(cavity, k)
    expected = np.sqrt(4 * eta * n0) * k * cavity.delta_theta_traj
    np.testing.assert_allclose(table.column("snr"), expected, rtol=1e-10)


@pytest.mark.parametrize("cavity", [SHORT_CAVITY, LONG_CAVITY])
@pytest.mark.parametrize("kind", ["coherent", "squeezed_vacuum"])
def test_snr_has_interior_optimum_and_decays(cavity, kind):
    k_max = 8000 if cavity is LONG_CAVITY else 2000
    k_star = optimal_trajectories(cavity, kind, k_max)
    assert 0 < k_star < k_max
    best = snr_at(cavity, kind, k_star)
    assert snr_at(cavity, kind, 50 * k_star) < best / 10


def test_squeezed_vacuum_beats_coherent_at_start():
    for cavity in (SHORT_CAVITY, LONG_CAVITY):
        assert snr_at(cavity, "squeezed_vacuum", 1) > snr_at(cavity, "coherent", 1)


def test_general_qfi_pipeline_agrees():
    a = snr_vs_trajectories(SHORT_CAVITY, "squeezed_vacuum", 50)
    b = snr_vs_trajectories(SHORT_CAVITY, "squeezed_vacuum", 50, general=True)
    np.testing.assert_allclose(a.column("snr"), b.column("snr"), rtol=1e-9)


def test_loss_models():
    k = 300
    pure = lossy_state(SHORT_CAVITY, "squeezed_vacuum", k)
    naive = lossy_state(SHORT_CAVITY, "squeezed_vacuum", k, "naive")
    assert naive.purity == pytest.approx(1.0)
    assert pure.purity < 1.0
    coh_pure = lossy_state(SHORT_CAVITY, "coherent", k)
    coh_naive = lossy_state(SHORT_CAVITY, "coherent", k, "naive")
    assert coh_pure.allclose(coh_naive, atol=1e-12)
    with pytest.raises(ValueError):
        lossy_state(SHORT_CAVITY, "coherent", k, "dephasing")


def test_snr_argument_validation():
    with pytest.raises(ValueError):
        snr_vs_trajectories(SHORT_CAVITY, "coherent", 0)
    with pytest.raises(ValueError):
        snr_vs_trajectories(SHORT_CAVITY, "fock", 10)


def test_custom_params():
    p = CircuitParams(L_eff=0.03, delta_theta_traj=2e-3)
    assert p.as_dict()["L0"] == 0.44e-6
    assert 2.98 * 0.5 < max_photon_number(p) < 78.5 * 1.1
