"""Photon leakage and SQUID limits for a SQUID-terminated transmission-line cavity.

All quantities are SI except the external flux, which is given in units of the
flux quantum.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.constants import hbar, physical_constants

from .experiments import Table
from .gaussian import (
    GaussianState,
    StateParams,
    extract_params,
    make_state,
    photon_number_from_moments,
    pure_loss,
)
from .metrology import phase_variance, qfi_closed_form, qfi_general

FLUX_QUANTUM = physical_constants["mag. flux quantum"][0]

KINDS = ("coherent", "squeezed_vacuum")
LOSS_MODELS = ("pure_loss", "naive")
SNR_COLUMNS = ("k", "theta", "delta_theta", "snr", "n_remaining")


@dataclass(frozen=True)
class CircuitParams:
    """Resonator and SQUID parameters.

    ``L_eff`` is the effective cavity length at the working flux; the
    physical line length is derived from it by removing the two SQUIDs'
    inductance (see :func:`physical_length`).
    """

    L_eff: float
    delta_theta_traj: float
    L0: float = 0.44e-6
    Ic: float = 0.5e-6
    phi_ext: float = 0.4
    Q: float = 1.0e4
    kappa: float = 0.2
    v: float = 1.2e8
    t_traj: float = 4.0e-9

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")
        if not 0.0 <= self.phi_ext < 0.5:
            raise ValueError(f"phi_ext must lie in [0, 0.5) flux quanta, got {self.phi_ext}")
        for name in ("L_eff", "L0", "Ic", "Q", "v", "t_traj"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


SHORT_CAVITY = CircuitParams(L_eff=1.1e-2, delta_theta_traj=4.55e-3)
LONG_CAVITY = CircuitParams(L_eff=6.0e-2, delta_theta_traj=0.94e-3)
PRESETS = {"short": SHORT_CAVITY, "long": LONG_CAVITY}


def squid_critical_current(Ic: float, phi_ext: float) -> float:
    """Flux-tuned critical current ``2 Ic |cos(pi phi_ext)|`` of a symmetric SQUID."""
    if not Ic > 0.0:
        raise ValueError(f"junction critical current must be positive, got {Ic}")
    return 2.0 * Ic * abs(math.cos(math.pi * phi_ext))


def squid_inductance(Ic_eff: float, phase: float = 0.0) -> float:
    """Josephson inductance ``Phi0 / (2 pi Ic_eff cos phase)``."""
    return FLUX_QUANTUM / (2.0 * math.pi * Ic_eff * math.cos(phase))


def decay_time(Q: float, omega: float) -> float:
    return 2.0 * Q / omega


def decay(N_i: float, t_tot: float, Q: float, omega: float) -> float:
    """Photons left after ``t_tot`` of leakage."""
    return N_i * math.exp(-t_tot / decay_time(Q, omega))


def cavity_frequency(p: CircuitParams) -> float:
    """Fundamental angular frequency ``pi v / L_eff``."""
    return math.pi * p.v / p.L_eff


def physical_length(p: CircuitParams) -> float:
    """Line length ``L_eff - 2 L_SQ(0) / L0``."""
    Ic_eff = squid_critical_current(p.Ic, p.phi_ext)
    return p.L_eff - 2.0 * squid_inductance(Ic_eff) / p.L0


def max_photon_number(p: CircuitParams) -> float:
    """Largest photon number keeping the SQUID current at ``kappa Ic(phi_ext)``."""
    if not p.kappa < 1.0:
        raise ValueError("kappa must be below 1")
    Ic_eff = squid_critical_current(p.Ic, p.phi_ext)
    if Ic_eff == 0.0:
        return 0.0
    current = p.kappa * Ic_eff
    inductance = p.L0 * physical_length(p) + (FLUX_QUANTUM / math.pi) / (
        Ic_eff * math.sqrt(1.0 - p.kappa**2)
    )
    return inductance * current**2 / (2.0 * hbar * cavity_frequency(p))


def initial_state(kind: str, n_photons: float) -> StateParams:
    if kind == "coherent":
        return StateParams.coherent(n_photons)
    if kind == "squeezed_vacuum":
        return StateParams.squeezed_vacuum(n_photons)
    raise ValueError(f"unknown state kind {kind!r}; expected one of {KINDS}")


def transmissivity(p: CircuitParams, k) -> np.ndarray:
    """Fraction of photons surviving k trajectories."""
    tau = decay_time(p.Q, cavity_frequency(p))
    return np.exp(-np.asarray(k, dtype=float) * p.t_traj / tau)


def lossy_state(p: CircuitParams, kind: str, k: int, loss_model: str = "pure_loss") -> GaussianState:
    """Clock state after k trajectories of leakage."""
    n0 = max_photon_number(p)
    eta = float(transmissivity(p, k))
    if loss_model == "pure_loss":
        return pure_loss(make_state(initial_state(kind, n0)), eta)
    if loss_model == "naive":
        return make_state(initial_state(kind, eta * n0))
    raise ValueError(f"unknown loss model {loss_model!r}; expected one of {LOSS_MODELS}")


def snr_at(p: CircuitParams, kind: str, k: int, loss_model: str = "pure_loss") -> float:
    """Signal-to-noise ratio ``theta / delta_theta`` after k trajectories, one measurement."""
    if k == 0:
        return 0.0
    h = qfi_closed_form(extract_params(lossy_state(p, kind, k, loss_model)))
    return k * p.delta_theta_traj / phase_variance(h, 1)


def snr_vs_trajectories(
    p: CircuitParams, kind: str, k_max: int, loss_model: str = "pure_loss", general: bool = False
) -> Table:
    """Rows ``(k, theta, delta_theta, snr, n_remaining)`` for k = 0..k_max.

    ``general=True`` evaluates the QFI from the moments instead of the
    state parameters.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    if kind not in KINDS:
        raise ValueError(f"unknown state kind {kind!r}; expected one of {KINDS}")
    table = Table(SNR_COLUMNS)
    for k in range(k_max + 1):
        state = lossy_state(p, kind, k, loss_model)
        h = qfi_general(state) if general else qfi_closed_form(extract_params(state))
        delta = phase_variance(h, 1)
        theta = k * p.delta_theta_traj
        table.rows.append((k, theta, delta, theta / delta, photon_number_from_moments(state)))
    return table


def optimal_trajectories(p: CircuitParams, kind: str, k_max: int, loss_model: str = "pure_loss") -> int:
    """Trajectory count maximizing the SNR on 0..k_max."""
    table = snr_vs_trajectories(p, kind, k_max, loss_model)
    return int(np.argmax(table.column("snr")))

