"""Quantum Fisher information and Cramer-Rao bounds for phase estimation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .gaussian import GaussianState, StateParams, _require_single_mode, extract_params, rotation

# Generator of phase rotations: d/dtheta R(theta) = GENERATOR @ R(theta).
GENERATOR = np.array([[0.0, -1.0], [1.0, 0.0]])

_FD_STEP = 1e-6


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str
    input_params: StateParams


def qfi_closed_form(params: StateParams) -> float:
    """Phase QFI from the state parameters.

    ``H = 4 alpha^2 P [cosh 2r + sinh 2r cos phi] + 4 sinh^2(2r) / (1 + P^2)``;
    independent of theta.
    """
    p = params
    displacement = 4.0 * p.alpha**2 * p.purity * (np.cosh(2 * p.r) + np.sinh(2 * p.r) * np.cos(p.phi))
    squeezing = 4.0 * np.sinh(2 * p.r) ** 2 / (1.0 + p.purity**2)
    return float(displacement + squeezing)


def gaussian_qfi(moments, d_moments, cov, d_cov) -> float:
    """QFI of a single-mode Gaussian family from its moments and their derivatives.

    Sum of the displacement term ``X'^T sigma^-1 X'``, the covariance term
    ``tr[(sigma^-1 sigma')^2] / (2 (1 + P^2))`` and the purity term
    ``2 P'^2 / (1 - P^4)``. The purity term is dropped when ``P'`` vanishes,
    which also covers the 0/0 form at ``P = 1``.
    """
    cov = np.asarray(cov, dtype=float)
    d_cov = np.asarray(d_cov, dtype=float)
    d_moments = np.asarray(d_moments, dtype=float)
    inv = np.linalg.inv(cov)
    purity = 1.0 / (4.0 * np.sqrt(np.linalg.det(cov)))
    d_purity = -0.5 * purity * np.trace(inv @ d_cov)

    value = d_moments @ inv @ d_moments
    prod = inv @ d_cov
    value += 0.5 * np.trace(prod @ prod) / (1.0 + purity**2)
    if abs(d_purity) > 1e-14:
        value += 2.0 * d_purity**2 / (1.0 - purity**4)
    return float(value)


def qfi_general(state: GaussianState, derivative: str = "analytic") -> float:
    """Phase QFI evaluated from the moments of ``state``.

    ``derivative="analytic"`` differentiates through the rotation generator;
    ``"finite_difference"`` uses a central difference of step 1e-6 and is
    meant only as a cross-check.
    """
    _require_single_mode(state)
    x, cov = state.first_moments, state.covariance
    if np.linalg.det(cov) <= 0.0:
        raise ValueError("singular covariance matrix")
    if derivative == "analytic":
        d_x = GENERATOR @ x
        d_cov = GENERATOR @ cov + cov @ GENERATOR.T
    elif derivative == "finite_difference":
        plus, minus = rotation(_FD_STEP), rotation(-_FD_STEP)
        d_x = (plus @ x - minus @ x) / (2 * _FD_STEP)
        d_cov = (plus @ cov @ plus.T - minus @ cov @ minus.T) / (2 * _FD_STEP)
    else:
        raise ValueError(f"unknown derivative mode {derivative!r}")
    return gaussian_qfi(x, d_x, cov, d_cov)


def qfi(state: GaussianState, method: str = "closed_form") -> QfiResult:
    params = extract_params(state)
    if method == "closed_form":
        value = qfi_closed_form(params)
    elif method == "general":
        value = qfi_general(state)
    else:
        raise ValueError(f"unknown QFI method {method!r}")
    return QfiResult(value=value, method=method, input_params=params)


def phase_variance(qfi_value: float, n_measurements: int = 1) -> float:
    """Cramer-Rao phase uncertainty ``1/sqrt(M H)``."""
    if not qfi_value > 0.0:
        raise ValueError(f"QFI must be positive for a finite bound, got {qfi_value}")
    if n_measurements < 1:
        raise ValueError(f"need at least one measurement, got {n_measurements}")
    return float(1.0 / np.sqrt(n_measurements * qfi_value))


def split_params(n_photons: float, split: float, phi: float, purity: float = 1.0) -> StateParams:
    """State with ``alpha^2 = split N`` and the remaining photons in squeezing at purity P.

    The thermal share ``(1/P - 1)/2`` is taken out of the squeezing budget, so
    ``split`` may not exceed ``1 - (1/P - 1)/(2N)``.
    """
    alpha2 = split * n_photons
    sinh2 = purity * ((1.0 - split) * n_photons - 0.5 * (1.0 / purity - 1.0))
    if sinh2 < -1e-12:
        raise ValueError("photon budget too small for the requested purity and split")
    r = np.arcsinh(np.sqrt(max(sinh2, 0.0)))
    return StateParams(alpha=float(np.sqrt(alpha2)), r=float(r), phi=phi, purity=purity)


def optimal_photon_split(n_photons: float, phi0: float = 0.0, purity: float = 1.0) -> float:
    """Fraction ``s = alpha^2/N`` maximizing the QFI at fixed mean photon number."""
    if not n_photons > 0.0:
        raise ValueError(f"photon number must be positive, got {n_photons}")
    s_max = 1.0 - 0.5 * (1.0 / purity - 1.0) / n_photons
    if s_max < 0.0:
        raise ValueError("photon number below the thermal floor of the requested purity")

    def objective(s):
        return -qfi_closed_form(split_params(n_photons, s, phi0, purity))

    grid = np.linspace(0.0, s_max, int(np.ceil(s_max / 1e-3)) + 1)
    values = np.array([objective(s) for s in grid])
    best = int(np.argmin(values))
    if best == 0 or best == grid.size - 1:
        return float(grid[best])
    res = minimize_scalar(
        objective, bracket=(grid[best - 1], grid[best], grid[best + 1]), method="golden"
    )
    return float(res.x) if res.fun <= values[best] else float(grid[best])
