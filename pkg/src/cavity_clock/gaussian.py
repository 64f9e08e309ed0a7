"""Single- and multi-mode Gaussian states in the quadrature picture.

Quadratures are ``X_{2n-1} = (a_n + a_n^dagger)/2`` and
``X_{2n} = -i(a_n - a_n^dagger)/2``, so the vacuum covariance matrix is
``Identity/4``. This scale is the only convention used anywhere in the
package; every formula below assumes it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VACUUM_VARIANCE = 0.25

_SYMMETRY_TOL = 1e-12
_PURITY_SLACK = 1e-9
_DEGENERATE = 1e-12
_ARCTANH_CAP = 1.0 - 1e-15


def rotation(angle: float) -> np.ndarray:
    """Counter-clockwise 2x2 rotation matrix."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def wrap_angle(angle: float) -> float:
    """Map an angle onto the branch (-pi, pi]."""
    wrapped = -((-angle + np.pi) % (2.0 * np.pi) - np.pi)
    return float(wrapped)


@dataclass(frozen=True)
class StateParams:
    """Parametrization of a single-mode Gaussian state.

    Attributes
    ----------
    alpha : float
        Displacement magnitude, ``sqrt(<X1>^2 + <X2>^2)``.
    theta : float
        Phase of the displacement (the clock pointer), radians.
    r : float
        Squeezing magnitude.
    phi : float
        Squeezing angle, radians. ``phi = 0`` squeezes the quadrature
        orthogonal to the displacement (phase squeezing), ``phi = pi``
        squeezes along it (amplitude squeezing).
    purity : float
        ``1 / (4 sqrt(det sigma))``, in (0, 1].
    """

    alpha: float = 0.0
    theta: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    purity: float = 1.0

    def __post_init__(self):
        if not self.purity > 0.0:
            raise ValueError(f"purity must be positive, got {self.purity}")
        if self.purity > 1.0 + _PURITY_SLACK:
            raise ValueError(f"purity must not exceed 1, got {self.purity}")
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.r < 0.0:
            raise ValueError(f"r must be non-negative, got {self.r}")

    @classmethod
    def coherent(cls, n_photons: float, theta: float = 0.0) -> "StateParams":
        return cls(alpha=float(np.sqrt(n_photons)), theta=theta)

    @classmethod
    def squeezed_vacuum(cls, n_photons: float, phi: float = 0.0) -> "StateParams":
        return cls(r=float(np.arcsinh(np.sqrt(n_photons))), phi=phi)

    @classmethod
    def from_split(
        cls, n_photons: float, split: float, phi: float = 0.0, theta: float = 0.0
    ) -> "StateParams":
        """Pure state with a fraction ``split = alpha^2/N`` of the photons in displacement."""
        if not 0.0 <= split <= 1.0:
            raise ValueError(f"split must lie in [0, 1], got {split}")
        alpha = np.sqrt(split * n_photons)
        r = np.arcsinh(np.sqrt((1.0 - split) * n_photons))
        return cls(alpha=float(alpha), theta=theta, r=float(r), phi=phi)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "theta": self.theta,
            "r": self.r,
            "phi": self.phi,
            "purity": self.purity,
        }


@dataclass(frozen=True)
class GaussianState:
    """First moments and covariance matrix of an ``n_modes`` Gaussian state."""

    first_moments: np.ndarray
    covariance: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        moments = np.array(self.first_moments, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        if moments.size % 2 or moments.size == 0:
            raise ValueError("first moments must have even, non-zero length")
        if cov.shape != (moments.size, moments.size):
            raise ValueError(
                f"covariance shape {cov.shape} does not match {moments.size} quadratures"
            )
        if np.max(np.abs(cov - cov.T)) > _SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance matrix is not positive definite") from exc
        moments.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "first_moments", moments)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "n_modes", moments.size // 2)
        if self.n_modes == 1 and self.purity > 1.0 + _PURITY_SLACK:
            raise ValueError(f"unphysical single-mode state, purity {self.purity}")

    @classmethod
    def vacuum(cls, n_modes: int = 1) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))

    @property
    def purity(self) -> float:
        """Purity ``1/(4^N sqrt(det sigma))``; the single-mode form is ``1/(4 sqrt(det sigma))``."""
        det = np.linalg.det(self.covariance)
        return float(1.0 / (4.0**self.n_modes * np.sqrt(det)))

    def allclose(self, other: "GaussianState", atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.first_moments, other.first_moments, rtol=0, atol=atol)
            and np.allclose(self.covariance, other.covariance, rtol=0, atol=atol)
        )


def _require_single_mode(state: GaussianState) -> None:
    if state.n_modes != 1:
        raise ValueError(f"expected a single-mode state, got {state.n_modes} modes")


def make_state(params: StateParams) -> GaussianState:
    """Build the single-mode state described by ``params``.

    The squeezed axis sits at angle ``psi = theta + (phi + pi)/2``, which makes
    ``tan(2 theta + phi) = 2 sigma_12 / (sigma_11 - sigma_22)`` hold and gives
    the QFI its ``cosh 2r + sinh 2r cos phi`` dependence.
    """
    p = params
    moments = p.alpha * np.array([np.cos(p.theta), np.sin(p.theta)])
    psi = p.theta + 0.5 * (p.phi + np.pi)
    rot = rotation(psi)
    cov = rot @ np.diag([np.exp(-2.0 * p.r), np.exp(2.0 * p.r)]) @ rot.T
    cov = 0.5 * (cov + cov.T) / (4.0 * p.purity)
    return GaussianState(moments, cov)


def extract_params(state: GaussianState) -> StateParams:
    """Invert :func:`make_state`.

    Angles come back on (-pi, pi]. When the displacement (squeezing) is below
    1e-12 the undefined angle theta (phi) is reported as 0.
    """
    _require_single_mode(state)
    x1, x2 = state.first_moments
    s11, s12 = state.covariance[0]
    s22 = state.covariance[1, 1]

    alpha = float(np.hypot(x1, x2))
    theta = float(np.arctan2(x2, x1)) if alpha >= _DEGENERATE else 0.0

    purity = min(state.purity, 1.0)
    spread = np.hypot(s11 - s22, 2.0 * s12)
    ratio = min(max(spread / (s11 + s22), 0.0), _ARCTANH_CAP)
    r = 0.5 * float(np.arctanh(ratio))
    if r >= _DEGENERATE:
        phi = wrap_angle(np.arctan2(2.0 * s12, s11 - s22) - 2.0 * theta)
    else:
        phi = 0.0
    return StateParams(alpha=alpha, theta=wrap_angle(theta), r=r, phi=phi, purity=purity)


def mean_photon_number(params: StateParams) -> float:
    p = params
    return p.alpha**2 + 0.5 * (1.0 / p.purity - 1.0) + np.sinh(p.r) ** 2 / p.purity


def photon_number_from_moments(state: GaussianState) -> float:
    """``<a^dagger a>`` read off the moments: ``sigma_11 + sigma_22 - 1/2 + |<X>|^2``."""
    _require_single_mode(state)
    cov, x = state.covariance, state.first_moments
    return float(cov[0, 0] + cov[1, 1] - 0.5 + x @ x)


def rotate_phase(state: GaussianState, delta: float) -> GaussianState:
    _require_single_mode(state)
    rot = rotation(delta)
    cov = rot @ state.covariance @ rot.T
    return GaussianState(rot @ state.first_moments, 0.5 * (cov + cov.T))


def pure_loss(state: GaussianState, eta: float) -> GaussianState:
    """Pure-loss channel with transmissivity ``eta`` (mixing with vacuum)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    _require_single_mode(state)
    cov = eta * state.covariance + (1.0 - eta) * VACUUM_VARIANCE * np.eye(2)
    return GaussianState(np.sqrt(eta) * state.first_moments, cov)
