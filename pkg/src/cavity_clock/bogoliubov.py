"""Bogoliubov maps between inertial and uniformly accelerated cavity modes.

Natural units ``c = 1`` with the proper cavity length as the unit of length,
so every map depends on the dimensionless acceleration ``h = a L / c^2``
alone. Coefficients follow ``b_m = sum_n (A_mn^* a_n - B_mn^* a_n^dagger)``.

Two routes produce the inertial-to-Rindler coefficients:

``quadrature``
    Klein-Gordon inner products of the Minkowski and Rindler mode functions
    on the shared ``t = eta = 0`` slice, integrated with Gauss-Legendre rules
    that are refined until two successive rules agree to 1e-10.
``series1``
    ``A = I + h A1``, ``B = h B1``, where ``A1`` and ``B1`` are the
    Richardson-extrapolated central differences of the quadrature at h = 0.

Maps are stored at an internal truncation (``2 n_max`` by default) that is
used for composition and for tracing out modes; ``A``/``B`` are the
``n_max x n_max`` crops.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import quad

from .gaussian import GaussianState, _require_single_mode

SPEED_OF_LIGHT = 299_792_458.0

H_MAX_QUADRATURE = 1.9
H_MAX_SERIES = 0.5
QUADRATURE_TOL = 1e-10
SERIES_STEP = 1e-3

CACHE_ENV = "CAVITY_CLOCK_CACHE_DIR"
METHODS = ("quadrature", "series1")


class QuadratureError(RuntimeError):
    """Raised when the overlap integrals do not reach the requested tolerance."""


@dataclass(frozen=True)
class RindlerCavity:
    """Cavity of proper length ``L`` whose centre has proper acceleration ``h/L`` (c = 1).

    ``wall_positions`` are the t = 0 wall positions in units of ``c^2/a``,
    i.e. ``1 -/+ h/2``.
    """

    h: float
    length: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.h < 2.0:
            raise ValueError(f"h must lie in [0, 2), got {self.h} (left wall at the horizon)")
        if not self.length > 0.0:
            raise ValueError(f"cavity length must be positive, got {self.length}")

    @property
    def acceleration(self) -> float:
        return self.h / self.length

    @property
    def wall_positions(self) -> tuple[float, float]:
        return (1.0 - 0.5 * self.h, 1.0 + 0.5 * self.h)

    @property
    def rindler_wall_coordinates(self) -> tuple[float, float]:
        """Rindler positions ``xi = ln(a x)/a`` of the two walls (flat positions at h = 0)."""
        if self.h == 0.0:
            return (-0.5 * self.length, 0.5 * self.length)
        a = self.acceleration
        return (np.log1p(-0.5 * self.h) / a, np.log1p(0.5 * self.h) / a)

    @property
    def rindler_separation(self) -> float:
        """``xi_R - xi_L = 2 arctanh(h/2)/a``, tending to ``L`` as h goes to 0."""
        return self.length * _rindler_width(self.h)

    def minkowski_frequency(self, n):
        return np.pi * np.asarray(n) / self.length

    def rindler_frequency(self, n):
        return np.pi * np.asarray(n) / self.rindler_separation

    def proper_length(self) -> float:
        """Proper length ``int exp(a xi) d xi`` between the walls, by adaptive quadrature."""
        if self.h == 0.0:
            return self.length
        a = self.acceleration
        xi_l, xi_r = self.rindler_wall_coordinates
        # exp(a xi) measured in units of c^2/a relative to the horizon.
        value, _ = quad(lambda xi: np.exp(a * xi), xi_l, xi_r, epsabs=0.0, epsrel=1e-12)
        return value


def rindler_geometry(h: float, L: float = 1.0) -> RindlerCavity:
    return RindlerCavity(h=float(h), length=float(L))


def _rindler_width(h: float) -> float:
    """Rindler wall separation in units of L; analytic in h and even."""
    if h == 0.0:
        return 1.0
    return 2.0 * float(np.arctanh(0.5 * h)) / h


def _mode_profiles(h: float, n_modes: int, nodes: int):
    """Mode profiles on Gauss-Legendre nodes ``u = x - c^2/a`` in [-1/2, 1/2].

    Works for either sign of ``h``; a negative value is the mirror-image
    cavity accelerating towards -x.
    """
    u, w = np.polynomial.legendre.leggauss(nodes)
    u, w = 0.5 * u, 0.5 * w
    n = np.arange(1, n_modes + 1)[:, None]
    norm = 1.0 / np.sqrt(np.pi * n)
    minkowski = norm * np.sin(np.pi * n * (u + 0.5))
    width = _rindler_width(h)
    if h == 0.0:
        fraction = u + 0.5
    else:
        # (xi - xi_L) / (xi_R - xi_L)
        fraction = (np.log1p(h * u) - np.log1p(-0.5 * h)) / (h * width)
    rindler = norm * np.sin(np.pi * n * fraction)
    lapse = 1.0 + h * u  # a x, so that d/d eta = a x d/dt on the slice
    omega = np.pi * n[:, 0]
    big_omega = omega / width
    return w, minkowski, rindler, lapse, omega, big_omega


def _overlaps(h: float, n_modes: int, nodes: int):
    w, phi, psi, lapse, omega, big_omega = _mode_profiles(h, n_modes, nodes)
    # (psi_m, phi_n) = int psi_m phi_n (omega_n + Omega_m / (a x)) dx
    static = (psi * w) @ phi.T * omega[None, :]
    moving = big_omega[:, None] * ((psi * w) @ (phi / lapse).T)
    return static + moving, static - moving


def quadrature_coefficients(h: float, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Real ``(A, B)`` with ``A_mn = (psi_m, phi_n)`` and ``B_mn = -(psi_m, phi_n^*)``.

    Gauss-Legendre rules are doubled until two successive rules agree to
    ``QUADRATURE_TOL`` on every element.
    """
    if n_modes < 1:
        raise ValueError(f"need at least one mode, got {n_modes}")
    if h == 0.0:
        return np.eye(n_modes), np.zeros((n_modes, n_modes))
    nodes = 64 + 16 * n_modes
    previous = _overlaps(h, n_modes, nodes)
    for _ in range(6):
        nodes *= 2
        current = _overlaps(h, n_modes, nodes)
        err = max(np.max(np.abs(current[0] - previous[0])), np.max(np.abs(current[1] - previous[1])))
        if err <= QUADRATURE_TOL:
            return current
        previous = current
    raise QuadratureError(f"overlap quadrature did not converge (h={h}, modes={n_modes}, err={err:.3g})")


def klein_gordon_gram(h: float, n_modes: int, family: str, nodes: int | None = None) -> np.ndarray:
    """Klein-Gordon self-products of the ``minkowski`` or ``rindler`` modes.

    Both are integrated on the t = 0 slice in the inertial coordinate, the same
    way the cross overlaps are, so the result checks the oracle's mode
    normalization and measure. Should equal the identity.
    """
    nodes = nodes or 4 * (64 + 16 * n_modes)
    w, phi, psi, lapse, omega, big_omega = _mode_profiles(h, n_modes, nodes)
    if family == "minkowski":
        return (omega[:, None] + omega[None, :]) * ((phi * w) @ phi.T)
    if family == "rindler":
        return (big_omega[:, None] + big_omega[None, :]) * ((psi * w) @ (psi / lapse).T)
    raise ValueError(f"unknown mode family {family!r}")


@functools.lru_cache(maxsize=None)
def _first_order_tables(n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    def central(step):
        plus = quadrature_coefficients(step, n_modes)
        minus = quadrature_coefficients(-step, n_modes)
        return tuple((p - m) / (2.0 * step) for p, m in zip(plus, minus))

    coarse = central(SERIES_STEP)
    fine = central(0.5 * SERIES_STEP)
    tables = tuple((4.0 * f - c) / 3.0 for f, c in zip(fine, coarse))
    for t in tables:
        t.flags.writeable = False
    return tables


def first_order_coefficients(n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """First-order tables ``(A1, B1)``: the derivatives of the overlaps at h = 0."""
    return _first_order_tables(int(n_modes))


@dataclass(frozen=True)
class BogoliubovMap:
    """Bogoliubov coefficients held at an internal truncation.

    ``A_full``/``B_full`` are the internal ``n_internal x n_internal``
    matrices; ``A``/``B`` crop them to ``n_max``.
    """

    A_full: np.ndarray
    B_full: np.ndarray
    n_max: int
    meta: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.array(self.A_full, dtype=complex)
        b = np.array(self.B_full, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValueError("A and B must be square matrices of equal shape")
        if not 1 <= self.n_max <= a.shape[0]:
            raise ValueError(f"n_max={self.n_max} outside internal truncation {a.shape[0]}")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A_full", a)
        object.__setattr__(self, "B_full", b)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    @property
    def n_internal(self) -> int:
        return self.A_full.shape[0]

    @property
    def A(self) -> np.ndarray:
        return self.A_full[: self.n_max, : self.n_max]

    @property
    def B(self) -> np.ndarray:
        return self.B_full[: self.n_max, : self.n_max]

    @property
    def method(self) -> str:
        return self.meta.get("method", "exact")

    def identity_defects(self, n_modes: int | None = None) -> tuple[float, float]:
        """Max-norm residuals of ``A A^dagger - B B^dagger = I`` and ``A B^T = B A^T``.

        Products run over the internal truncation; the residual is read on the
        leading ``n_modes`` (default ``n_max``) rows and columns.
        """
        k = n_modes or self.n_max
        a, b = self.A_full, self.B_full
        unitarity = a @ a.conj().T - b @ b.conj().T - np.eye(self.n_internal)
        symmetry = a @ b.T - b @ a.T
        return (float(np.max(np.abs(unitarity[:k, :k]))), float(np.max(np.abs(symmetry[:k, :k]))))


def _internal(n_max: int, n_internal: int | None) -> int:
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    size = 2 * n_max if n_internal is None else int(n_internal)
    if size < n_max:
        raise ValueError(f"internal truncation {size} below n_max {n_max}")
    return size


def _cache_path(method: str, h: float, size: int) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"{method}_h{h!r}_n{size}.csv"


def write_coefficients_csv(path, A: np.ndarray, B: np.ndarray) -> None:
    """Write coefficient tables as ``m,n,re_A,im_A,re_B,im_B`` rows (1-based indices)."""
    path = Path(path)
    lines = ["m,n,re_A,im_A,re_B,im_B"]
    for m in range(A.shape[0]):
        for n in range(A.shape[1]):
            a, b = complex(A[m, n]), complex(B[m, n])
            lines.append(f"{m + 1},{n + 1},{a.real!r},{a.imag!r},{b.real!r},{b.imag!r}")
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_coefficients_csv(path) -> tuple[np.ndarray, np.ndarray]:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    size = int(rows[:, 0].max())
    A = np.zeros((size, size), dtype=complex)
    B = np.zeros((size, size), dtype=complex)
    m = rows[:, 0].astype(int) - 1
    n = rows[:, 1].astype(int) - 1
    A[m, n] = rows[:, 2] + 1j * rows[:, 3]
    B[m, n] = rows[:, 4] + 1j * rows[:, 5]
    return A, B


@functools.lru_cache(maxsize=256)
def _coefficients(h: float, size: int, method: str) -> tuple[np.ndarray, np.ndarray]:
    path = _cache_path(method, h, size)
    if path is not None and path.exists():
        return read_coefficients_csv(path)
    if method == "quadrature":
        A, B = quadrature_coefficients(h, size)
    else:
        A1, B1 = first_order_coefficients(size)
        A, B = np.eye(size) + h * A1, h * B1
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_coefficients_csv(path, A, B)
    return A, B


def inertial_to_rindler_coeffs(
    h: float, n_max: int, method: str = "quadrature", n_internal: int | None = None
) -> BogoliubovMap:
    """Map from inertial cavity modes to the modes of the uniformly accelerated cavity."""
    size = _internal(n_max, n_internal)
    h = float(h)
    if method == "quadrature":
        limit = H_MAX_QUADRATURE
    elif method == "series1":
        limit = H_MAX_SERIES
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if not 0.0 <= h <= limit:
        raise ValueError(f"h={h} outside [0, {limit}] for method {method}")
    A, B = _coefficients(h, size, method)
    provenance = "quadrature" if method == "quadrature" else "series"
    return BogoliubovMap(A, B, n_max, {"provenance": provenance, "method": method, "h": h})


def identity_map(n_max: int, n_internal: int | None = None) -> BogoliubovMap:
    size = _internal(n_max, n_internal)
    return BogoliubovMap(np.eye(size), np.zeros((size, size)), n_max, {"provenance": "exact"})


def free_phase_map(theta1: float, n_max: int, n_internal: int | None = None) -> BogoliubovMap:
    """Free evolution advancing the phase of mode k by ``k theta1``."""
    size = _internal(n_max, n_internal)
    k = np.arange(1, size + 1)
    A = np.diag(np.exp(-1j * k * theta1))
    return BogoliubovMap(A, np.zeros((size, size)), n_max, {"provenance": "exact", "theta": theta1})


def _combined_method(outer: BogoliubovMap, inner: BogoliubovMap) -> str:
    methods = {outer.method, inner.method} - {"exact"}
    if len(methods) > 1:
        raise ValueError(f"cannot compose maps built with different methods {sorted(methods)}")
    return methods.pop() if methods else "exact"


def compose(outer: BogoliubovMap, inner: BogoliubovMap) -> BogoliubovMap:
    """Map equal to applying ``inner`` first, then ``outer``.

    With ``b = A1^* a - B1^* a^dagger`` and ``c = A2^* b - B2^* b^dagger``:
    ``A = A2 A1 + B2 B1^*`` and ``B = A2 B1 + B2 A1^*``.
    """
    if outer.n_internal != inner.n_internal or outer.n_max != inner.n_max:
        raise ValueError(
            f"truncation mismatch: ({outer.n_max}, {outer.n_internal}) vs ({inner.n_max}, {inner.n_internal})"
        )
    method = _combined_method(outer, inner)
    a2, b2, a1, b1 = outer.A_full, outer.B_full, inner.A_full, inner.B_full
    A = a2 @ a1 + b2 @ b1.conj()
    B = a2 @ b1 + b2 @ a1.conj()
    meta = {"provenance": "composed" if method != "exact" else "exact", "method": method}
    return BogoliubovMap(A, B, outer.n_max, meta)


def compose_all(maps: Sequence[BogoliubovMap]) -> BogoliubovMap:
    """Compose maps listed in the order they act (first element acts first)."""
    total = maps[0]
    for m in maps[1:]:
        total = compose(m, total)
    return total


def inverse(bmap: BogoliubovMap) -> BogoliubovMap:
    """Inverse transformation ``(A^dagger, -B^T)``; exact for an exact Bogoliubov map."""
    meta = dict(bmap.meta)
    meta["inverted"] = not meta.get("inverted", False)
    return BogoliubovMap(bmap.A_full.conj().T, -bmap.B_full.T, bmap.n_max, meta)


def reflect(bmap: BogoliubovMap) -> BogoliubovMap:
    """Mirror the cavity: ``X_mn -> (-1)^(m+n) X_mn`` for both coefficient sets."""
    k = np.arange(1, bmap.n_internal + 1)
    parity = (-1.0) ** np.add.outer(k, k)
    meta = dict(bmap.meta)
    meta["reflected"] = not meta.get("reflected", False)
    return BogoliubovMap(parity * bmap.A_full, parity * bmap.B_full, bmap.n_max, meta)


def strip_particle_creation(bmap: BogoliubovMap) -> BogoliubovMap:
    """Keep only mode mixing: ``B := 0``."""
    meta = dict(bmap.meta)
    meta["stripped"] = True
    return BogoliubovMap(bmap.A_full, np.zeros_like(bmap.B_full), bmap.n_max, meta)


@functools.lru_cache(maxsize=1024)
def building_block(
    h: float,
    theta_a: float,
    n_max: int,
    method: str = "quadrature",
    n_internal: int | None = None,
    sign: int = 1,
) -> BogoliubovMap:
    """Inertial-to-Rindler map, Rindler phase ``k theta_a`` on mode k, then back.

    ``sign=-1`` gives the segment accelerating towards -x, obtained by
    mirroring the cavity.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    to_rindler = inertial_to_rindler_coeffs(h, n_max, method, n_internal)
    if sign < 0:
        to_rindler = reflect(to_rindler)
    phase = free_phase_map(theta_a, n_max, to_rindler.n_internal)
    block = compose(inverse(to_rindler), compose(phase, to_rindler))
    meta = {
        "provenance": "composed",
        "method": method,
        "h": float(h),
        "theta_a": float(theta_a),
        "sign": sign,
    }
    return BogoliubovMap(block.A_full, block.B_full, n_max, meta)


def theta_a_from_trajectory(a: float, t_a: float, L: float) -> float:
    """Rindler phase of the fundamental mode over a segment of lab duration ``t_a`` (SI units)."""
    if not a > 0.0:
        raise ValueError(f"acceleration must be positive, got {a}")
    if t_a < 0.0:
        raise ValueError(f"segment duration must be non-negative, got {t_a}")
    h = a * L / SPEED_OF_LIGHT**2
    if h >= 2.0:
        raise ValueError(f"h = aL/c^2 = {h} must be below 2")
    return float(np.pi * np.arcsinh(a * t_a / SPEED_OF_LIGHT) / (2.0 * np.arctanh(0.5 * h)))


DEFAULT_SEGMENTS = ("+a", "inertial", "-a", "-a", "inertial", "+a")


@dataclass(frozen=True)
class TrajectorySpec:
    """Piecewise trajectory of the cavity centre, SI units.

    ``segments`` lists, in time order, accelerated segments (``"+a"`` or
    ``"-a"``, each of lab duration ``t_a``) and ``"inertial"`` segments of lab
    duration ``t_i``. The default is the out-and-back trip.
    """

    acceleration: float
    t_a: float
    t_i: float
    length: float
    segments: tuple = DEFAULT_SEGMENTS

    def __post_init__(self):
        if not self.acceleration > 0.0:
            raise ValueError("acceleration must be positive")
        if not self.t_a > 0.0:
            raise ValueError("accelerated segments need a positive duration")
        if self.t_i < 0.0:
            raise ValueError("inertial duration must be non-negative")
        if not self.length > 0.0:
            raise ValueError("cavity length must be positive")
        unknown = set(self.segments) - {"+a", "-a", "inertial"}
        if unknown:
            raise ValueError(f"unknown segment kinds {sorted(unknown)}")
        if self.h >= 2.0:
            raise ValueError(f"h = {self.h} must be below 2")

    @property
    def h(self) -> float:
        return self.acceleration * self.length / SPEED_OF_LIGHT**2

    @property
    def theta_a(self) -> float:
        return theta_a_from_trajectory(self.acceleration, self.t_a, self.length)

    @property
    def velocity(self) -> float:
        """Coasting speed reached after one accelerated segment."""
        w = self.acceleration * self.t_a
        return w / np.sqrt(1.0 + (w / SPEED_OF_LIGHT) ** 2)

    @property
    def theta_i(self) -> float:
        """Fundamental-mode phase over an inertial segment (proper time times omega_1)."""
        omega1 = np.pi * SPEED_OF_LIGHT / self.length
        return float(omega1 * self.t_i * np.sqrt(1.0 - (self.velocity / SPEED_OF_LIGHT) ** 2))

    @property
    def total_lab_time(self) -> float:
        n_acc = sum(1 for s in self.segments if s != "inertial")
        n_inertial = len(self.segments) - n_acc
        return n_acc * self.t_a + n_inertial * self.t_i


def trajectory_map(
    h: float,
    theta_a: float,
    theta_i: float,
    n_max: int,
    method: str = "quadrature",
    segments: Sequence[str] = DEFAULT_SEGMENTS,
    n_internal: int | None = None,
) -> BogoliubovMap:
    """Compose building blocks and free phases for ``segments`` in dimensionless form."""
    pieces = []
    for seg in segments:
        if seg == "inertial":
            pieces.append(free_phase_map(theta_i, n_max, _internal(n_max, n_internal)))
        elif seg in ("+a", "-a"):
            sign = 1 if seg == "+a" else -1
            pieces.append(building_block(h, theta_a, n_max, method, n_internal, sign))
        else:
            raise ValueError(f"unknown segment kind {seg!r}")
    total = compose_all(pieces)
    meta = dict(total.meta)
    meta.update({"h": float(h), "theta_a": float(theta_a), "theta_i": float(theta_i)})
    return BogoliubovMap(total.A_full, total.B_full, n_max, meta)


def round_trip_map(
    spec: TrajectorySpec, n_max: int, method: str = "quadrature", n_internal: int | None = None
) -> BogoliubovMap:
    return trajectory_map(
        spec.h, spec.theta_a, spec.theta_i, n_max, method, spec.segments, n_internal
    )


def m_blocks(bmap: BogoliubovMap, k: int) -> np.ndarray:
    """The 2x2 quadrature blocks ``M_kn`` for every internal column n, shape (n_internal, 2, 2)."""
    a, b = bmap.A_full[k - 1], bmap.B_full[k - 1]
    diff, total = a - b, a + b
    blocks = np.empty((bmap.n_internal, 2, 2))
    blocks[:, 0, 0] = diff.real
    blocks[:, 0, 1] = total.imag
    blocks[:, 1, 0] = -diff.imag
    blocks[:, 1, 1] = total.real
    return blocks


def apply_to_mode(bmap: BogoliubovMap, state0: GaussianState, k: int = 1) -> GaussianState:
    """Reduced state of mode k when mode k starts in ``state0`` and all other modes in vacuum."""
    _require_single_mode(state0)
    if not 1 <= k <= bmap.n_max:
        raise ValueError(f"mode index {k} outside 1..{bmap.n_max}")
    blocks = m_blocks(bmap, k)
    own = blocks[k - 1]
    others = np.delete(blocks, k - 1, axis=0)
    cov = own @ state0.covariance @ own.T + 0.25 * np.einsum("nij,nkj->ik", others, others)
    moments = own @ state0.first_moments
    return GaussianState(moments, 0.5 * (cov + cov.T))
