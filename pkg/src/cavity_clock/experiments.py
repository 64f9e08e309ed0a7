"""Parameter sweeps over building-block transformations of the clock mode."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np
from scipy.optimize import bisect

from .bogoliubov import apply_to_mode, building_block, strip_particle_creation
from .gaussian import GaussianState, StateParams, extract_params, make_state, mean_photon_number
from .metrology import qfi_closed_form, split_params

FLAGS = ("full", "mode_mixing_only")
FAMILIES = ("coherent", "squeezed_vacuum", "split", "vacuum")
AXES = ("h", "theta_a", "theta_0", "N", "s", "phi_0")
SWEEP_H_MAX = 0.5

COLUMNS = AXES + (
    "alpha",
    "theta",
    "r",
    "phi",
    "purity",
    "n_photons",
    "qfi_initial",
    "qfi_transformed",
    "qfi_ratio",
    "ratio_full",
    "ratio_mode_mixing",
    "creation_shift",
)

DEFAULT_AXES = {"h": 0.1, "theta_a": math.pi, "theta_0": 0.0, "N": 1.0, "phi_0": 0.0}


class SweepError(RuntimeError):
    pass


@dataclass
class Table:
    """Column-named rows, kept in evaluation order."""

    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows], dtype=float)

    def __len__(self):
        return len(self.rows)


def _check_flag(flag: str) -> None:
    if flag not in FLAGS:
        raise ValueError(f"unknown flag {flag!r}; expected one of {FLAGS}")


def transformed_state(
    initial: StateParams,
    h: float,
    theta_a: float,
    flag: str = "full",
    n_max: int = 10,
    method: str = "quadrature",
    n_internal: int | None = None,
) -> GaussianState:
    """Clock-mode state after one building block, higher modes starting in vacuum."""
    _check_flag(flag)
    bmap = building_block(float(h), float(theta_a), n_max, method, n_internal)
    if flag == "mode_mixing_only":
        bmap = strip_particle_creation(bmap)
    return apply_to_mode(bmap, make_state(initial), k=1)


def qfi_ratio(initial: StateParams, h: float, theta_a: float, flag: str = "full", **kwargs) -> float:
    """Transformed over initial phase QFI."""
    base = qfi_closed_form(initial)
    if not base > 0.0:
        raise ValueError("initial state carries no phase information")
    final = qfi_closed_form(extract_params(transformed_state(initial, h, theta_a, flag, **kwargs)))
    return final / base


def creation_shift(initial: StateParams, h: float, theta_a: float, theta_0: float, **kwargs) -> float:
    """QFI difference with and without particle creation, normalized to the initial QFI."""
    start = replace(initial, theta=theta_0)
    full = qfi_ratio(start, h, theta_a, "full", **kwargs)
    mixing = qfi_ratio(start, h, theta_a, "mode_mixing_only", **kwargs)
    return full - mixing


def vacuum_squeezing(h: float, theta_a: float, **kwargs) -> float:
    """Squeezing generated in the clock mode from vacuum."""
    if h > SWEEP_H_MAX:
        raise ValueError(f"h={h} above {SWEEP_H_MAX}")
    return extract_params(transformed_state(StateParams(), h, theta_a, "full", **kwargs)).r


def low_n_enhancement(
    h: float, theta_a: float, n_low: float = 1e-8, n_high: float = 1.0, **kwargs
) -> float | None:
    """Photon number below which motion raises the QFI of a coherent state.

    Bisects ``ratio(N) = 1`` in ``log N`` on ``(n_low, n_high]`` to a relative
    tolerance of 1e-6. Returns ``None`` when the ratio does not cross 1 there.
    """
    if h > SWEEP_H_MAX:
        raise ValueError(f"h={h} above {SWEEP_H_MAX}")

    def excess(log_n):
        return qfi_ratio(StateParams.coherent(math.exp(log_n)), h, theta_a, "full", **kwargs) - 1.0

    lo, hi = math.log(n_low), math.log(n_high)
    f_lo, f_hi = excess(lo), excess(hi)
    if not (f_lo > 0.0 and f_hi < 0.0):
        return None
    return math.exp(bisect(excess, lo, hi, xtol=1e-6, rtol=1e-12))


def converge_truncation(
    observable: Callable[[int], float], n_max: int, tol: float = 1e-8, max_internal: int = 640
) -> tuple[float, int]:
    """Double the internal truncation from ``2 n_max`` until ``observable`` moves by less than ``tol``."""
    size = 2 * n_max
    value = observable(size)
    while size < max_internal:
        size *= 2
        new = observable(size)
        if abs(new - value) < tol:
            return new, size
        value = new
    raise RuntimeError(f"observable not converged to {tol} by internal truncation {size}")


@dataclass(frozen=True)
class SweepSpec:
    """Grid of building-block evaluations.

    ``family`` fixes how the initial state is built from the ``N``, ``s``,
    ``phi_0`` and ``theta_0`` axes: coherent (``s = 1``), squeezed vacuum
    (``s = 0``), a displacement/squeezing ``split`` (``s`` swept), or vacuum.
    Unswept axes take their defaults.
    """

    family: str
    axes: Mapping[str, tuple]
    flag: str = "full"
    n_max: int = 10
    method: str = "quadrature"
    purity: float = 1.0
    outputs: tuple | None = None
    n_internal: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        _check_flag(self.flag)
        unknown = set(self.axes) - set(AXES)
        if unknown:
            raise ValueError(f"unknown axes {sorted(unknown)}")
        axes = {}
        for name in AXES:
            values = self.axes.get(name)
            if values is None:
                values = (self._default(name),)
            values = tuple(float(v) for v in np.atleast_1d(values))
            if not values:
                raise ValueError(f"axis {name} is empty")
            axes[name] = values
        if self.family in ("coherent", "squeezed_vacuum") and "s" in self.axes:
            raise ValueError(f"family {self.family} fixes s; do not sweep it")
        if self.family == "vacuum" and ("N" in self.axes or "s" in self.axes):
            raise ValueError("vacuum family has N = 0; do not sweep N or s")
        if any(not 0.0 <= v <= SWEEP_H_MAX for v in axes["h"]):
            raise ValueError(f"h values must lie in [0, {SWEEP_H_MAX}]")
        if any(not 0.0 <= v <= 1.0 for v in axes["s"]):
            raise ValueError("split values must lie in [0, 1]")
        if self.family != "vacuum" and any(not v > 0.0 for v in axes["N"]):
            raise ValueError("photon numbers must be positive")
        if self.outputs is not None:
            bad = set(self.outputs) - set(COLUMNS)
            if bad:
                raise ValueError(f"unknown output columns {sorted(bad)}")
        object.__setattr__(self, "axes", axes)

    def _default(self, name):
        if name == "s":
            return {"coherent": 1.0, "squeezed_vacuum": 0.0, "split": 0.0, "vacuum": 0.0}[self.family]
        if name == "N" and self.family == "vacuum":
            return 0.0
        return DEFAULT_AXES[name]

    @property
    def columns(self) -> tuple:
        return tuple(self.outputs) if self.outputs else COLUMNS

    def initial_state(self, n_photons: float, split: float, phi_0: float, theta_0: float) -> StateParams:
        if self.family == "vacuum":
            return StateParams(theta=theta_0, phi=phi_0, purity=self.purity)
        params = split_params(n_photons, split, phi_0, self.purity)
        return replace(params, theta=theta_0)


def _ratio(value: float, base: float) -> float:
    return value / base if base > 0.0 else math.nan


def evaluate_point(spec: SweepSpec, point: Mapping[str, float]) -> dict:
    initial = spec.initial_state(point["N"], point["s"], point["phi_0"], point["theta_0"])
    kwargs = {"n_max": spec.n_max, "method": spec.method, "n_internal": spec.n_internal}
    full = transformed_state(initial, point["h"], point["theta_a"], "full", **kwargs)
    mixing = transformed_state(initial, point["h"], point["theta_a"], "mode_mixing_only", **kwargs)
    base = qfi_closed_form(initial)
    params_full, params_mixing = extract_params(full), extract_params(mixing)
    qfi_full, qfi_mixing = qfi_closed_form(params_full), qfi_closed_form(params_mixing)
    chosen = params_full if spec.flag == "full" else params_mixing
    qfi_chosen = qfi_full if spec.flag == "full" else qfi_mixing
    row = dict(point)
    row.update(chosen.as_dict())
    row.update(
        n_photons=mean_photon_number(chosen),
        qfi_initial=base,
        qfi_transformed=qfi_chosen,
        qfi_ratio=_ratio(qfi_chosen, base),
        ratio_full=_ratio(qfi_full, base),
        ratio_mode_mixing=_ratio(qfi_mixing, base),
        creation_shift=_ratio(qfi_full - qfi_mixing, base),
    )
    return row


def grid_points(spec: SweepSpec):
    for values in itertools.product(*(spec.axes[name] for name in AXES)):
        yield dict(zip(AXES, values))


def run_sweep(spec: SweepSpec) -> Table:
    """Evaluate every grid point, rows in lexicographic axis order."""
    columns = spec.columns
    table = Table(columns)
    for point in grid_points(spec):
        try:
            row = evaluate_point(spec, point)
        except Exception as exc:
            raise SweepError(f"sweep failed at grid point {point}: {exc}") from exc
        table.rows.append(tuple(row[c] for c in columns))
    return table
