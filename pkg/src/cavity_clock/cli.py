"""Command-line entry point.

Usage::

    cavity-clock <command> --config PATH [--out PATH] [--format csv|json]
                 [--n-max INT] [--method series1|quadrature]
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .bogoliubov import (
    TrajectorySpec,
    building_block,
    free_phase_map,
    inertial_to_rindler_coeffs,
    round_trip_map,
    strip_particle_creation,
    trajectory_map,
)
from .circuit import max_photon_number, snr_vs_trajectories
from .config import COMMANDS, FORMATS, ConfigError, RunConfig, circuit_params, parse_config, sweep_spec
from .experiments import Table, run_sweep
from .gaussian import StateParams, make_state, mean_photon_number
from .metrology import phase_variance, qfi_closed_form, qfi_general

COEFFICIENT_COLUMNS = ("m", "n", "re_A", "im_A", "re_B", "im_B")


def _state_params(cfg: RunConfig) -> StateParams:
    return StateParams(**{k: cfg.params[k] for k in ("alpha", "theta", "r", "phi", "purity") if k in cfg.params})


def run_state(cfg: RunConfig, n_max: int, method: str) -> dict:
    params = _state_params(cfg)
    state = make_state(params)
    (x1, x2), cov = state.first_moments, state.covariance
    result = params.as_dict()
    result.update(
        x1=x1, x2=x2, sigma_11=cov[0, 0], sigma_12=cov[0, 1], sigma_22=cov[1, 1],
        n_photons=mean_photon_number(params),
    )
    return result


def run_qfi(cfg: RunConfig, n_max: int, method: str) -> dict:
    params = _state_params(cfg)
    value = qfi_closed_form(params)
    m = cfg.get("M", 1)
    result = params.as_dict()
    result.update(
        value=value,
        general=qfi_general(make_state(params)),
        M=m,
        delta_theta=phase_variance(value, m) if value > 0.0 else math.inf,
    )
    return result


def run_bogo(cfg: RunConfig, n_max: int, method: str) -> Table:
    p = cfg.params
    kind = p["map"]
    n_internal = p.get("n_internal")
    if kind == "inertial_to_rindler":
        bmap = inertial_to_rindler_coeffs(p["h"], n_max, method, n_internal)
    elif kind == "building_block":
        sign = int(p.get("sign", "+1"))
        bmap = building_block(p["h"], p["theta_a"], n_max, method, n_internal, sign)
    elif kind == "free_phase":
        bmap = free_phase_map(p["theta_a"], n_max, n_internal)
    elif kind == "trajectory":
        segments = p.get("segments")
        extra = {"segments": segments} if segments else {}
        bmap = trajectory_map(p["h"], p["theta_a"], p["theta_i"], n_max, method, n_internal=n_internal, **extra)
    else:
        spec_kwargs = {"segments": p["segments"]} if "segments" in p else {}
        spec = TrajectorySpec(p["acceleration"], p["t_a"], p["t_i"], p["L"], **spec_kwargs)
        bmap = round_trip_map(spec, n_max, method, n_internal)
    if p.get("strip") == "yes":
        bmap = strip_particle_creation(bmap)
    table = Table(COEFFICIENT_COLUMNS)
    for m in range(n_max):
        for n in range(n_max):
            a, b = complex(bmap.A[m, n]), complex(bmap.B[m, n])
            table.rows.append((m + 1, n + 1, a.real, a.imag, b.real, b.imag))
    return table


def run_sweep_command(cfg: RunConfig, n_max: int, method: str):
    params = dict(cfg.params, n_max=n_max, method=method)
    return run_sweep(sweep_spec(RunConfig(cfg.command, params)))


def run_circuit(cfg: RunConfig, n_max: int, method: str):
    p = circuit_params(cfg)
    if cfg.get("quantity", "snr") == "max_photons":
        return {"value": max_photon_number(p), **p.as_dict()}
    return snr_vs_trajectories(
        p, cfg.get("kind", "coherent"), cfg.get("k_max", 1000), cfg.get("loss_model", "pure_loss")
    )


RUNNERS = {
    "state": run_state,
    "qfi": run_qfi,
    "bogo": run_bogo,
    "sweep": run_sweep_command,
    "circuit": run_circuit,
}


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value) + 0.0, ".17g")  # + 0.0 folds -0 into 0
    return str(value)


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value) + 0.0
        return value if math.isfinite(value) else None
    return value


def render(result, fmt: str, metadata: dict) -> str:
    """Serialize a table or a scalar-result mapping deterministically."""
    if fmt == "csv":
        meta = " ".join(f"{k}={_format_value(v)}" for k, v in sorted(metadata.items()))
        lines = [f"# {meta}"]
        if isinstance(result, Table):
            lines.append(",".join(result.columns))
            lines += [",".join(_format_value(v) for v in row) for row in result.rows]
        else:
            keys = sorted(result)
            lines.append(",".join(keys))
            lines.append(",".join(_format_value(result[k]) for k in keys))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        if isinstance(result, Table):
            payload = {
                "columns": list(result.columns),
                "rows": [[_json_value(v) for v in row] for row in result.rows],
            }
        else:
            payload = {k: _json_value(v) for k, v in result.items()}
        payload["metadata"] = {k: _json_value(v) for k, v in metadata.items()}
        return json.dumps(payload, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(result, fmt: str, path=None, metadata: dict | None = None) -> None:
    """Write ``result`` to ``path`` atomically, or to stdout when no path is given."""
    text = render(result, fmt, metadata or {})
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.chmod(tmp, 0o666 & ~_umask())
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _summarize(value) -> str:
    """Compact text for a parameter value; long grids print as ``first..last[count]``."""
    if isinstance(value, tuple) and len(value) > 4 and all(isinstance(v, float) for v in value):
        return f"{value[0]!r}..{value[-1]!r}[{len(value)}]"
    if isinstance(value, tuple):
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def _metadata(cfg: RunConfig, n_max: int, method: str, source: str = "") -> dict:
    meta = {
        "version": __version__,
        "command": cfg.command,
        "n_max": n_max,
        "method": method,
        "params": ";".join(f"{k}={_summarize(v)}" for k, v in cfg.params.items() if k not in ("n_max", "method")),
    }
    if source:
        meta["config"] = source
    if cfg.command == "sweep" and "theta_0" not in cfg.params:
        meta["theta_0"] = "default(0)"
    return meta


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-clock", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="key = value configuration file")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--n-max", type=int, dest="n_max")
    parser.add_argument("--method", choices=("series1", "quadrature"))
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text, args.command)
    except ConfigError as exc:
        print(f"cavity-clock: invalid configuration {args.config}:\n{exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cavity-clock: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2

    n_max = args.n_max or cfg.get("n_max", 10)
    method = args.method or cfg.get("method", "quadrature")
    fmt = args.format or cfg.format
    out = args.out or cfg.output
    try:
        result = RUNNERS[cfg.command](cfg, n_max, method)
        emit(result, fmt, out, _metadata(cfg, n_max, method, Path(args.config).name))
    except Exception as exc:  # reported to the user with a nonzero status
        print(f"cavity-clock: {cfg.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
