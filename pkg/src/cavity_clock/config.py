"""Flat ``key = value`` run configurations.

Lines hold one assignment each; ``#`` starts a comment. Real values accept
arithmetic with ``pi`` (``theta_a = pi``, ``theta_0 = pi/2``). Grid values
are comma-separated lists or ``linspace(start, stop, num)`` /
``geomspace(start, stop, num)``.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import PRESETS, CircuitParams
from .experiments import AXES, SweepSpec
from .gaussian import StateParams

COMMANDS = ("state", "bogo", "qfi", "sweep", "circuit")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; the message lists every problem found."""


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_CONSTANTS = {"pi": math.pi, "e": math.e}


def _eval_node(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _CONSTANTS:
        return _CONSTANTS[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval_node(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    raise ValueError("unsupported expression")


def parse_real(text: str) -> float:
    try:
        return float(_eval_node(ast.parse(text.strip(), mode="eval").body))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a real number: {text!r}") from exc


def parse_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ValueError(f"not an integer: {text!r}") from exc


def parse_grid(text: str) -> tuple:
    text = text.strip()
    for name, fn in (("linspace", np.linspace), ("geomspace", np.geomspace)):
        if text.startswith(name + "(") and text.endswith(")"):
            args = [a for a in text[len(name) + 1 : -1].split(",")]
            if len(args) != 3:
                raise ValueError(f"{name} takes (start, stop, num)")
            start, stop = parse_real(args[0]), parse_real(args[1])
            return tuple(float(v) for v in fn(start, stop, parse_int(args[2])))
    values = tuple(parse_real(v) for v in text.split(","))
    if not values:
        raise ValueError("empty grid")
    return values


def parse_list(text: str) -> tuple:
    return tuple(v.strip() for v in text.split(",") if v.strip())


@dataclass(frozen=True)
class Key:
    kind: str  # real | int | grid | list | string | enum
    choices: tuple = ()
    required: bool = False

    def parse(self, text: str):
        if self.kind == "real":
            return parse_real(text)
        if self.kind == "int":
            return parse_int(text)
        if self.kind == "grid":
            return parse_grid(text)
        if self.kind == "list":
            return parse_list(text)
        value = text.strip()
        if self.kind == "enum" and value not in self.choices:
            raise ValueError(f"{value!r} is not one of {', '.join(self.choices)}")
        return value

    def format(self, value) -> str:
        if self.kind == "real":
            return repr(float(value))
        if self.kind == "grid":
            return ", ".join(repr(float(v)) for v in value)
        if self.kind == "list":
            return ", ".join(value)
        return str(value)


_COMMON = {
    "n_max": Key("int"),
    "method": Key("enum", ("quadrature", "series1")),
}
_STATE = {name: Key("real") for name in ("alpha", "theta", "r", "phi", "purity")}
_CIRCUIT_REALS = ("L0", "Ic", "phi_ext", "Q", "kappa", "L_eff", "v", "t_traj", "delta_theta_traj")

SCHEMA = {
    "state": dict(_STATE),
    "qfi": dict(_STATE, M=Key("int")),
    "bogo": {
        "map": Key(
            "enum",
            ("inertial_to_rindler", "building_block", "free_phase", "trajectory", "round_trip"),
            required=True,
        ),
        "h": Key("real"),
        "theta_a": Key("real"),
        "theta_i": Key("real"),
        "sign": Key("enum", ("+1", "-1")),
        "segments": Key("list"),
        "strip": Key("enum", ("yes", "no")),
        "acceleration": Key("real"),
        "t_a": Key("real"),
        "t_i": Key("real"),
        "L": Key("real"),
        "n_internal": Key("int"),
    },
    "sweep": {
        "family": Key("enum", ("coherent", "squeezed_vacuum", "split", "vacuum"), required=True),
        "h": Key("grid"),
        "theta_a": Key("grid"),
        "theta_0": Key("grid"),
        "N": Key("grid"),
        "s": Key("grid"),
        "phi_0": Key("grid"),
        "flag": Key("enum", ("full", "mode_mixing_only")),
        "purity": Key("real"),
        "outputs": Key("list"),
        "n_internal": Key("int"),
    },
    "circuit": dict(
        {name: Key("real") for name in _CIRCUIT_REALS},
        cavity=Key("enum", ("short", "long", "custom"), required=True),
        quantity=Key("enum", ("snr", "max_photons")),
        kind=Key("enum", ("coherent", "squeezed_vacuum")),
        k_max=Key("int"),
        loss_model=Key("enum", ("pure_loss", "naive")),
    ),
}

# Keys that need a command-specific requirement beyond SCHEMA.
_BOGO_NEEDS = {
    "inertial_to_rindler": ("h",),
    "building_block": ("h", "theta_a"),
    "free_phase": ("theta_a",),
    "trajectory": ("h", "theta_a", "theta_i"),
    "round_trip": ("acceleration", "t_a", "t_i", "L"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"

    def get(self, key, default=None):
        return self.params.get(key, default)


def _schema(command: str) -> dict:
    return dict(_COMMON, **SCHEMA[command])


def _validate(command: str, params: dict) -> list[str]:
    """Domain preconditions that can be checked before any computation."""
    errors = []
    method = params.get("method", "quadrature")
    if command == "bogo":
        needed = _BOGO_NEEDS.get(params.get("map"), ())
        errors += [f"missing required key {k!r} for map {params['map']}" for k in needed if k not in params]
        if "h" in params:
            h = params["h"]
            limit = 0.5 if method == "series1" else 1.9
            if not 0.0 <= h < 2.0:
                errors.append(f"h={h} must lie in [0, 2) (left wall reaches the horizon)")
            elif h > limit:
                errors.append(f"h={h} exceeds {limit} for method {method}")
    if command == "sweep":
        try:
            sweep_spec(RunConfig(command, params))
        except ValueError as exc:
            errors.append(str(exc))
    if command == "circuit":
        try:
            circuit_params(RunConfig(command, params))
        except ValueError as exc:
            errors.append(str(exc))
    if command in ("state", "qfi"):
        try:
            StateParams(**{k: params[k] for k in _STATE if k in params})
        except ValueError as exc:
            errors.append(str(exc))
        if params.get("M", 1) < 1:
            errors.append("M must be at least 1")
    if params.get("n_max", 1) < 1:
        errors.append("n_max must be at least 1")
    return errors


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse configuration text; ``command`` is the subcommand given on the command line."""
    errors = []
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = (lineno, value)

    declared = raw.pop("command", (None, None))[1]
    if declared is not None and command is not None and declared != command:
        errors.append(f"config is for command {declared!r}, not {command!r}")
    command = command or declared
    if command is None:
        raise ConfigError("missing required key 'command'")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")

    output = raw.pop("out", (None, None))[1]
    fmt = raw.pop("format", (None, "csv"))
    if fmt[1] not in FORMATS:
        errors.append(f"line {fmt[0]}: format must be one of {', '.join(FORMATS)}")

    schema = _schema(command)
    params = {}
    for key, (lineno, value) in raw.items():
        if key not in schema:
            errors.append(f"line {lineno}: unknown key {key!r} for command {command}")
            continue
        try:
            params[key] = schema[key].parse(value)
        except ValueError as exc:
            errors.append(f"line {lineno}: {key}: {exc}")
    for key, spec in schema.items():
        if spec.required and key not in raw:
            errors.append(f"missing required key {key!r}")
    if not errors:
        errors = _validate(command, params)
    if errors:
        raise ConfigError("\n".join(errors))
    return RunConfig(command, params, output, fmt[1])


def format_config(config: RunConfig) -> str:
    """Render ``config`` so that :func:`parse_config` gives it back."""
    schema = _schema(config.command)
    lines = [f"command = {config.command}"]
    lines += [f"{k} = {schema[k].format(v)}" for k, v in config.params.items()]
    if config.output is not None:
        lines.append(f"out = {config.output}")
    lines.append(f"format = {config.format}")
    return "\n".join(lines) + "\n"


def sweep_spec(config: RunConfig) -> SweepSpec:
    p = config.params
    return SweepSpec(
        family=p["family"],
        axes={name: p[name] for name in AXES if name in p},
        flag=p.get("flag", "full"),
        n_max=p.get("n_max", 10),
        method=p.get("method", "quadrature"),
        purity=p.get("purity", 1.0),
        outputs=p.get("outputs"),
        n_internal=p.get("n_internal"),
    )


def circuit_params(config: RunConfig) -> CircuitParams:
    p = config.params
    overrides = {k: p[k] for k in _CIRCUIT_REALS if k in p}
    if p["cavity"] == "custom":
        missing = [k for k in ("L_eff", "delta_theta_traj") if k not in overrides]
        if missing:
            raise ValueError(f"custom cavity needs {', '.join(missing)}")
        return CircuitParams(**overrides)
    return replace(PRESETS[p["cavity"]], **overrides)
