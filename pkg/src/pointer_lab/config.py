"""Flat ``key = value`` run configuration.

Syntax, one entry per line::

    # comment
    seed = 42
    compton.wavelength_m = 4.8e-12
    compton.phi_deg = 90          # angles take a _deg or _rad suffix
    compton.alpha = 1/sqrt(2)     # arithmetic with pi, sqrt and complex j
    sweep.phi_rad = 0, pi/4, pi/2 # lists are comma separated

Keys are dotted ``section.name`` with SI units in the name.  Unknown keys,
duplicate keys and unparseable values raise :class:`ConfigError` carrying
the offending line or key.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

EXPERIMENTS = ("mirror", "compton", "sweep", "ensemble")
FORMATS = ("csv", "jsonl")

# key -> kind; kinds: int, real, complex, reals, str
SCHEMA = {
    "seed": "int",
    "output.path": "str",
    "output.format": "str",
    "mirror.photon_momentum_kg_m_s": "real",
    "mirror.momentum_transfer_kg_m_s": "real",
    "mirror.a": "complex",
    "mirror.b": "complex",
    "mirror.mass_kg": "real",
    "mirror.sigma_x_m": "real",
    "mirror.temperature_k": "real",
    "mirror.interaction_time_s": "real",
    "mirror.k": "real",
    "mirror.dp_grid_kg_m_s": "reals",
    "compton.wavelength_m": "real",
    "compton.phi_rad": "real",
    "compton.phi_deg": "real",
    "compton.alpha": "complex",
    "compton.beta": "complex",
    "compton.electron_sigma_x_m": "real",
    "compton.ratio_threshold": "real",
    "compton.epsilon_high": "real",
    "compton.crossover_model": "str",
    "compton.n_ensemble": "int",
    "sweep.phi_rad": "reals",
    "sweep.phi_deg": "reals",
    "sweep.phi_start_rad": "real",
    "sweep.phi_stop_rad": "real",
    "sweep.phi_start_deg": "real",
    "sweep.phi_stop_deg": "real",
    "sweep.phi_count": "int",
    "ensemble.c1": "complex",
    "ensemble.c2": "complex",
    "ensemble.n": "int",
    "ensemble.k": "real",
    "ensemble.sigma_x_m": "real",
    "ensemble.mass_kg": "real",
    "ensemble.dx_m": "real",
    "ensemble.dp_kg_m_s": "real",
    "ensemble.workers": "int",
}

_NAMES = {"pi": math.pi, "e": math.e, "j": 1j}
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "sin": math.sin, "cos": math.cos}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
            and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval(node.operand))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        return _FUNCS[node.func.id](_eval(node.args[0]))
    raise ValueError("unsupported expression")


def parse_number(text: str):
    """Evaluate a numeric literal or small arithmetic expression."""
    try:
        return _eval(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def convert(key: str, text: str):
    kind = SCHEMA[key]
    try:
        if kind == "str":
            if not text:
                raise ValueError("empty value")
            return text
        if kind == "reals":
            items = [t for t in text.split(",") if t.strip()]
            if not items:
                raise ValueError("empty list")
            return [_real(parse_number(t)) for t in items]
        value = parse_number(text)
        if kind == "complex":
            return complex(value)
        if kind == "int":
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if not isinstance(value, int):
                raise ValueError(f"not an integer: {text!r}")
            return value
        return _real(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _real(value):
    if isinstance(value, complex):
        if value.imag != 0:
            raise ValueError(f"expected a real number, got {value!r}")
        value = value.real
    return float(value)


def parse_lines(lines, source="<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, text = line.partition("=")
        key, text = key.strip(), text.strip()
        where = f"{source}:{lineno}"
        if not sep or not key:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        try:
            values[key] = convert(key, text)
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    return values


def parse_override(item: str) -> tuple[str, object]:
    key, sep, text = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"--set {item!r}: expected key=value")
    if key not in SCHEMA:
        raise ConfigError(f"--set {item!r}: unknown key {key!r}")
    return key, convert(key, text.strip())


@dataclass
class RunConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str | None = None
    output_format: str = "csv"

    def get(self, key, default=None):
        return self.params.get(key, default)

    def section(self, name):
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in self.params.items() if k.startswith(prefix)}

    def angle(self, prefix, default=None):
        """Angle in radians from ``prefix_rad`` or ``prefix_deg`` (not both)."""
        rad, deg = self.params.get(prefix + "_rad"), self.params.get(prefix + "_deg")
        if rad is not None and deg is not None:
            raise ConfigError(f"both {prefix}_rad and {prefix}_deg given")
        if deg is not None:
            return _to_rad(deg)
        return default if rad is None else rad


def _to_rad(deg):
    if isinstance(deg, list):
        return [math.radians(d) for d in deg]
    return math.radians(deg)


def load(experiment: str, path=None, overrides=(), *, seed=None, output_path=None,
         output_format=None) -> RunConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    values = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {p}: {exc.strerror}") from None
        values = parse_lines(text.splitlines(), str(p))
    for item in overrides:
        key, value = parse_override(item)
        values[key] = value
    if seed is not None:
        values["seed"] = seed
    if output_path is not None:
        values["output.path"] = output_path
    if output_format is not None:
        values["output.format"] = output_format
    fmt = values.pop("output.format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format must be one of {FORMATS}, got {fmt!r}")
    run_seed = values.pop("seed", 0)
    if run_seed < 0:
        raise ConfigError(f"seed must be non-negative, got {run_seed!r}")
    return RunConfig(experiment, values, run_seed, values.pop("output.path", None), fmt)
