"""Run configuration and the small expression parser used for angle literals."""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from .coins import CoinParams, InvalidParameterError
from .walk import InitialSpec

__all__ = ["ConfigError", "RunConfig", "parse_angle", "parse_complex"]

COMMANDS = ("evolve", "sweep", "spectrum", "verify")
SUITES = ("all", "lemma1", "thm1", "thm2", "cor2", "thm3", "thm4")
ENGINES = ("direct", "spectral", "both")
FORMATS = ("csv", "json")
SPLITS = ("zero", "half", "full")
TOLERANCE_KEYS = ("amplitude", "probability", "derived")


class ConfigError(InvalidParameterError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "π": math.pi, "i": 1j}
_FUNCS = {"sqrt": lambda v: v**0.5}


def _eval(node: ast.AST) -> complex | float:
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval(node.args[0]))
    raise ConfigError(f"unsupported expression element: {ast.dump(node)}")


def _evaluate(text: str) -> complex | float:
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse {text!r}") from exc
    try:
        return _eval(tree)
    except (ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"cannot evaluate {text!r}: {exc}") from exc


def parse_angle(text: str | float) -> float:
    """
    Parse an angle literal such as ``"pi"``, ``"-pi/2"``, ``"3*pi/4"`` or ``"0.25"``.

    Evaluation follows Python arithmetic, so ``"3*pi/4"`` equals ``3 * math.pi / 4`` exactly.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        value = float(text)
    else:
        value = _evaluate(text)
        if isinstance(value, complex):
            raise ConfigError(f"angle {text!r} is not real")
        value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"angle {text!r} is not finite")
    return value


def parse_complex(text: str | complex) -> complex:
    """Complex literal: ``"0.6"``, ``"0.8j"``, ``"1/sqrt(2)"``, ``"i/sqrt(2)"``."""
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        return complex(text)
    return complex(_evaluate(text))


@dataclass
class RunConfig:
    """
    Everything a CLI run needs. Angles and amplitudes keep the literal text the
    user typed; the radian/complex values are derived on demand.
    """

    command: str = "evolve"
    alpha: str = "pi/2"
    beta: str = "pi/4"
    gamma: str = "pi/2"
    theta: str = "-pi/2"
    init: str | None = None
    m: str | None = None
    n: str | None = None
    t: int = 100
    phi_min: str = "-pi"
    phi_max: str = "pi"
    phi_steps: int = 33
    alpha_split: str = "half"
    k_samples: int = 201
    engine: str = "direct"
    out: str | None = None
    format: str | None = None
    suite: str = "all"
    skip_zeros: bool = False
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)

    def validate(self) -> RunConfig:
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {self.command!r}")
        for name, allowed in (
            ("suite", SUITES),
            ("engine", ENGINES),
            ("format", FORMATS),
            ("alpha_split", SPLITS),
        ):
            if name == "format" and self.format is None:
                continue
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        for name in ("t", "phi_steps", "k_samples", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if self.t < 0:
            raise ConfigError(f"t must be nonnegative, got {self.t}")
        if self.k_samples < 1:
            raise ConfigError("k_samples must be positive")
        if self.command == "sweep" and self.phi_steps < 2:
            raise ConfigError("phi_steps must be at least 2")
        for key, value in self.tolerances.items():
            if key not in TOLERANCE_KEYS:
                raise ConfigError(f"unknown tolerance {key!r}; expected one of {TOLERANCE_KEYS}")
            if not (isinstance(value, (int, float)) and value >= 0):
                raise ConfigError(f"tolerance {key} must be a nonnegative number")
        # force parsing so bad literals surface as config errors
        self.coin()
        self.initial_spec()
        self.phi_range()
        return self

    def coin(self) -> CoinParams:
        return CoinParams(*(parse_angle(getattr(self, a)) for a in ("alpha", "beta", "gamma", "theta")))

    def initial_spec(self) -> InitialSpec:
        m = parse_complex(self.m) if self.m is not None else None
        n = parse_complex(self.n) if self.n is not None else None
        try:
            return InitialSpec.from_name(self.init or self.default_init(), m, n)
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def default_init(self) -> str:
        """Sweeps follow the symmetric start; every other command starts from |0L>."""
        return "symmetric" if self.command == "sweep" else "L"

    def output_format(self) -> str:
        """``verify`` writes its report as JSON; the tabular commands default to CSV."""
        if self.format is not None:
            return self.format
        return "json" if self.command == "verify" else "csv"

    def phi_range(self) -> tuple[float, float]:
        return parse_angle(self.phi_min), parse_angle(self.phi_max)

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        """Canonical form: sorted keys, no whitespace variation."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: RunConfig | None = None) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = asdict(base) if base is not None else {}
        for key, value in data.items():
            if key in ("alpha", "beta", "gamma", "theta", "phi_min", "phi_max", "m", "n") and isinstance(value, (int, float)):
                value = repr(value)
            merged[key] = value
        return cls(**merged)

    @classmethod
    def from_json(cls, text: str, base: RunConfig | None = None) -> RunConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_dict(data, base)
