"""
Optimisation specification: which element values may change, within which
bounds, and which goals the tuned circuit has to meet.

Example (YAML):

    tunables:
      - {element: L1, param: value, lower: 1 nH, upper: 50 nH}
      - {element: C1, param: value, lower: 0.1 pF, upper: 10 pF}
    targets:
      - {freq: 925 MHz, metric: s11_db, goal: -60}
    max evals: 400
    seed: 0
"""

import math
import os
import re
from dataclasses import dataclass
from typing import Optional

import yaml

from rectiforge.common import quant
from rectiforge.common.config.parseconfig import default_params
from rectiforge.netlist import Circuit
from rectiforge.netlist.values import parse_value

METRICS = ("s11_db", "pce")

# Bare numbers with a SPICE scale factor; anything else goes through pint
_SPICE_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)(e[+-]?\d+)?(meg|[fpnumkgt])?$", re.IGNORECASE)


class OptSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Tunable:
    element: str
    param: str
    lower: float
    upper: float
    log: bool = True

    @property
    def label(self) -> str:
        return f"{self.element}.{self.param}"


@dataclass(frozen=True)
class Target:
    """s11_db goals are upper limits (dB), pce goals lower limits (%)"""

    freq: float
    metric: str
    goal: float
    weight: float = 1.0
    pin: Optional[float] = None

    def shortfall(self, value: float) -> float:
        if self.metric == "s11_db":
            return max(0.0, value - self.goal)
        return max(0.0, self.goal - value)


@dataclass(frozen=True)
class OptSpec:
    tunables: tuple
    targets: tuple
    max_evals: int = 400
    tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if not self.tunables:
            raise OptSpecError("At least one tunable is needed")
        if not self.targets:
            raise OptSpecError("At least one target is needed")
        for tunable in self.tunables:
            if not (math.isfinite(tunable.lower) and math.isfinite(tunable.upper)):
                raise OptSpecError(f"Bounds of {tunable.label} must be finite")
            if not tunable.lower < tunable.upper:
                raise OptSpecError(f"Bounds of {tunable.label} need lower < upper")
            if tunable.log and not tunable.lower > 0:
                raise OptSpecError(f"Log-scaled {tunable.label} needs a positive lower bound")
        for target in self.targets:
            if target.metric not in METRICS:
                raise OptSpecError(f"Unknown metric `{target.metric}`, use one of {METRICS}")
            if not target.weight > 0:
                raise OptSpecError(f"Target weights must be > 0, got {target.weight}")
            if not target.freq > 0:
                raise OptSpecError(f"Target frequency must be > 0, got {target.freq}")
            if target.metric == "pce" and target.pin is None:
                raise OptSpecError("A pce target needs an input power `pin`")
        if self.max_evals < 1:
            raise OptSpecError("max evals must be >= 1")

    @property
    def labels(self) -> list:
        return [tunable.label for tunable in self.tunables]

    def check_circuit(self, circuit: Circuit):
        """Raises OptSpecError when a tunable or target does not fit the circuit."""
        for tunable in self.tunables:
            try:
                circuit.element(tunable.element).param(tunable.param)
            except KeyError as error:
                raise OptSpecError(f"Tunable {tunable.label} not found: {error}")
        if not circuit.ports:
            raise OptSpecError("The circuit needs a port to evaluate targets")
        if any(t.metric == "pce" for t in self.targets) and circuit.load is None:
            raise OptSpecError("pce targets need an `.output` directive")

    def values(self, circuit: Circuit) -> list:
        return [circuit.element(t.element).param(t.param) for t in self.tunables]

    def apply(self, circuit: Circuit, values) -> Circuit:
        return circuit.with_values(
            {(t.element, t.param): float(v) for t, v in zip(self.tunables, values)}
        )


def _si(value, what):
    """Number, SPICE token ("10n") or pint quantity ("10 nH") to SI float"""
    if isinstance(value, bool):
        raise OptSpecError(f"Invalid value for {what}: {value}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    if _SPICE_NUMBER.match(text):
        return parse_value(text)
    try:
        return quant.to_base(text)
    except Exception as error:
        raise OptSpecError(f"Invalid value for {what}: `{value}` ({error})")


def _field(node, key, what):
    try:
        return node[key]
    except (KeyError, TypeError):
        raise OptSpecError(f"Missing `{key}` in {what}")


def load_opt_spec(source, params=None) -> OptSpec:
    """Reads an OptSpec from a YAML file or an already loaded dict.
    Missing run settings come from the `optimize` config section."""
    if isinstance(source, dict):
        data = source
    else:
        if not os.path.exists(source):
            raise FileNotFoundError(f"Optimisation spec `{source}` does not exist")
        with open(source, "r", encoding="utf8") as specfile:
            data = yaml.safe_load(specfile)
    if not isinstance(data, dict):
        raise OptSpecError("An optimisation spec must be a mapping")
    settings = (params or default_params())["optimize"]

    tunables = []
    for i, node in enumerate(_field(data, "tunables", "the spec") or []):
        what = f"tunable {i + 1}"
        tunables.append(
            Tunable(
                element=str(_field(node, "element", what)),
                param=str(node.get("param", "value")).lower(),
                lower=_si(_field(node, "lower", what), f"{what} lower"),
                upper=_si(_field(node, "upper", what), f"{what} upper"),
                log=bool(node.get("log", True)),
            )
        )
    targets = []
    for i, node in enumerate(_field(data, "targets", "the spec") or []):
        what = f"target {i + 1}"
        pin = node.get("pin")
        targets.append(
            Target(
                freq=_si(_field(node, "freq", what), f"{what} freq"),
                metric=str(_field(node, "metric", what)),
                goal=float(_field(node, "goal", what)),
                weight=float(node.get("weight", 1.0)),
                pin=None if pin is None else float(pin),
            )
        )
    try:
        return OptSpec(
            tunables=tuple(tunables),
            targets=tuple(targets),
            max_evals=int(data.get("max evals", settings["max evals"])),
            tolerance=float(data.get("tolerance", settings["tolerance"])),
            seed=int(data.get("seed", settings["seed"])),
        )
    except (TypeError, ValueError) as error:
        if isinstance(error, OptSpecError):
            raise
        raise OptSpecError(str(error))
