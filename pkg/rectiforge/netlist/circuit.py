"""
Circuit description shared by every solver.

A `Circuit` is immutable. Sweeps and the optimizer derive modified copies
through `Circuit.with_value`.
"""

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from rectiforge.devices import DiodeModel
from rectiforge.media import SubstrateSpec

GROUND = "0"

# Internal junction node of a diode with series resistance
JUNCTION_SUFFIX = "#j"


class ElementKind(str, Enum):
    R = "R"
    L = "L"
    C = "C"
    MLIN = "MLIN"
    MRSTUB = "MRSTUB"
    DIODE = "D"

    @property
    def is_distributed(self) -> bool:
        return self in (ElementKind.MLIN, ElementKind.MRSTUB)

    @property
    def is_lumped_passive(self) -> bool:
        return self in (ElementKind.R, ElementKind.L, ElementKind.C)


# Parameter names per element kind, in render order
ELEMENT_PARAMS = {
    ElementKind.R: ("value",),
    ElementKind.L: ("value",),
    ElementKind.C: ("value",),
    ElementKind.MLIN: ("w", "l"),
    ElementKind.MRSTUB: ("ri", "ro", "ang"),
    ElementKind.DIODE: (),
}


@dataclass(frozen=True)
class Element:
    name: str
    kind: ElementKind
    nodes: tuple
    params: dict = field(default_factory=dict)
    model: Optional[str] = None

    @property
    def value(self) -> float:
        return self.params["value"]

    def param(self, key: str) -> float:
        try:
            return self.params[key]
        except KeyError:
            raise KeyError(f"Element {self.name} has no parameter `{key}`")

    def junction_node(self) -> str:
        """Node between the series resistance and the junction of a diode"""
        return f"{self.name}{JUNCTION_SUFFIX}"


@dataclass(frozen=True)
class PortSpec:
    index: int
    node_p: str
    node_n: str
    z0: float

    @property
    def name(self) -> str:
        return f"P{self.index}"


@dataclass(frozen=True)
class OutputSpec:
    """DC output: a node and the load resistor connected to it"""

    node: str
    element: str


@dataclass(frozen=True)
class Circuit:
    title: str = ""
    nodes: tuple = (GROUND,)
    elements: tuple = ()
    ports: tuple = ()
    substrate: Optional[SubstrateSpec] = None
    models: dict = field(default_factory=dict)
    output: Optional[OutputSpec] = None
    options: tuple = ()

    @classmethod
    def create(
        cls,
        elements=(),
        ports=(),
        substrate=None,
        models=None,
        output=None,
        options=(),
        title="",
    ) -> "Circuit":
        """Builds a circuit, deriving the node list: ground first, then the
        nodes in order of first appearance in elements, then in ports."""
        nodes = [GROUND]
        for element in elements:
            for node in element.nodes:
                if node not in nodes:
                    nodes.append(node)
        for port in ports:
            for node in (port.node_p, port.node_n):
                if node not in nodes:
                    nodes.append(node)
        return cls(
            title=title,
            nodes=tuple(nodes),
            elements=tuple(elements),
            ports=tuple(ports),
            substrate=substrate,
            models=dict(models or {}),
            output=output,
            options=tuple(options),
        )

    ## Lookups

    def element(self, name: str) -> Element:
        for element in self.elements:
            if element.name == name:
                return element
        raise KeyError(f"No element named `{name}`")

    def port(self, index: int) -> PortSpec:
        for port in self.ports:
            if port.index == index:
                return port
        raise KeyError(f"No port P{index}")

    def model_of(self, element: Element) -> DiodeModel:
        return self.models[element.model]

    @property
    def diodes(self) -> list:
        return [e for e in self.elements if e.kind == ElementKind.DIODE]

    @property
    def has_diodes(self) -> bool:
        return any(e.kind == ElementKind.DIODE for e in self.elements)

    @property
    def is_lumped(self) -> bool:
        return not any(e.kind.is_distributed for e in self.elements)

    @property
    def options_dict(self) -> dict:
        return dict(self.options)

    @property
    def load(self) -> Optional[Element]:
        if self.output is None:
            return None
        return self.element(self.output.element)

    ## Modified copies

    def with_value(self, element_name: str, param: str, value: float) -> "Circuit":
        """Copy of the circuit with one element parameter replaced"""
        element = self.element(element_name)
        if param not in element.params:
            raise KeyError(f"Element {element_name} has no parameter `{param}`")
        if not value > 0 and param != "ri":
            raise ValueError(
                f"{element_name}.{param} must be > 0 (got {value})"
            )
        params = dict(element.params)
        params[param] = float(value)
        new_element = dataclasses.replace(element, params=params)
        elements = tuple(
            new_element if e.name == element_name else e for e in self.elements
        )
        return dataclasses.replace(self, elements=elements)

    def with_values(self, values: dict) -> "Circuit":
        """`values` maps (element, param) to the new value"""
        circuit = self
        for (element_name, param), value in values.items():
            circuit = circuit.with_value(element_name, param, value)
        return circuit

    def with_options(self, options: dict) -> "Circuit":
        merged = dict(self.options)
        merged.update({key: str(value) for key, value in options.items()})
        return dataclasses.replace(self, options=tuple(merged.items()))


###########################
##
## Utils
##
###########################


class NetlistError(ValueError):
    """Raised when a netlist cannot be parsed"""

    def __init__(self, message, line=None, token=None):
        self.line = line
        self.token = token
        location = f"line {line}: " if line is not None else ""
        if token is not None:
            message = f"{message} (at `{token}`)"
        super().__init__(f"{location}{message}")


class ValidationError(NetlistError):
    """Raised when a circuit violates one of its structural rules"""

    def __init__(self, rule, message, line=None):
        self.rule = rule
        super().__init__(f"[{rule}] {message}", line=line)
