"""
Reader of the SPICE-like netlist format.

    * comment
    .title Dual-band rectifier
    .substrate er=3.38 tand=0.0027 h=0.8mm
    .model HSMS2850 diode is=3e-6 rs=25 n=1.06 cj0=0.18p vj=0.35 m=0.5
    .port P1 in 0 z0=50
    MLIN TL1 in n1 w=0.5mm l=18mm
    MRSTUB S8 n2 ri=0.5mm ro=11mm ang=90
    D1 0 x model=HSMS2850
    RL out 0 14k
    .output out RL
    .end

A trailing backslash continues a card on the next line. Keywords and
parameter names are case-insensitive, node and element names are not.
"""

import os
import re

from rectiforge.common import logger
from rectiforge.common.utils import inputdata_path
from rectiforge.common.config.parseconfig import option_parser
from rectiforge.devices import DiodeModel
from rectiforge.media import SubstrateSpec

from .circuit import (
    Circuit,
    Element,
    ElementKind,
    NetlistError,
    OutputSpec,
    PortSpec,
    ValidationError,
)
from .values import parse_value
from .validate import validate

# Netlist keyword -> DiodeModel field, with the quantity of its value
MODEL_PARAMS = {
    "is": "isat",
    "n": "n",
    "rs": "rs",
    "cj0": "cj0",
    "vj": "vj",
    "m": "m",
    "bv": "bv",
    "fc": "fc",
    "temp": "temp",
    "ibv": "ibv",
}

SUBSTRATE_PARAMS = {
    "er": ("eps_r", None),
    "tand": ("tan_delta", None),
    "h": ("height", "length"),
    "t": ("metal_thickness", "length"),
    "sigma": ("conductivity", None),
}

DISTRIBUTED_PARAMS = {
    ElementKind.MLIN: {"w": "length", "l": "length"},
    ElementKind.MRSTUB: {"ri": "length", "ro": "length", "ang": "angle"},
}

_EQUALS = re.compile(r"\s*=\s*")
_PORT_NAME = re.compile(r"^p(\d+)$", re.IGNORECASE)


def _logical_lines(text):
    """Yields (line number, card) with continuations joined. The line number
    is the one on which the card starts."""
    pending, start = None, None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if pending is None:
            if not line or line.startswith("*"):
                continue
            start = number
            pending = ""
        elif line.startswith("*"):
            continue
        if line.endswith("\\"):
            pending += line[:-1] + " "
            continue
        card = pending + line
        pending = None
        if card.strip():
            yield start, card
    if pending is not None and pending.strip():
        yield start, pending


def _number(token, line, quantity=None):
    if token.lower() in ("inf", "infinity"):
        return float("inf")
    try:
        return parse_value(token, quantity)
    except ValueError as error:
        raise NetlistError(str(error), line=line, token=token)


def _keywords(tokens, allowed, line, required=()):
    """Parses `key=value` tokens into {lowercase key: raw value}."""
    result = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        key = key.lower()
        if not sep or not key or not value:
            raise NetlistError("Expected key=value", line=line, token=token)
        if key not in allowed:
            raise NetlistError(f"Unknown parameter `{key}`", line=line, token=token)
        if key in result:
            raise NetlistError(f"Duplicate parameter `{key}`", line=line, token=token)
        result[key] = value
    for key in required:
        if key not in result:
            raise NetlistError(f"Missing parameter `{key}=`", line=line)
    return result


def _expect(tokens, count, line, usage):
    if len(tokens) < count:
        raise NetlistError(f"Incomplete card, expected `{usage}`", line=line)


class _NetlistReader:
    def __init__(self):
        self.title = ""
        self.elements = []
        self.ports = []
        self.substrate = None
        self.models = {}
        self.output = None
        self.options = {}
        self.finished = False

    ## Directives

    def directive(self, line, card, tokens):
        keyword = tokens[0].lower()
        handler = {
            ".title": self.read_title,
            ".substrate": self.read_substrate,
            ".port": self.read_port,
            ".model": self.read_model,
            ".output": self.read_output,
            ".options": self.read_options,
            ".end": self.read_end,
        }.get(keyword)
        if handler is None:
            raise NetlistError("Unknown directive", line=line, token=tokens[0])
        handler(line, card, tokens[1:])

    def read_title(self, line, card, tokens):
        self.title = card.strip()[len(".title"):].strip()

    def read_substrate(self, line, card, tokens):
        if self.substrate is not None:
            raise NetlistError("Second .substrate directive", line=line)
        raw = _keywords(tokens, SUBSTRATE_PARAMS, line, required=("er", "tand", "h"))
        kwargs = {
            SUBSTRATE_PARAMS[key][0]: _number(value, line, SUBSTRATE_PARAMS[key][1])
            for key, value in raw.items()
        }
        try:
            self.substrate = SubstrateSpec(**kwargs)
        except ValueError as error:
            raise ValidationError("substrate-parameters", str(error), line=line)

    def read_port(self, line, card, tokens):
        _expect(tokens, 4, line, ".port P<k> <n+> <n-> z0=<ohm>")
        match = _PORT_NAME.match(tokens[0])
        if match is None:
            raise NetlistError("Port name must be P<k>", line=line, token=tokens[0])
        raw = _keywords(tokens[3:], ("z0",), line, required=("z0",))
        self.ports.append(
            PortSpec(
                index=int(match.group(1)),
                node_p=tokens[1],
                node_n=tokens[2],
                z0=_number(raw["z0"], line),
            )
        )

    def read_model(self, line, card, tokens):
        _expect(tokens, 2, line, ".model <name> diode is=...")
        name, kind = tokens[0], tokens[1].lower()
        if kind != "diode":
            raise NetlistError("Only diode models are supported", line=line, token=tokens[1])
        if name.lower() in (existing.lower() for existing in self.models):
            raise NetlistError(f"Model `{name}` is defined twice", line=line)
        raw = _keywords(tokens[2:], MODEL_PARAMS, line, required=("is",))
        kwargs = {MODEL_PARAMS[key]: _number(value, line) for key, value in raw.items()}
        try:
            self.models[name] = DiodeModel(name=name, **kwargs)
        except ValueError as error:
            raise ValidationError("model-parameters", str(error), line=line)

    def read_output(self, line, card, tokens):
        _expect(tokens, 2, line, ".output <node> <load element>")
        self.output = OutputSpec(node=tokens[0], element=tokens[1])

    def read_options(self, line, card, tokens):
        for token in tokens:
            key, sep, value = token.partition("=")
            key = key.lower()
            if not sep or not value:
                raise NetlistError("Expected section.key=value", line=line, token=token)
            try:
                parser = option_parser(key)
            except KeyError:
                raise NetlistError(f"Unknown option `{key}`", line=line, token=token)
            try:
                parser.parse(value)
            except (ValueError, TypeError) as error:
                raise NetlistError(str(error), line=line, token=token)
            self.options[key] = value

    def read_end(self, line, card, tokens):
        self.finished = True

    ## Element cards

    def element(self, line, tokens):
        head = tokens[0]
        upper = head.upper()
        if upper in (ElementKind.MLIN.value, ElementKind.MRSTUB.value):
            self.read_distributed(line, ElementKind(upper), tokens[1:])
            return
        kind = {"R": ElementKind.R, "L": ElementKind.L, "C": ElementKind.C,
                "D": ElementKind.DIODE}.get(upper[0])
        if kind is None:
            raise NetlistError("Unknown element kind", line=line, token=head)
        if kind == ElementKind.DIODE:
            self.read_diode(line, tokens)
        else:
            self.read_lumped(line, kind, tokens)

    def read_lumped(self, line, kind, tokens):
        _expect(tokens, 4, line, f"{kind.value}<name> <n1> <n2> <value>")
        if len(tokens) > 4:
            raise NetlistError("Unexpected token", line=line, token=tokens[4])
        value = tokens[3]
        if "=" in value:
            value = _keywords([value], ("value",), line)["value"]
        self.elements.append(
            Element(
                name=tokens[0],
                kind=kind,
                nodes=(tokens[1], tokens[2]),
                params={"value": _number(value, line)},
            )
        )

    def read_diode(self, line, tokens):
        _expect(tokens, 4, line, "D<name> <anode> <cathode> model=<name>")
        if len(tokens) > 4:
            raise NetlistError("Unexpected token", line=line, token=tokens[4])
        model = tokens[3]
        if "=" in model:
            model = _keywords([model], ("model",), line)["model"]
        self.elements.append(
            Element(
                name=tokens[0],
                kind=ElementKind.DIODE,
                nodes=(tokens[1], tokens[2]),
                model=model,
            )
        )

    def read_distributed(self, line, kind, tokens):
        allowed = DISTRIBUTED_PARAMS[kind]
        n_nodes = 2 if kind == ElementKind.MLIN else 1
        _expect(tokens, 1 + n_nodes, line, f"{kind.value} <name> <nodes> key=value ...")
        name, nodes = tokens[0], tuple(tokens[1 : 1 + n_nodes])
        for node in nodes:
            if "=" in node:
                raise NetlistError("Expected a node name", line=line, token=node)
        raw = _keywords(tokens[1 + n_nodes :], allowed, line, required=tuple(allowed))
        params = {key: _number(raw[key], line, allowed[key]) for key in allowed}
        self.elements.append(Element(name=name, kind=kind, nodes=nodes, params=params))

    ## Result

    def resolved_elements(self):
        """Diode model references are matched case-insensitively."""
        by_lower = {name.lower(): name for name in self.models}
        elements = []
        for element in self.elements:
            if element.kind == ElementKind.DIODE:
                declared = by_lower.get(element.model.lower(), element.model)
                element = Element(
                    name=element.name,
                    kind=element.kind,
                    nodes=element.nodes,
                    params={},
                    model=declared,
                )
            elements.append(element)
        return elements

    def circuit(self) -> Circuit:
        return Circuit.create(
            elements=self.resolved_elements(),
            ports=sorted(self.ports, key=lambda port: port.index),
            substrate=self.substrate,
            models=self.models,
            output=self.output,
            options=self.options.items(),
            title=self.title,
        )


def parse(text: str) -> Circuit:
    """Parses netlist text into a validated Circuit.

    Raises:
        NetlistError: syntax problem, with line number and offending token
        ValidationError: the circuit breaks a structural rule
    """
    reader = _NetlistReader()
    for line, card in _logical_lines(text):
        if reader.finished:
            logger.debug(f"Ignoring line {line} after .end")
            continue
        tokens = _EQUALS.sub("=", card).split()
        if tokens[0].startswith("."):
            reader.directive(line, card, tokens)
        else:
            reader.element(line, tokens)
    return validate(reader.circuit())


def parse_file(path) -> Circuit:
    with open(path, "r", encoding="utf8") as netlist_file:
        return parse(netlist_file.read())


def netlist_path(name: str) -> str:
    """Path of a shipped example netlist; `name` may omit the `.net` suffix."""
    filename = name if name.endswith(".net") else f"{name}.net"
    return os.path.normpath(inputdata_path("netlists", filename))


def load_netlist(name: str) -> Circuit:
    """Reads a netlist from a path, or else one of the shipped examples."""
    if os.path.exists(name):
        return parse_file(name)
    path = netlist_path(name)
    if not os.path.exists(path):
        raise FileNotFoundError(f"No netlist file or shipped example named `{name}`")
    return parse_file(path)
