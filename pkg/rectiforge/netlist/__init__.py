"""
Circuit types and the netlist text format.
"""

from .circuit import (
    GROUND,
    Circuit,
    Element,
    ElementKind,
    PortSpec,
    OutputSpec,
    NetlistError,
    ValidationError,
)
from .values import parse_value, format_value
from .validate import validate, circuit_graph
from .parser import parse, parse_file, load_netlist, netlist_path
from .render import render
