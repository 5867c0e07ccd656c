"""
Writes a Circuit back to netlist text. The output parses to an equal
circuit: every value token is checked by parsing it again.
"""

import math

from .circuit import Circuit, ElementKind, ELEMENT_PARAMS
from .parser import MODEL_PARAMS, SUBSTRATE_PARAMS, DISTRIBUTED_PARAMS
from .values import format_value


def _token(value, quantity=None):
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format_value(value, quantity)


def _substrate_card(substrate):
    fields = [
        f"{key}={_token(getattr(substrate, attribute), quantity)}"
        for key, (attribute, quantity) in SUBSTRATE_PARAMS.items()
    ]
    return ".substrate " + " ".join(fields)


def _model_card(model):
    fields = []
    for key, attribute in MODEL_PARAMS.items():
        value = getattr(model, attribute)
        if value is None:
            continue
        fields.append(f"{key}={_token(value)}")
    return f".model {model.name} diode " + " ".join(fields)


def _element_card(element):
    kind = element.kind
    if kind == ElementKind.DIODE:
        return "{} {} {} model={}".format(element.name, *element.nodes, element.model)
    if kind.is_lumped_passive:
        return "{} {} {} {}".format(element.name, *element.nodes, _token(element.value))
    quantities = DISTRIBUTED_PARAMS[kind]
    fields = [
        f"{key}={_token(element.param(key), quantities[key])}"
        for key in ELEMENT_PARAMS[kind]
    ]
    return " ".join([kind.value, element.name, *element.nodes, *fields])


def render(circuit: Circuit) -> str:
    lines = []
    if circuit.title:
        lines.append(f".title {circuit.title}")
    if circuit.substrate is not None:
        lines.append(_substrate_card(circuit.substrate))
    for model in circuit.models.values():
        lines.append(_model_card(model))
    for port in circuit.ports:
        lines.append(
            f".port {port.name} {port.node_p} {port.node_n} z0={_token(port.z0)}"
        )
    for element in circuit.elements:
        lines.append(_element_card(element))
    if circuit.output is not None:
        lines.append(f".output {circuit.output.node} {circuit.output.element}")
    if circuit.options:
        options = " ".join(f"{key}={value}" for key, value in circuit.options)
        lines.append(f".options {options}")
    lines.append(".end")
    return "\n".join(lines) + "\n"
