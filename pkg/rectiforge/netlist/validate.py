"""
Structural checks on a Circuit. Each failure raises a ValidationError
naming the rule that was broken.
"""

import math

import networkx as nx

from .circuit import (
    GROUND,
    JUNCTION_SUFFIX,
    Circuit,
    ElementKind,
    ValidationError,
)


def circuit_graph(circuit: Circuit) -> nx.Graph:
    """Undirected graph of the circuit. Distributed elements also connect
    their nodes to the ground plane, ports connect their two terminals."""
    graph = nx.Graph()
    graph.add_nodes_from(circuit.nodes)
    for element in circuit.elements:
        nodes = list(element.nodes)
        if element.kind.is_distributed:
            nodes.append(GROUND)
        for other in nodes[1:]:
            graph.add_edge(nodes[0], other)
    for port in circuit.ports:
        graph.add_edge(port.node_p, port.node_n)
    return graph


def _check_names(circuit):
    seen = set()
    for element in circuit.elements:
        if element.name in seen:
            raise ValidationError(
                "unique-names", f"Element name `{element.name}` is used twice"
            )
        seen.add(element.name)
    for node in circuit.nodes:
        if JUNCTION_SUFFIX[0] in node or "=" in node:
            raise ValidationError(
                "node-names", f"Node name `{node}` contains a reserved character"
            )


def _check_values(circuit):
    for element in circuit.elements:
        kind = element.kind
        if kind == ElementKind.DIODE:
            if element.model not in circuit.models:
                raise ValidationError(
                    "model-resolves",
                    f"Diode {element.name} refers to unknown model `{element.model}`",
                )
            continue
        if kind.is_distributed and circuit.substrate is None:
            raise ValidationError(
                "substrate-required",
                f"substrate required for distributed element {element.name}",
            )
        if kind == ElementKind.MRSTUB:
            ri, ro, ang = (element.param(key) for key in ("ri", "ro", "ang"))
            if not (0 <= ri < ro and 0 < ang <= math.pi):
                raise ValidationError(
                    "stub-geometry",
                    f"Stub {element.name} needs 0 <= ri < ro and 0 < ang <= 180 deg",
                )
            continue
        for key, value in element.params.items():
            if not (value > 0 and math.isfinite(value)):
                raise ValidationError(
                    "positive-value",
                    f"{element.name}.{key} must be positive and finite, got {value}",
                )
        if len(set(element.nodes)) != len(element.nodes):
            raise ValidationError(
                "positive-value", f"Element {element.name} is shorted on itself"
            )


def _check_ports(circuit):
    pairs = set()
    for port in circuit.ports:
        if not (port.z0 > 0 and math.isfinite(port.z0)):
            raise ValidationError(
                "port-z0", f"Port {port.name} needs a positive real z0, got {port.z0}"
            )
        pair = frozenset((port.node_p, port.node_n))
        if len(pair) != 2:
            raise ValidationError(
                "port-node-pair", f"Port {port.name} connects a node to itself"
            )
        if pair in pairs:
            raise ValidationError(
                "port-node-pair",
                f"Port {port.name} reuses the node pair of another port",
            )
        pairs.add(pair)
    indices = sorted(port.index for port in circuit.ports)
    if indices != list(range(1, len(indices) + 1)):
        raise ValidationError(
            "port-indices", f"Port indices must be 1..N without gaps, got {indices}"
        )


def _check_connectivity(circuit):
    if not circuit.elements and not circuit.ports:
        return
    graph = circuit_graph(circuit)
    if graph.degree(GROUND) == 0:
        raise ValidationError(
            "ground-referenced", "No element or port is connected to ground node 0"
        )
    grounded = nx.node_connected_component(graph, GROUND)
    floating = [node for node in circuit.nodes if node not in grounded]
    if floating:
        raise ValidationError(
            "connected",
            "Nodes without a path to ground: {}".format(", ".join(floating)),
        )


def _check_output(circuit):
    output = circuit.output
    if output is None:
        return
    if output.node not in circuit.nodes:
        raise ValidationError(
            "output-resolves", f"Output node `{output.node}` does not exist"
        )
    try:
        load = circuit.element(output.element)
    except KeyError:
        raise ValidationError(
            "output-resolves", f"Output element `{output.element}` does not exist"
        )
    if load.kind != ElementKind.R or output.node not in load.nodes:
        raise ValidationError(
            "output-resolves",
            f"Output element `{output.element}` must be a resistor at node {output.node}",
        )


def validate(circuit: Circuit) -> Circuit:
    """Checks all structural rules and returns the circuit unchanged."""
    _check_names(circuit)
    _check_values(circuit)
    _check_ports(circuit)
    _check_connectivity(circuit)
    _check_output(circuit)
    return circuit
