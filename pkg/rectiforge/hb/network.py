"""
The linear part of a rectifier seen from its diode junctions.

Per harmonic, all nodes that do not touch a junction are eliminated, which
leaves a Norton equivalent (admittance matrix and source currents) on the
junction-terminal nodes. At DC, inductors and lines are shorts: their nodes
are contracted into one representative before the elimination.
"""

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.linear import (
    build_admittance,
    circuit_nodes,
    diode_model,
    junction_nodes,
    solve_nodal,
)
from rectiforge.linear.assemble import is_dc_short
from rectiforge.netlist import GROUND, Circuit, ElementKind

# Conductance that pins a DC-floating node to 0 V
GAUGE_CONDUCTANCE = 1.0


@dataclass
class Junction:
    """Diode junction between two nodes of the linear network"""

    name: str
    model: object
    anode: str
    cathode: str


def junctions(circuit: Circuit, params: dict) -> list:
    result = []
    for element in circuit.diodes:
        anode, cathode = junction_nodes(circuit, element)
        result.append(
            Junction(element.name, diode_model(circuit, element, params), anode, cathode)
        )
    return result


def kept_nodes(circuit: Circuit) -> list:
    """Non-ground junction terminals, in circuit node order"""
    terminals = set()
    for element in circuit.diodes:
        terminals.update(junction_nodes(circuit, element))
    return [node for node in circuit_nodes(circuit) if node in terminals]


def dc_node_map(circuit: Circuit) -> dict:
    """Maps every node onto the representative of its DC-short group.
    Groups containing ground map onto ground."""
    graph = nx.Graph()
    all_nodes = [GROUND] + circuit_nodes(circuit)
    graph.add_nodes_from(all_nodes)
    for element in circuit.elements:
        if is_dc_short(element):
            graph.add_edge(*element.nodes)
    order = {node: i for i, node in enumerate(all_nodes)}
    node_map = {}
    for component in nx.connected_components(graph):
        representative = min(component, key=order.get)
        for node in component:
            node_map[node] = representative
    return node_map


def dc_floating_nodes(circuit: Circuit, node_map: dict, kept: list) -> list:
    """Representatives without a resistive path to ground or to a kept node"""
    graph = nx.Graph()
    graph.add_nodes_from(set(node_map.values()))
    conductive = [
        e.nodes for e in circuit.elements if e.kind == ElementKind.R
    ] + [
        (e.nodes[0], e.junction_node())
        for e in circuit.diodes
        if circuit.model_of(e).rs > 0
    ] + [(port.node_p, port.node_n) for port in circuit.ports]
    for a, b in conductive:
        graph.add_edge(node_map[a], node_map[b])
    anchored = set()
    for anchor in [GROUND] + list(kept):
        if anchor in graph and anchor not in anchored:
            anchored |= nx.node_connected_component(graph, anchor)
    return [node for node in graph.nodes if node not in anchored]


@dataclass
class NortonEquivalent:
    freq: float
    nodes: list
    admittance: np.ndarray
    current: np.ndarray
    eliminated: list = field(default_factory=list)
    # v_eliminated = offset - transfer @ v_kept
    transfer: Optional[np.ndarray] = None
    offset: Optional[np.ndarray] = None
    node_map: dict = field(default_factory=dict)

    def expand(self, v_kept, scale: complex = 1.0) -> dict:
        """Voltages of all circuit nodes from the kept-node voltages.

        `scale` multiplies the excitation the equivalent was built with.
        """
        v_kept = np.asarray(v_kept, dtype=complex)
        values = {GROUND: 0j}
        values.update(zip(self.nodes, v_kept))
        if self.eliminated:
            v_eliminated = scale * self.offset - self.transfer @ v_kept
            values.update(zip(self.eliminated, v_eliminated))
        return {
            node: values[self.node_map.get(node, node)] for node in self.node_map
        }


def norton_reduce(
    circuit: Circuit,
    freq: float,
    excitation: Optional[dict] = None,
    params=None,
    kept: Optional[list] = None,
) -> NortonEquivalent:
    """Reduces the linear network (ports terminated, port sources as Norton
    currents) onto the kept nodes, by default the junction terminals.

    `excitation` maps port index to the open-circuit source voltage.
    """
    params = params_for_circuit(circuit, params)
    kept = kept_nodes(circuit) if kept is None else kept
    all_nodes = [GROUND] + circuit_nodes(circuit)
    if freq == 0:
        node_map = dc_node_map(circuit)
    else:
        node_map = {node: node for node in all_nodes}

    kept_reps = []
    for node in kept:
        representative = node_map[node]
        if representative != GROUND and representative not in kept_reps:
            kept_reps.append(representative)

    nodes, matrix = build_admittance(circuit, freq, params, node_map=node_map)
    index = {node: i for i, node in enumerate(nodes)}
    if freq == 0:
        for node in dc_floating_nodes(circuit, node_map, kept_reps):
            if node != GROUND:
                matrix[index[node], index[node]] += GAUGE_CONDUCTANCE

    current = np.zeros(len(nodes), dtype=complex)
    for port_index, voltage in (excitation or {}).items():
        port = circuit.port(port_index)
        for node, sign in ((port.node_p, 1.0), (port.node_n, -1.0)):
            representative = node_map[node]
            if representative != GROUND:
                current[index[representative]] += sign * voltage / port.z0

    k_idx = [index[node] for node in kept_reps]
    eliminated = [node for node in nodes if node not in kept_reps]
    e_idx = [index[node] for node in eliminated]

    y_kk = matrix[np.ix_(k_idx, k_idx)]
    y_ke = matrix[np.ix_(k_idx, e_idx)]
    y_ek = matrix[np.ix_(e_idx, k_idx)]
    y_ee = matrix[np.ix_(e_idx, e_idx)]

    if eliminated:
        rhs = np.column_stack([y_ek, current[e_idx]])
        solved = solve_nodal(y_ee, rhs, eliminated, freq)
        transfer, offset = solved[:, :-1], solved[:, -1]
        admittance = y_kk - y_ke @ transfer
        reduced_current = current[k_idx] - y_ke @ offset
    else:
        transfer = offset = None
        admittance, reduced_current = y_kk, current[k_idx]

    return NortonEquivalent(
        freq=freq,
        nodes=kept_reps,
        admittance=admittance,
        current=reduced_current,
        eliminated=eliminated,
        transfer=transfer,
        offset=offset,
        node_map=node_map,
    )


def incidence(junction_list: list, nodes: list, node_map: Optional[dict] = None) -> np.ndarray:
    """B[j, m] = +1 (anode side) / -1 (cathode) of junction j at kept node m"""
    node_map = node_map or {}
    index = {node: i for i, node in enumerate(nodes)}
    matrix = np.zeros((len(junction_list), len(nodes)))
    for j, junction in enumerate(junction_list):
        for node, sign in ((junction.anode, 1.0), (junction.cathode, -1.0)):
            column = index.get(node_map.get(node, node))
            if column is not None:
                matrix[j, column] += sign
    return matrix
