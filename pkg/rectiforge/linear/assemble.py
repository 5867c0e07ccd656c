"""
Nodal admittance assembly of the small-signal network.

Every element contributes a local admittance matrix on its terminal nodes
(`element_admittance`). The same local matrices are used by the S-parameter
analysis, by the harmonic-balance network and by the power ledger, so all
three see exactly the same linear circuit.

Diodes are split into a linear series resistance (anode to `<name>#j`) and
the junction. The junction is linearised at a bias voltage for small-signal
analysis and is handled by the nonlinear solvers otherwise.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve, LinAlgWarning

from rectiforge.common import logger
from rectiforge.common.utils import FrequencyClampWarning
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.devices import DiodeModel, g_of_v, c_of_v
from rectiforge.media import (
    microstrip_params,
    mlin_two_port,
    radial_stub_admittance,
)
from rectiforge.netlist import GROUND, Circuit, Element, ElementKind


class SingularSystemError(RuntimeError):
    """The nodal matrix cannot be factorised: some node has no defined voltage."""

    def __init__(self, node, freq=None):
        self.node = node
        self.freq = freq
        where = "" if freq is None else f" at f = {freq:.6g} Hz"
        super().__init__(f"Singular admittance matrix{where}: node `{node}` is not determined")


@dataclass
class AdmittanceSystem:
    freq: float
    nodes: list
    matrix: np.ndarray

    def index(self, node: str) -> int:
        return self.nodes.index(node)

    def solve(self, rhs):
        return solve_nodal(self.matrix, rhs, self.nodes, self.freq)


def solve_nodal(matrix, rhs, nodes, freq=None):
    """Solves Y·v = rhs by LU factorisation; a zero pivot raises
    SingularSystemError naming the node of that column."""
    matrix = np.asarray(matrix)
    if matrix.shape[0] == 0:
        return np.zeros_like(np.asarray(rhs, dtype=matrix.dtype))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(matrix, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = max(np.max(np.abs(matrix)), np.finfo(float).tiny)
    tiny = pivots <= scale * np.finfo(float).eps * matrix.shape[0]
    if np.any(tiny):
        node = nodes[int(np.argmax(tiny))]
        raise SingularSystemError(node, freq)
    return lu_solve((lu, piv), rhs, check_finite=False)


def clamp_frequency(freq: float, params: dict) -> float:
    floor = params["linear"]["min frequency"]
    if freq < floor:
        message = f"Frequency {freq:.6g} Hz raised to {floor:.6g} Hz"
        warnings.warn(message, FrequencyClampWarning, stacklevel=3)
        logger.debug(message)
        return floor
    return freq


def diode_model(circuit: Circuit, element: Element, params: dict) -> DiodeModel:
    """Model of a diode as used by the solvers (breakdown only when enabled)."""
    model = circuit.model_of(element)
    if not params["devices"]["breakdown"]:
        model = model.without_breakdown()
    return model


def junction_nodes(circuit: Circuit, element: Element):
    """(anode side, cathode) of the junction of a diode. The anode side is the
    internal node when the model has a series resistance."""
    anode, cathode = element.nodes
    if circuit.model_of(element).rs > 0:
        return element.junction_node(), cathode
    return anode, cathode


def internal_nodes(circuit: Circuit) -> list:
    return [
        element.junction_node()
        for element in circuit.diodes
        if circuit.model_of(element).rs > 0
    ]


def is_dc_short(element: Element) -> bool:
    return element.kind in (ElementKind.L, ElementKind.MLIN)


def _two_terminal(y):
    return np.array([[y, -y], [-y, y]], dtype=complex)


def element_admittance(element: Element, freq: float, circuit: Circuit, params: dict):
    """Local admittance of the linear part of an element.

    Returns (terminal nodes, matrix). At freq = 0 inductors and lines are
    shorts, which cannot be written as an admittance: they come back as
    an empty stamp and the caller merges their nodes. Capacitors and stubs
    are open at DC. For a diode the series resistance is returned (empty
    when rs = 0), the junction is not included.
    """
    kind = element.kind
    omega = 2 * np.pi * freq

    if kind == ElementKind.R:
        return element.nodes, _two_terminal(1.0 / element.value)

    if kind == ElementKind.DIODE:
        model = circuit.model_of(element)
        if model.rs == 0:
            return (), np.zeros((0, 0), dtype=complex)
        anode = element.nodes[0]
        return (anode, element.junction_node()), _two_terminal(1.0 / model.rs)

    if freq == 0:
        return element.nodes, np.zeros((len(element.nodes),) * 2, dtype=complex)

    if kind == ElementKind.L:
        return element.nodes, _two_terminal(1.0 / (1j * omega * element.value))
    if kind == ElementKind.C:
        return element.nodes, _two_terminal(1j * omega * element.value)
    if kind == ElementKind.MLIN:
        line = microstrip_params(circuit.substrate, element.param("w"), freq)
        return element.nodes, mlin_two_port(line, element.param("l"))
    if kind == ElementKind.MRSTUB:
        y = radial_stub_admittance(
            circuit.substrate,
            element.param("ri"),
            element.param("ro"),
            element.param("ang"),
            freq,
            mode=params["media"]["stub mode"],
            min_feed_width=params["media"]["stub min feed width"],
        )
        return element.nodes, np.array([[y]], dtype=complex)
    raise ValueError(f"Element kind {kind} has no admittance")


def circuit_nodes(circuit: Circuit) -> list:
    """Non-ground nodes: circuit order, then the diode internal nodes."""
    return [node for node in circuit.nodes if node != GROUND] + internal_nodes(circuit)


def build_admittance(
    circuit: Circuit,
    freq: float,
    params: dict,
    node_map: Optional[dict] = None,
    terminate_ports: bool = True,
):
    """Stamps all linear elements (and port terminations) into a nodal matrix.

    `node_map` maps nodes onto representative nodes (DC short contraction);
    nodes mapped onto ground disappear. Returns (nodes, matrix), where nodes
    are the remaining representatives in circuit order.
    """
    node_map = node_map or {}
    nodes = []
    for node in circuit_nodes(circuit):
        representative = node_map.get(node, node)
        if representative != GROUND and representative not in nodes:
            nodes.append(representative)
    index = {node: i for i, node in enumerate(nodes)}
    matrix = np.zeros((len(nodes), len(nodes)), dtype=complex)

    def stamp(terminals, local):
        rows = [index.get(node_map.get(node, node)) for node in terminals]
        for a, row in enumerate(rows):
            if row is None:
                continue
            for b, col in enumerate(rows):
                if col is not None:
                    matrix[row, col] += local[a, b]

    for element in circuit.elements:
        terminals, local = element_admittance(element, freq, circuit, params)
        stamp(terminals, local)

    if terminate_ports:
        for port in circuit.ports:
            stamp((port.node_p, port.node_n), _two_terminal(1.0 / port.z0))
    return nodes, matrix


def assemble_admittance(
    circuit: Circuit, freq: float, bias: Optional[dict] = None, params=None
) -> AdmittanceSystem:
    """Small-signal nodal matrix with port terminations.

    Diode junctions are linearised at `bias` (junction voltage per diode
    name, 0 V when absent): g(v) + gmin in parallel with jω·C(v).
    """
    params = params_for_circuit(circuit, params)
    freq = clamp_frequency(freq, params)
    nodes, matrix = build_admittance(circuit, freq, params)
    index = {node: i for i, node in enumerate(nodes)}
    omega = 2 * np.pi * freq
    bias = bias or {}
    gmin = params["devices"]["gmin"]
    for element in circuit.diodes:
        model = diode_model(circuit, element, params)
        v = bias.get(element.name, 0.0)
        y = float(g_of_v(model, v)) + gmin + 1j * omega * float(c_of_v(model, v))
        rows = [index.get(node) for node in junction_nodes(circuit, element)]
        local = _two_terminal(y)
        for a, row in enumerate(rows):
            for b, col in enumerate(rows):
                if row is not None and col is not None:
                    matrix[row, col] += local[a, b]
    return AdmittanceSystem(freq=freq, nodes=nodes, matrix=matrix)


def port_injection(system: AdmittanceSystem, port, current: complex) -> np.ndarray:
    """Right-hand side injecting `current` into the positive port node."""
    rhs = np.zeros(len(system.nodes), dtype=complex)
    if port.node_p != GROUND:
        rhs[system.index(port.node_p)] += current
    if port.node_n != GROUND:
        rhs[system.index(port.node_n)] -= current
    return rhs


def node_voltages(system: AdmittanceSystem, solution) -> dict:
    voltages = {GROUND: 0j}
    voltages.update(zip(system.nodes, solution))
    return voltages


def port_response(
    circuit: Circuit,
    freq: float,
    port: int,
    source_voltage: complex,
    bias: Optional[dict] = None,
    params=None,
) -> dict:
    """Node phasors when `port` is driven by a source `source_voltage` behind
    its z0; all other ports are terminated in their z0."""
    system = assemble_admittance(circuit, freq, bias=bias, params=params)
    spec = circuit.port(port)
    rhs = port_injection(system, spec, source_voltage / spec.z0)
    return node_voltages(system, system.solve(rhs))
