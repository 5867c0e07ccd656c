"""
Time-domain reference solver for lumped circuits.

Trapezoidal companion models (one backward-Euler step at start-up) with a
Newton iteration per time step. The circuit is driven by a cosine source
behind the z0 of one port, so that steady-state phasors compare directly
with the harmonic-balance and AC results. Integration runs period by period
until the period-averaged output voltage has settled.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from rectiforge.common import logger
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.devices import i_of_v, g_of_v, q_of_v, c_of_v
from rectiforge.hb import ConvergenceError, available_source_voltage
from rectiforge.linear import circuit_nodes, diode_model, junction_nodes
from rectiforge.netlist import GROUND, Circuit, ElementKind

MIN_STEPS_PER_PERIOD = 500


class UnsupportedElementError(ValueError):
    pass


@dataclass
class EnergyLedger:
    """Energies (J) over the last simulated period"""

    source: float
    dissipated: float
    stored_change: float
    balance_error: float


@dataclass
class TransientResult:
    f0: float
    time: np.ndarray
    waveforms: dict
    diode_voltages: dict
    v_odc: Optional[float]
    periods: int
    settled: bool
    dt: float
    steps_per_period: int
    ledger: EnergyLedger
    last_period: dict = field(default_factory=dict, repr=False)

    def phasor(self, node: str, k: int = 1) -> complex:
        """Peak phasor of harmonic k of a node voltage over the last period"""
        samples = self.last_period[node][:-1]
        n = len(samples)
        theta = 2 * np.pi * np.arange(n) / n
        coefficient = np.sum(samples * np.exp(-1j * k * theta)) / n
        return complex(coefficient if k == 0 else 2 * coefficient)

    def conduction_drop(self, diode: str) -> float:
        """Peak forward voltage of a diode in the last period"""
        return float(np.max(self.last_period[f"diode:{diode}"]))


def _incidence(pairs, index):
    matrix = np.zeros((len(pairs), len(index)))
    for row, (a, b) in enumerate(pairs):
        if a in index:
            matrix[row, index[a]] += 1.0
        if b in index:
            matrix[row, index[b]] -= 1.0
    return matrix


class _TransientNetwork:
    def __init__(self, circuit: Circuit, params: dict, port: int):
        self.circuit = circuit
        self.params = params
        self.nodes = circuit_nodes(circuit)
        index = {node: i for i, node in enumerate(self.nodes)}
        self.index = index
        size = len(self.nodes)

        resistors = [(e.nodes, 1.0 / e.value) for e in circuit.elements if e.kind == ElementKind.R]
        for element in circuit.diodes:
            model = circuit.model_of(element)
            if model.rs > 0:
                resistors.append(((element.nodes[0], element.junction_node()), 1.0 / model.rs))
        for spec in circuit.ports:
            resistors.append(((spec.node_p, spec.node_n), 1.0 / spec.z0))
        self.a_r = _incidence([pair for pair, _ in resistors], index)
        self.g_r = np.array([g for _, g in resistors])
        self.g = self.a_r.T @ (self.g_r[:, None] * self.a_r) if resistors else np.zeros((size, size))

        caps = [e for e in circuit.elements if e.kind == ElementKind.C]
        inductors = [e for e in circuit.elements if e.kind == ElementKind.L]
        self.a_c = _incidence([e.nodes for e in caps], index)
        self.cap = np.array([e.value for e in caps])
        self.a_l = _incidence([e.nodes for e in inductors], index)
        self.ind = np.array([e.value for e in inductors])

        self.diodes = circuit.diodes
        self.models = [diode_model(circuit, e, params) for e in self.diodes]
        self.a_j = _incidence([junction_nodes(circuit, e) for e in self.diodes], index)
        self.a_d = _incidence([e.nodes for e in self.diodes], index)
        self.gmin = params["devices"]["gmin"]

        driven = circuit.port(port)
        self.drive = _incidence([(driven.node_p, driven.node_n)], index)[0] / driven.z0
        self.z0 = driven.z0

    def linear_matrix(self, h, trapezoidal):
        factor = 2.0 if trapezoidal else 1.0
        matrix = self.g.copy()
        if len(self.cap):
            matrix += self.a_c.T @ ((factor * self.cap / h)[:, None] * self.a_c)
        if len(self.ind):
            matrix += self.a_l.T @ ((h / (factor * self.ind))[:, None] * self.a_l)
        return matrix

    def junction_eval(self, v_j):
        i = np.array([float(i_of_v(m, v)) for m, v in zip(self.models, v_j)]) + self.gmin * v_j
        g = np.array([float(g_of_v(m, v)) for m, v in zip(self.models, v_j)]) + self.gmin
        q = np.array([float(q_of_v(m, v)) for m, v in zip(self.models, v_j)])
        c = np.array([float(c_of_v(m, v)) for m, v in zip(self.models, v_j)])
        return i, g, q, c


@dataclass
class _State:
    v: np.ndarray
    i_c: np.ndarray
    i_l: np.ndarray
    i_q: np.ndarray


def _step(net, state, source, h, trapezoidal, matrix, settings):
    """Advances one time step; returns the new state."""
    beta = 1.0 if trapezoidal else 0.0
    factor = 2.0 if trapezoidal else 1.0
    alpha = factor / h

    v_c_old = net.a_c @ state.v
    g_c = factor * net.cap / h
    hist_c = -(g_c * v_c_old + beta * state.i_c)
    k_l = h / (factor * net.ind) if len(net.ind) else net.ind
    hist_l = state.i_l + beta * k_l * (net.a_l @ state.v)
    v_j_old = net.a_j @ state.v
    q_old = net.junction_eval(v_j_old)[2] if len(net.models) else np.zeros(0)

    constant = net.a_c.T @ hist_c + net.a_l.T @ hist_l - source * net.drive
    step_limit = net.params["hb"]["step limit"]
    tol = settings["abs tolerance"]

    v = state.v.copy()
    for iteration in range(1, settings["max newton iterations"] + 1):
        v_j = net.a_j @ v
        i, g, q, c = net.junction_eval(v_j)
        i_j = i + alpha * (q - q_old) - beta * state.i_q
        f = matrix @ v + constant + net.a_j.T @ i_j
        jacobian = matrix + net.a_j.T @ ((g + alpha * c)[:, None] * net.a_j)
        dv = scipy.linalg.solve(jacobian, -f, check_finite=False)
        largest = float(np.max(np.abs(net.a_j @ dv), initial=0.0))
        if largest > step_limit:
            dv *= step_limit / largest
        v = v + dv
        v_j = net.a_j @ v
        i, g, q, c = net.junction_eval(v_j)
        i_j = i + alpha * (q - q_old) - beta * state.i_q
        residual = float(np.max(np.abs(matrix @ v + constant + net.a_j.T @ i_j), initial=0.0))
        tiny_step = np.max(np.abs(dv), initial=0.0) <= 1e-12 * max(1.0, np.max(np.abs(v), initial=0.0))
        if largest <= step_limit and (residual < tol or tiny_step):
            break
    else:
        raise ConvergenceError(f"Transient Newton failed to converge (residual {residual:.3g} A)")

    v_c = net.a_c @ v
    i_c = g_c * (v_c - v_c_old) - beta * state.i_c
    i_l = state.i_l + k_l * (net.a_l @ v + beta * (net.a_l @ state.v))
    i_q = alpha * (q - q_old) - beta * state.i_q
    return _State(v=v, i_c=i_c, i_l=i_l, i_q=i_q)


def _energy_ledger(net, voltages, inductor_currents, sources, h):
    """Energy balance of one period from midpoint products; exact for the
    trapezoidal rule."""
    v_mid = 0.5 * (voltages[1:] + voltages[:-1])
    s_mid = 0.5 * (sources[1:] + sources[:-1])

    driven_p = v_mid @ (net.drive * net.z0)
    i_source = (s_mid - driven_p) / net.z0
    source = h * float(np.sum(s_mid * i_source))

    v_r = v_mid @ net.a_r.T
    dissipated = h * float(np.sum(v_r**2 * net.g_r))
    # The driven termination sees the source, not only the node voltage
    dissipated += h * float(np.sum((s_mid - driven_p) ** 2 / net.z0 - driven_p**2 / net.z0))

    stored = 0.0
    if len(net.cap):
        v_c = voltages @ net.a_c.T
        stored += float(np.sum(0.5 * net.cap * (v_c[-1] ** 2 - v_c[0] ** 2)))
    if len(net.ind):
        stored += float(
            np.sum(0.5 * net.ind * (inductor_currents[-1] ** 2 - inductor_currents[0] ** 2))
        )
    if len(net.models):
        v_j = voltages @ net.a_j.T
        currents = np.empty_like(v_j)
        charges = np.empty_like(v_j)
        for col, model in enumerate(net.models):
            currents[:, col] = i_of_v(model, v_j[:, col]) + net.gmin * v_j[:, col]
            charges[:, col] = q_of_v(model, v_j[:, col])
        vj_mid = 0.5 * (v_j[1:] + v_j[:-1])
        i_mid = 0.5 * (currents[1:] + currents[:-1])
        dissipated += h * float(np.sum(vj_mid * i_mid))
        stored += float(np.sum(vj_mid * np.diff(charges, axis=0)))

    reference = max(abs(source), np.finfo(float).tiny)
    return EnergyLedger(
        source=source,
        dissipated=dissipated,
        stored_change=stored,
        balance_error=abs(source - dissipated - stored) / reference,
    )


def simulate(
    circuit: Circuit,
    f0: float,
    pin: Optional[float],
    dt: Optional[float] = None,
    max_periods: Optional[int] = None,
    params=None,
    port: int = 1,
    source_offset: float = 0.0,
) -> TransientResult:
    """Integrates until periodic steady state.

    `pin` is the available power (dBm) of the cosine drive at `port`, None
    for a DC offset source only.

    Raises:
        UnsupportedElementError: the circuit contains distributed elements
        ConvergenceError: a time step did not converge
    """
    if not circuit.is_lumped:
        raise UnsupportedElementError("transient oracle supports lumped circuits only")
    params = params_for_circuit(circuit, params)
    settings = params["transient"]
    period = 1.0 / f0
    if dt is None:
        steps = settings["steps per period"]
    else:
        if dt > period / MIN_STEPS_PER_PERIOD * (1 + 1e-9):
            raise ValueError(f"Time step {dt:.3g} s exceeds T0/{MIN_STEPS_PER_PERIOD}")
        steps = int(math.ceil(period / dt - 1e-9))
    h = period / steps
    max_periods = max_periods or settings["max periods"]

    net = _TransientNetwork(circuit, params, port)
    amplitude = 0.0 if pin is None else available_source_voltage(pin, net.z0)
    omega = 2 * np.pi * f0
    phase = omega * h * np.arange(steps + 1)
    period_source = source_offset + amplitude * np.cos(phase)

    size = len(net.nodes)
    state = _State(
        v=np.zeros(size),
        i_c=np.zeros(len(net.cap)),
        i_l=np.zeros(len(net.ind)),
        i_q=np.zeros(len(net.models)),
    )
    matrices = {False: net.linear_matrix(h, False), True: net.linear_matrix(h, True)}

    monitor = [net.index[circuit.output.node]] if circuit.output else list(range(size))
    recorded = deque(maxlen=settings["record periods"])
    previous_average, calm, settled = None, 0, False
    first = True
    periods = 0
    for periods in range(1, max_periods + 1):
        voltages = np.empty((steps + 1, size))
        currents_l = np.empty((steps + 1, len(net.ind)))
        voltages[0], currents_l[0] = state.v, state.i_l
        for n in range(1, steps + 1):
            trapezoidal = not first
            state = _step(net, state, period_source[n], h, trapezoidal, matrices[trapezoidal], settings)
            first = False
            voltages[n], currents_l[n] = state.v, state.i_l
        recorded.append((voltages, currents_l))

        watched = voltages[:-1][:, monitor]
        average = watched.mean(axis=0)
        peak = float(np.max(np.abs(watched), initial=0.0))
        if previous_average is not None:
            change = float(np.max(np.abs(average - previous_average), initial=0.0))
            scale = max(float(np.max(np.abs(average), initial=0.0)), peak)
            calm = calm + 1 if change <= settings["settle tolerance"] * scale else 0
        previous_average = average
        if calm >= settings["settle periods"]:
            settled = True
            break
        if periods % 100 == 0:
            logger.debug(f"Transient: period {periods}, monitored average {average}")

    if not settled:
        logger.warning(f"Transient run did not settle within {max_periods} periods")

    last_voltages, last_currents = recorded[-1]
    ledger = _energy_ledger(net, last_voltages, last_currents, period_source, h)

    window = np.concatenate([v[:-1] for v, _ in recorded] + [last_voltages[-1:]])
    start_period = periods - len(recorded)
    time = (start_period * steps + np.arange(len(window))) * h
    waveforms = {GROUND: np.zeros(len(window))}
    last_period = {GROUND: np.zeros(steps + 1)}
    for node, column in net.index.items():
        waveforms[node] = window[:, column]
        last_period[node] = last_voltages[:, column]
    diode_voltages = {}
    for row, element in enumerate(net.diodes):
        diode_voltages[element.name] = window @ net.a_d[row]
        last_period[f"diode:{element.name}"] = last_voltages @ net.a_d[row]

    v_odc = None
    if circuit.output is not None:
        v_odc = float(np.mean(last_period[circuit.output.node][:-1]))

    return TransientResult(
        f0=f0,
        time=time,
        waveforms=waveforms,
        diode_voltages=diode_voltages,
        v_odc=v_odc,
        periods=periods,
        settled=settled,
        dt=h,
        steps_per_period=steps,
        ledger=ledger,
        last_period=last_period,
    )
