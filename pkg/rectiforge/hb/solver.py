"""
Single-tone harmonic balance.

The unknowns are the harmonic voltages of the junction-terminal nodes,
stacked as one real vector

    x = [V_0 (DC nodes), Re V_1, Im V_1, ..., Re V_K, Im V_K]

where every harmonic block covers the kept nodes of the Norton equivalent.
The harmonic KCL residual is

    F(x) = Y x + T' I_j(T x) - I_s

with Y the block-diagonal reduced admittance, T the map from node
voltages to junction voltage coefficients, I_j the junction current
coefficients (conduction plus displacement) obtained on an oversampled
time grid, and I_s the port source.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
import scipy.linalg

from rectiforge.common import logger
from rectiforge.common.utils import HarmonicTruncationWarning
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.devices import i_of_v, g_of_v, q_of_v, c_of_v
from rectiforge.linear import element_admittance, solve_nodal
from rectiforge.netlist import Circuit

from .dc import ConvergenceError, solve_dc
from .network import incidence, junctions, norton_reduce
from .spectrum import (
    HarmonicSpectrum,
    n_samples,
    transform_matrices,
)

PIN_RANGE = (-60.0, 20.0)
MIN_HARMONICS = 3


@dataclass
class PowerLedger:
    """Time-averaged powers (W). `dissipated` covers every element, the
    terminations of the other ports and the junctions."""

    available: float
    port_input: float
    delivered_fundamental: float
    dc_load: float
    dissipated: float
    balance_error: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class HbSolution:
    f0: float
    pin: float
    harmonics: int
    port: int
    node_spectra: dict
    junction_voltages: dict
    junction_currents: dict
    port_voltages: dict
    port_currents: dict
    iterations: int
    residual: float
    converged: bool
    ledger: Optional[PowerLedger]
    v_odc: Optional[float]
    diagnostics: list = field(default_factory=list)
    state: Optional[np.ndarray] = None
    port_z0: dict = field(default_factory=dict)

    def spectrum(self, node: str) -> HarmonicSpectrum:
        return self.node_spectra[node]

    def waveform(self, node: str, n: Optional[int] = None) -> np.ndarray:
        spectrum = self.node_spectra[node]
        return spectrum.to_time(n or 4 * (self.harmonics + 1))

    def dc_bias(self) -> dict:
        """DC voltage of every junction, the bias its small-signal model uses"""
        return {name: spectrum.dc for name, spectrum in self.junction_voltages.items()}

    def diagnostics_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            self.diagnostics, columns=["level_dbm", "iteration", "residual_a", "step_scale"]
        )


def available_source_voltage(pin_dbm: float, z0: float) -> float:
    """Peak open-circuit voltage of a source with available power pin"""
    return math.sqrt(8.0 * z0 * 1e-3 * 10.0 ** (pin_dbm / 10.0))


class _HarmonicBalanceProblem:
    def __init__(self, circuit: Circuit, f0: float, harmonics: int, params: dict, port: int):
        self.circuit = circuit
        self.f0 = f0
        self.harmonics = harmonics
        self.params = params
        self.port = port
        self.gmin = params["devices"]["gmin"]
        self.junctions = junctions(circuit, params)

        self.nortons = [norton_reduce(circuit, 0.0, params=params)]
        for k in range(1, harmonics + 1):
            excitation = {port: 1.0} if k == 1 else None
            self.nortons.append(
                norton_reduce(circuit, k * f0, excitation=excitation, params=params)
            )

        dc, ac = self.nortons[0], self.nortons[1]
        self.m0 = len(dc.nodes)
        self.m = len(ac.nodes)
        self.b0 = incidence(self.junctions, dc.nodes, dc.node_map)
        self.b = incidence(self.junctions, ac.nodes)

        self.n = n_samples(harmonics, params["hb"]["oversampling"])
        self.to_time, self.to_freq, self.derivative = transform_matrices(
            harmonics, self.n, 2 * np.pi * f0
        )
        self.h = 2 * harmonics + 1
        self.size = self.m0 + 2 * harmonics * self.m
        self._build_matrices()

    ## Layout

    def re_slice(self, k):
        start = self.m0 + (k - 1) * 2 * self.m
        return slice(start, start + self.m)

    def im_slice(self, k):
        start = self.m0 + (k - 1) * 2 * self.m + self.m
        return slice(start, start + self.m)

    def _build_matrices(self):
        size, h = self.size, self.h
        self.y_lin = np.zeros((size, size))
        self.y_lin[: self.m0, : self.m0] = self.nortons[0].admittance.real
        for k in range(1, self.harmonics + 1):
            y = self.nortons[k].admittance
            re, im = self.re_slice(k), self.im_slice(k)
            self.y_lin[re, re] = y.real
            self.y_lin[re, im] = -y.imag
            self.y_lin[im, re] = y.imag
            self.y_lin[im, im] = y.real

        self.unit_source = np.zeros(size)
        self.unit_source[self.re_slice(1)] = self.nortons[1].current.real
        self.unit_source[self.im_slice(1)] = self.nortons[1].current.imag

        self.t = np.zeros((len(self.junctions) * h, size))
        for j in range(len(self.junctions)):
            row = j * h
            self.t[row, : self.m0] = self.b0[j]
            for k in range(1, self.harmonics + 1):
                self.t[row + 2 * k - 1, self.re_slice(k)] = self.b[j]
                self.t[row + 2 * k, self.im_slice(k)] = self.b[j]

    ## Nonlinear evaluation

    def junction_coefficients(self, x):
        return (self.t @ x).reshape(len(self.junctions), self.h)

    def evaluate(self, x):
        coefficients = self.junction_coefficients(x)
        v_t = coefficients @ self.to_time.T
        i_t, g_t, q_t, c_t = (np.empty_like(v_t) for _ in range(4))
        for j, junction in enumerate(self.junctions):
            i_t[j] = i_of_v(junction.model, v_t[j]) + self.gmin * v_t[j]
            g_t[j] = g_of_v(junction.model, v_t[j]) + self.gmin
            q_t[j] = q_of_v(junction.model, v_t[j])
            c_t[j] = c_of_v(junction.model, v_t[j])
        currents = i_t @ self.to_freq.T + (q_t @ self.to_freq.T) @ self.derivative.T
        return coefficients, v_t, currents, g_t, c_t

    def residual(self, x, vs):
        _, _, currents, g_t, c_t = self.evaluate(x)
        f = self.y_lin @ x + self.t.T @ currents.ravel() - vs * self.unit_source
        return f, g_t, c_t

    def jacobian(self, g_t, c_t):
        if not self.junctions:
            return self.y_lin
        e, f, d = self.to_time, self.to_freq, self.derivative
        blocks = [
            f @ (g[:, None] * e) + d @ f @ (c[:, None] * e) for g, c in zip(g_t, c_t)
        ]
        return self.y_lin + self.t.T @ scipy.linalg.block_diag(*blocks) @ self.t

    ## Newton

    def newton(self, x, vs, tol, level, rows):
        settings = self.params["hb"]
        step_limit = settings["step limit"]
        residual = np.inf
        for iteration in range(settings["max iterations"] + 1):
            f, g_t, c_t = self.residual(x, vs)
            residual = float(np.max(np.abs(f), initial=0.0))
            if residual < tol:
                return x, True, iteration, residual
            if iteration == settings["max iterations"]:
                break
            try:
                dx = scipy.linalg.solve(self.jacobian(g_t, c_t), -f)
            except (scipy.linalg.LinAlgError, ValueError):
                logger.debug(f"Singular harmonic-balance Jacobian at {level:.4g} dBm")
                break
            dv = self.junction_coefficients(dx) @ self.to_time.T
            largest = float(np.max(np.abs(dv), initial=0.0))
            scale = min(1.0, step_limit / largest) if largest > 0 else 1.0
            x = x + scale * dx
            rows.append(
                {
                    "level_dbm": level,
                    "iteration": iteration + 1,
                    "residual_a": residual,
                    "step_scale": scale,
                }
            )
        return x, False, iteration, residual

    def ramp(self, x, start, target, step, tol, rows):
        """Source stepping from `start` to `target` dBm. A failed level is
        retried with half the increment, down to 1/8 of `step`."""
        z0 = self.circuit.port(self.port).z0
        min_step = step / 8
        level, increment = start, step
        iterations, residual = 0, np.inf
        while level < target - 1e-12:
            next_level = min(level + increment, target)
            x_new, ok, used, residual = self.newton(
                x, available_source_voltage(next_level, z0), tol, next_level, rows
            )
            iterations += used
            logger.debug(
                f"Source stepping: {next_level:.4g} dBm, residual {residual:.3g} A, "
                f"converged {ok}"
            )
            if ok:
                x, level = x_new, next_level
                increment = min(2 * increment, step)
            elif increment > min_step:
                increment /= 2
            else:
                return x_new, False, iterations, residual
        return x, True, iterations, residual

    ## Start point

    def initial_guess(self, vs):
        """DC operating point plus the linearised response at harmonic 1"""
        x = np.zeros(self.size)
        try:
            dc = solve_dc(self.circuit, params=self.params)
            bias = dc.junction_voltages
            x[: self.m0] = [dc.node_voltages[node] for node in self.nortons[0].nodes]
        except ConvergenceError:
            bias = {}
        if self.m == 0:
            return x
        omega = 2 * np.pi * self.f0
        y_d = np.array(
            [
                float(g_of_v(jn.model, bias.get(jn.name, 0.0)))
                + self.gmin
                + 1j * omega * float(c_of_v(jn.model, bias.get(jn.name, 0.0)))
                for jn in self.junctions
            ]
        )
        norton = self.nortons[1]
        matrix = norton.admittance + self.b.T @ (y_d[:, None] * self.b)
        v1 = solve_nodal(matrix, vs * norton.current, norton.nodes, self.f0)
        x[self.re_slice(1)] = v1.real
        x[self.im_slice(1)] = v1.imag
        return x

    ## Results

    def node_spectra(self, x, vs):
        voltages = [self.nortons[0].expand(x[: self.m0])]
        for k in range(1, self.harmonics + 1):
            v_k = x[self.re_slice(k)] + 1j * x[self.im_slice(k)]
            voltages.append(self.nortons[k].expand(v_k, scale=vs if k == 1 else 0.0))
        return {
            node: HarmonicSpectrum(
                f0=self.f0, phasors=np.array([v[node] for v in voltages])
            )
            for node in voltages[1]
        }


def _check_preconditions(circuit, f0, pin, harmonics, port):
    if harmonics < MIN_HARMONICS:
        raise ValueError(f"At least {MIN_HARMONICS} harmonics are needed, got {harmonics}")
    if not PIN_RANGE[0] <= pin <= PIN_RANGE[1]:
        raise ValueError(f"Input power {pin} dBm outside {PIN_RANGE} dBm")
    if not f0 > 0:
        raise ValueError(f"Fundamental frequency must be > 0, got {f0}")
    try:
        circuit.port(port)
    except KeyError:
        raise ValueError(f"Port P{port} is not declared")


def _port_spectra(circuit, spectra, port, vs, f0, harmonics):
    voltages, currents = {}, {}
    for spec in circuit.ports:
        v = spectra[spec.node_p] - spectra[spec.node_n]
        source = np.zeros(harmonics + 1, dtype=complex)
        if spec.index == port:
            source[1] = vs
        voltages[spec.index] = v
        currents[spec.index] = HarmonicSpectrum(
            f0=f0, phasors=(source - v.phasors) / spec.z0
        )
    return voltages, currents


def _average_power(v_phasors, i_phasors):
    """Time-averaged v·i of two spectra"""
    v_phasors, i_phasors = np.asarray(v_phasors), np.asarray(i_phasors)
    return float(
        (v_phasors[0] * np.conj(i_phasors[0])).real
        + 0.5 * np.sum((v_phasors[1:] * np.conj(i_phasors[1:])).real)
    )


def power_ledger(circuit, spectra, junction_v, junction_i, port_v, port_i, port, vs, f0, params):
    harmonics = len(next(iter(spectra.values())).phasors) - 1
    driven = circuit.port(port)
    port_input = _average_power(port_v[port].phasors, port_i[port].phasors)
    delivered = 0.5 * (port_v[port].phasors[1] * np.conj(port_i[port].phasors[1])).real

    dissipated = 0.0
    for k in range(harmonics + 1):
        weight = 1.0 if k == 0 else 0.5
        for element in circuit.elements:
            terminals, local = element_admittance(element, k * f0, circuit, params)
            if not terminals:
                continue
            v = np.array([spectra[node].phasors[k] for node in terminals])
            dissipated += weight * float((np.conj(v) @ local @ v).real)
    for spec in circuit.ports:
        if spec.index != port:
            dissipated -= _average_power(port_v[spec.index].phasors, port_i[spec.index].phasors)
    for name in junction_v:
        dissipated += _average_power(junction_v[name].phasors, junction_i[name].phasors)

    dc_load = 0.0
    load = circuit.load
    if load is not None:
        a, b = load.nodes
        dc_load = (spectra[a].dc - spectra[b].dc) ** 2 / load.value

    available = vs**2 / (8.0 * driven.z0)
    reference = max(abs(port_input), available, np.finfo(float).tiny)
    return PowerLedger(
        available=available,
        port_input=port_input,
        delivered_fundamental=float(delivered),
        dc_load=float(dc_load),
        dissipated=dissipated,
        balance_error=abs(port_input - dissipated) / reference,
    )


def solve_hb(
    circuit: Circuit,
    f0: float,
    pin: float,
    harmonics: Optional[int] = None,
    params=None,
    port: int = 1,
    initial: Optional[HbSolution] = None,
    diagnostics: bool = False,
) -> HbSolution:
    """Large-signal periodic steady state under a sine source at `port`.

    `pin` is the available source power in dBm. Non-convergence is not an
    error: the best iterate is returned with converged=False.
    """
    params = params_for_circuit(circuit, params)
    settings = params["hb"]
    harmonics = harmonics or settings["harmonics"]
    _check_preconditions(circuit, f0, pin, harmonics, port)

    problem = _HarmonicBalanceProblem(circuit, f0, harmonics, params, port)
    z0 = circuit.port(port).z0
    vs = available_source_voltage(pin, z0)
    tol = max(settings["abs tolerance"], settings["rel tolerance"] * vs / z0)
    threshold = settings["source stepping threshold"]

    warm = (
        initial is not None
        and initial.state is not None
        and initial.harmonics == harmonics
        and len(initial.state) == problem.size
    )
    if warm:
        start = min(initial.pin, pin)
        x = initial.state.copy()
    else:
        start = min(threshold, pin)
        x = problem.initial_guess(available_source_voltage(start, z0))

    rows = []
    x, converged, iterations, residual = problem.newton(
        x, available_source_voltage(start, z0), tol, start, rows
    )
    if start < pin:
        x, converged, used, residual = problem.ramp(
            x, start, pin, settings["source step"], tol, rows
        )
        iterations += used

    coefficients, _, currents, _, _ = problem.evaluate(x)
    spectra = problem.node_spectra(x, vs)
    junction_v = {
        jn.name: HarmonicSpectrum.from_coefficients(f0, coefficients[j])
        for j, jn in enumerate(problem.junctions)
    }
    junction_i = {
        jn.name: HarmonicSpectrum.from_coefficients(f0, currents[j])
        for j, jn in enumerate(problem.junctions)
    }
    port_v, port_i = _port_spectra(circuit, spectra, port, vs, f0, harmonics)
    ledger = power_ledger(
        circuit, spectra, junction_v, junction_i, port_v, port_i, port, vs, f0, params
    )
    v_odc = None
    if circuit.output is not None:
        v_odc = spectra[circuit.output.node].dc

    if not converged:
        logger.warning(
            f"Harmonic balance did not converge at f0 = {f0:.6g} Hz, "
            f"pin = {pin:.4g} dBm (residual {residual:.3g} A)"
        )
    _check_truncation(junction_i, harmonics, settings["harmonic warning ratio"])

    return HbSolution(
        f0=f0,
        pin=pin,
        harmonics=harmonics,
        port=port,
        node_spectra=spectra,
        junction_voltages=junction_v,
        junction_currents=junction_i,
        port_voltages=port_v,
        port_currents=port_i,
        iterations=iterations,
        residual=residual,
        converged=converged,
        ledger=ledger,
        v_odc=v_odc,
        diagnostics=rows if diagnostics else [],
        state=x,
        port_z0={spec.index: spec.z0 for spec in circuit.ports},
    )


def _check_truncation(junction_currents, harmonics, ratio):
    for name, spectrum in junction_currents.items():
        fundamental = spectrum.magnitude(1)
        if fundamental > 0 and spectrum.magnitude(harmonics) > ratio * fundamental:
            message = (
                f"Junction {name}: harmonic {harmonics} carries "
                f"{spectrum.magnitude(harmonics) / fundamental:.3g} of the fundamental current; "
                "increase the number of harmonics"
            )
            logger.warning(message)
            warnings.warn(message, HarmonicTruncationWarning, stacklevel=3)
