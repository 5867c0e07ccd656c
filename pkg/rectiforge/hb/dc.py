"""
DC operating point of the resistive-diode network.

Inductors and lines are shorts, capacitors and stubs are open, ports are
their z0 with an optional DC source. Plain Newton is tried first, then
source stepping, then Gmin stepping.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from rectiforge.common import logger
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.devices import i_of_v, g_of_v
from rectiforge.netlist import Circuit

from .network import incidence, junctions, norton_reduce


class ConvergenceError(RuntimeError):
    """A nonlinear solve failed after all continuation methods"""


@dataclass
class DcSolution:
    node_voltages: dict
    junction_voltages: dict
    junction_currents: dict
    iterations: int
    residual: float
    converged: bool
    method: str
    history: list = field(default_factory=list)


def _newton(norton, b, junction_list, gmin, v, scale, extra_g, params, history, label):
    """Newton on Y v + B' i(B v) = scale * I. Returns (v, converged, iterations, residual)."""
    settings = params["dc"]
    tol = settings["abs tolerance"]
    step_limit = params["hb"]["step limit"]
    y = norton.admittance.real
    source = scale * norton.current.real
    if v.size == 0:
        return v, True, 1, 0.0
    residual = np.inf
    for iteration in range(1, settings["max iterations"] + 1):
        v_j = b @ v
        currents = np.array(
            [float(i_of_v(jn.model, vj)) for jn, vj in zip(junction_list, v_j)]
        ) + (gmin + extra_g) * v_j
        conductances = np.array(
            [float(g_of_v(jn.model, vj)) for jn, vj in zip(junction_list, v_j)]
        ) + gmin + extra_g
        f = y @ v + b.T @ currents - source
        jacobian = y + b.T @ (conductances[:, None] * b)
        try:
            dv = scipy.linalg.solve(jacobian, -f)
        except (scipy.linalg.LinAlgError, ValueError):
            return v, False, iteration, residual
        max_step = np.max(np.abs(b @ dv), initial=0.0)
        if max_step > step_limit:
            dv *= step_limit / max_step
        v = v + dv
        residual = _residual(y, b, junction_list, gmin + extra_g, v, source)
        history.append({"method": label, "iteration": iteration, "residual_a": residual})
        logger.debug(f"DC {label} iteration {iteration}: residual {residual:.3g} A")
        if residual < tol and max_step <= step_limit:
            return v, True, iteration, residual
    return v, False, settings["max iterations"], residual


def _residual(y, b, junction_list, g_extra, v, source):
    v_j = b @ v
    currents = np.array(
        [float(i_of_v(jn.model, vj)) for jn, vj in zip(junction_list, v_j)]
    ) + g_extra * v_j
    f = y @ v + b.T @ currents - source
    return float(np.max(np.abs(f), initial=0.0))


def solve_dc(circuit: Circuit, port_voltages: Optional[dict] = None, params=None) -> DcSolution:
    """DC solution with port sources `port_voltages` ({port index: volts}).

    Raises:
        ConvergenceError: Newton, source stepping and Gmin stepping all failed
    """
    params = params_for_circuit(circuit, params)
    junction_list = junctions(circuit, params)
    norton = norton_reduce(circuit, 0.0, excitation=port_voltages, params=params)
    b = incidence(junction_list, norton.nodes, norton.node_map)
    gmin = params["devices"]["gmin"]
    settings = params["dc"]
    history = []
    v0 = np.zeros(len(norton.nodes))

    def attempt(label, v, scales=(1.0,), extra=(0.0,)):
        iterations = 0
        converged, residual = False, np.inf
        for scale in scales:
            for extra_g in extra:
                v, converged, used, residual = _newton(
                    norton, b, junction_list, gmin, v, scale, extra_g, params, history, label
                )
                iterations += used
                if not converged:
                    return v, False, iterations, residual
        return v, converged, iterations, residual

    v, converged, iterations, residual = attempt("newton", v0)
    method = "newton"
    if not converged:
        logger.debug("DC Newton failed, trying source stepping")
        steps = settings["source steps"]
        v, converged, used, residual = attempt(
            "source stepping", v0, scales=np.linspace(1.0 / steps, 1.0, steps)
        )
        iterations += used
        method = "source stepping"
    if not converged:
        logger.debug("DC source stepping failed, trying Gmin stepping")
        start = settings["gmin start"]
        extra = [start * 10.0**-i for i in range(settings["gmin steps"])] + [0.0]
        v, converged, used, residual = attempt("gmin stepping", v0, extra=extra)
        iterations += used
        method = "gmin stepping"
    if not converged:
        raise ConvergenceError(
            f"DC operating point did not converge (residual {residual:.3g} A)"
        )

    node_voltages = {node: float(value.real) for node, value in norton.expand(v).items()}
    v_j = b @ v
    return DcSolution(
        node_voltages=node_voltages,
        junction_voltages={jn.name: float(vj) for jn, vj in zip(junction_list, v_j)},
        junction_currents={
            jn.name: float(i_of_v(jn.model, vj)) + gmin * float(vj)
            for jn, vj in zip(junction_list, v_j)
        },
        iterations=iterations,
        residual=residual,
        converged=True,
        method=method,
        history=history,
    )
