"""
Cost of a candidate circuit: weighted shortfall against every target.
"""

import math

import numpy as np

from rectiforge.common import logger
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.analysis.metrics import large_signal_s11, pce, to_db
from rectiforge.hb import ConvergenceError, solve_hb
from rectiforge.linear import SingularSystemError, s_parameters
from rectiforge.netlist import Circuit

from .spec import OptSpec, Target


def evaluate_target(circuit: Circuit, target: Target, params: dict) -> float:
    """Metric value of one target, NaN when the solve failed or did not converge.

    pce and large-signal S11 (a target with pin on a circuit with diodes)
    come from harmonic balance, other S11 targets from the linear analysis.
    """
    try:
        if target.metric == "pce" or (target.pin is not None and circuit.has_diodes):
            sol = solve_hb(circuit, target.freq, target.pin, params=params)
            if not sol.converged:
                return math.nan
            if target.metric == "pce":
                return pce(sol.v_odc, circuit.load.value, target.pin)
            return to_db(large_signal_s11(sol))
        (s,) = s_parameters(circuit, [target.freq], params=params)
        return s.db(1, 1)
    except (ValueError, ConvergenceError, SingularSystemError) as error:
        logger.debug(f"Target evaluation failed: {error}")
        return math.nan


def evaluate_targets(circuit: Circuit, spec: OptSpec, params: dict) -> list:
    return [evaluate_target(circuit, target, params) for target in spec.targets]


def cost_of(spec: OptSpec, values, penalty: float) -> float:
    cost = 0.0
    for target, value in zip(spec.targets, values):
        if not np.isfinite(value):
            cost += penalty
        else:
            cost += target.weight * target.shortfall(value)
    return cost


def objective(circuit: Circuit, spec: OptSpec, x, params=None) -> float:
    """Cost of `circuit` with the tunables set to the physical values `x`.
    Never returns a non-finite number."""
    params = params_for_circuit(circuit, params)
    penalty = params["optimize"]["penalty"]
    try:
        candidate = spec.apply(circuit, x)
    except (KeyError, ValueError) as error:
        logger.debug(f"Invalid candidate {list(x)}: {error}")
        return penalty * len(spec.targets)
    cost = cost_of(spec, evaluate_targets(candidate, spec, params), penalty)
    return cost if math.isfinite(cost) else penalty * len(spec.targets)
