"""
Matching-network tuning: runs the bounded simplex search over the tunables
of an OptSpec and reports the evaluation history and the metrics at every
target before and after.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from rectiforge.common import logger
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.netlist import Circuit

from .neldermead import minimize
from .objective import cost_of, evaluate_targets
from .spec import OptSpec


@dataclass
class OptimizationReport:
    history: pd.DataFrame  # eval, cost, <element.param>...
    metrics: pd.DataFrame  # one row per target, before/after
    x_best: list
    cost_before: float
    cost_after: float
    message: str = ""

    @property
    def improved(self) -> bool:
        return self.cost_after < self.cost_before


class _Scaling:
    """Maps physical tunable values to search coordinates (log for log tunables)."""

    def __init__(self, spec: OptSpec):
        self.log = np.array([t.log for t in spec.tunables])
        self.bounds = [
            (self._to(t.lower, t.log), self._to(t.upper, t.log)) for t in spec.tunables
        ]

    @staticmethod
    def _to(value, log):
        return float(np.log(value)) if log else float(value)

    def to_search(self, values):
        values = np.asarray(values, dtype=float)
        return np.where(self.log, np.log(np.maximum(values, 1e-300)), values)

    def to_physical(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(self.log, np.exp(u), u)


def _metrics_table(spec, before, after) -> pd.DataFrame:
    rows = []
    for target, value_before, value_after in zip(spec.targets, before, after):
        rows.append(
            {
                "freq_hz": target.freq,
                "pin_dbm": np.nan if target.pin is None else target.pin,
                "metric": target.metric,
                "goal": target.goal,
                "weight": target.weight,
                "before": value_before,
                "after": value_after,
            }
        )
    return pd.DataFrame(rows)


def optimize_matching(circuit: Circuit, spec: OptSpec, params=None):
    """Returns (tuned circuit, OptimizationReport).

    Raises OptSpecError when a tunable does not exist in the circuit.
    """
    spec.check_circuit(circuit)
    params = params_for_circuit(circuit, params)
    penalty = params["optimize"]["penalty"]
    scaling = _Scaling(spec)

    lower = np.array([t.lower for t in spec.tunables])
    upper = np.array([t.upper for t in spec.tunables])
    x_start = np.clip(np.array(spec.values(circuit), dtype=float), lower, upper)
    start = spec.apply(circuit, x_start)
    metrics_before = evaluate_targets(start, spec, params)
    cost_before = cost_of(spec, metrics_before, penalty)

    evaluated = {}

    def f(u):
        x = scaling.to_physical(u)
        try:
            values = evaluate_targets(spec.apply(circuit, x), spec, params)
        except ValueError as error:
            logger.debug(f"Invalid candidate {list(x)}: {error}")
            values = [np.nan] * len(spec.targets)
        cost = cost_of(spec, values, penalty)
        evaluated[tuple(u)] = values
        logger.debug(f"Evaluation {len(evaluated)}: cost {cost:.6g} at {list(x)}")
        return cost

    result = minimize(
        f,
        scaling.to_search(x_start),
        scaling.bounds,
        max_evals=spec.max_evals,
        tolerance=spec.tolerance,
        seed=spec.seed,
        simplex_fraction=params["optimize"]["simplex fraction"],
    )

    history = pd.DataFrame(
        [
            [i + 1, cost] + list(scaling.to_physical(u))
            for i, (u, cost) in enumerate(result.history)
        ],
        columns=["eval", "cost"] + spec.labels,
    )
    history["eval"] = history["eval"].astype(int)

    if result.cost < cost_before:
        x_best = scaling.to_physical(result.x)
        tuned = spec.apply(circuit, x_best)
        metrics_after = evaluated.get(tuple(result.x)) or evaluate_targets(tuned, spec, params)
        cost_after = result.cost
    else:
        x_best, tuned = x_start, circuit
        metrics_after, cost_after = metrics_before, cost_before

    logger.info(
        f"Matching optimisation: cost {cost_before:.6g} -> {cost_after:.6g} "
        f"after {result.evaluations} evaluations ({result.message})"
    )
    report = OptimizationReport(
        history=history,
        metrics=_metrics_table(spec, metrics_before, metrics_after),
        x_best=[float(v) for v in x_best],
        cost_before=cost_before,
        cost_after=cost_after,
        message=result.message,
    )
    return tuned, report
