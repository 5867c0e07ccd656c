"""
Bounded Nelder-Mead on top of scipy with a hard evaluation budget.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sp_optimize

from rectiforge.common import logger


class _BudgetExhausted(Exception):
    pass


@dataclass
class MinimizeResult:
    x: np.ndarray
    cost: float
    history: list = field(default_factory=list)  # (x, cost) in evaluation order
    evaluations: int = 0
    message: str = ""

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate([cost for _, cost in self.history])


def initial_simplex(x0, lower, upper, fraction, seed):
    """x0 plus one vertex per coordinate, displaced by `fraction` of the range.

    Edges are jittered by up to 10% with a seeded generator and point inwards
    when the outward vertex would leave the box.
    """
    rng = np.random.default_rng(seed)
    n = len(x0)
    span = (upper - lower) * fraction * (1.0 + 0.1 * rng.uniform(-1.0, 1.0, n))
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        step = span[i] if x0[i] + span[i] <= upper[i] else -span[i]
        simplex[i + 1, i] = x0[i] + step
    return np.clip(simplex, lower, upper)


def minimize(
    f,
    x0,
    bounds,
    max_evals: int = 400,
    tolerance: float = 1e-9,
    seed: int = 0,
    simplex_fraction: float = 0.05,
) -> MinimizeResult:
    """Minimises f inside the box `bounds` = [(lo, hi), ...].

    Every evaluated point is clipped to the box and f is called at most
    `max_evals` times. The result holds the best point found, whatever
    the reason the search stopped.
    """
    lower = np.array([b[0] for b in bounds], dtype=float)
    upper = np.array([b[1] for b in bounds], dtype=float)
    x0 = np.clip(np.asarray(x0, dtype=float), lower, upper)
    result = MinimizeResult(x=x0.copy(), cost=np.inf)

    def counted(x):
        if result.evaluations >= max_evals:
            raise _BudgetExhausted()
        x = np.clip(np.asarray(x, dtype=float), lower, upper)
        cost = float(f(x))
        result.evaluations += 1
        result.history.append((x.copy(), cost))
        if cost < result.cost:
            result.x, result.cost = x.copy(), cost
        return cost

    counted(x0)
    if max_evals == 1:
        result.message = "Evaluation budget of 1"
        return result

    try:
        outcome = sp_optimize.minimize(
            counted,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lower, upper)),
            options={
                "initial_simplex": initial_simplex(x0, lower, upper, simplex_fraction, seed),
                "maxfev": max_evals,
                "xatol": tolerance,
                "fatol": tolerance,
                "adaptive": len(x0) > 2,
            },
        )
        result.message = str(outcome.message)
    except _BudgetExhausted:
        result.message = f"Evaluation budget of {max_evals} exhausted"
    logger.debug(f"Nelder-Mead: {result.message}, best cost {result.cost:.6g}")
    return result
