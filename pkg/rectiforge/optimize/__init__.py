"""
Matching-network optimisation.
"""

from .spec import OptSpec, OptSpecError, Target, Tunable, load_opt_spec, METRICS
from .objective import evaluate_target, evaluate_targets, objective
from .neldermead import MinimizeResult, minimize
from .matching import OptimizationReport, optimize_matching
