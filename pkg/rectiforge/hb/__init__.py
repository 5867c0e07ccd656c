"""
Nonlinear steady state: DC operating point and single-tone harmonic balance.
"""

from .spectrum import HarmonicSpectrum
from .network import NortonEquivalent, norton_reduce, dc_node_map, kept_nodes
from .dc import DcSolution, ConvergenceError, solve_dc
from .solver import (
    HbSolution,
    PowerLedger,
    solve_hb,
    available_source_voltage,
)
