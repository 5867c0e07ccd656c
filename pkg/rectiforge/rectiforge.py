"""
Creates the class RectiForge:
This is the main class. It reads a netlist, merges the parameter layers
(defaults, user YAML, netlist `.options`, explicit overrides) and binds the
resulting circuit to the solvers. Results of the last run are kept on the
object and written out by `save`.
"""

from typing import Optional

import numpy as np

from rectiforge.common import utils, logger
from rectiforge.common.config.parseconfig import resolve_params
from rectiforge.netlist import Circuit, load_netlist
from rectiforge.hb import HbSolution, solve_hb
from rectiforge.linear import s_parameters, duplexer_report
from rectiforge.analysis import sweep, sweep_grid, large_signal_s11, pce, to_db
from rectiforge.transient import simulate
from rectiforge.optimize import load_opt_spec, optimize_matching
from rectiforge import export


class RectiForge:
    """
    The RectiForge object holds one circuit and the parameters its solvers use.

    Args:
        circuit (Circuit or str): parsed circuit, netlist path or name of a shipped netlist
        params (dict, optional): parameters (defaults when None), overridden by the
            netlist `.options` and then by `overrides`
        overrides (dict, optional): nested parameter dict with the strongest precedence

    Attributes:
        circuit (Circuit)
        params (dict): fully resolved parameters
        solution (HbSolution): last harmonic-balance solution
        records (list): last sweep
        sparameters (list): last S-parameter run
        report (OptimizationReport): last optimisation report
        status (str): None before the first solve, then `converged` or `not converged`
    """

    def __init__(self, circuit, params: Optional[dict] = None, overrides: Optional[dict] = None):
        if not isinstance(circuit, Circuit):
            circuit = load_netlist(circuit)
        self.circuit = circuit
        self.params = resolve_params(params, circuit.options, overrides)
        self.solution: Optional[HbSolution] = None
        self.records = None
        self.sparameters = None
        self.report = None
        self.transient = None
        self.status = None
        self.last_saved_filename = None

    @utils.timer("Harmonic balance solve", True)
    def solve(self, f0: float, pin: float, harmonics: Optional[int] = None, port: int = 1):
        """Solves one large-signal operating point.

        Raises:
            SolverException: harmonic balance did not converge
        """
        self.solution = solve_hb(
            self.circuit, f0, pin, harmonics=harmonics, params=self.params, port=port, diagnostics=True
        )
        self.status = "converged" if self.solution.converged else "not converged"
        logger.info(f"Status: {self.status}")
        if not self.solution.converged:
            raise SolverException(
                f"Harmonic balance did not converge at f0={f0:.6g} Hz, pin={pin:.4g} dBm "
                f"(residual {self.solution.residual:.3g} A)"
            )
        return self.solution

    def summary(self) -> dict:
        """V_Odc, PCE and large-signal S11 of the last solution"""
        sol = self.solution
        if sol is None:
            raise SolverException("Nothing solved yet")
        load = self.circuit.load
        return {
            "freq": sol.f0,
            "pin": sol.pin,
            "r_load": load.value if load is not None else float("nan"),
            "s11_db": to_db(large_signal_s11(sol)),
            "v_odc": sol.v_odc if sol.v_odc is not None else float("nan"),
            "pce": pce(sol.v_odc, load.value, sol.pin) if sol.v_odc is not None else float("nan"),
            "iterations": sol.iterations,
            "converged": sol.converged,
        }

    @utils.timer("S-parameters")
    def s_parameters(
        self,
        freqs,
        jobs: int = 1,
        pin: Optional[float] = None,
        f0: Optional[float] = None,
        port: int = 1,
    ):
        """Small-signal S-parameters at `freqs`.

        Without `pin` the junctions are linearised at 0 V. With `pin` they are
        linearised at their DC voltage in the large-signal steady state at
        (f0, pin), f0 defaulting to the first frequency of `freqs`.
        """
        bias = None
        if pin is not None and self.circuit.has_diodes:
            f0 = f0 if f0 is not None else float(np.atleast_1d(freqs)[0])
            bias = self.solve(f0, pin, port=port).dc_bias()
        self.sparameters = s_parameters(self.circuit, freqs, bias=bias, params=self.params, jobs=jobs)
        return self.sparameters

    def duplexer_report(self, f_fm: float, f_gsm: float):
        return duplexer_report(self.circuit, f_fm, f_gsm, params=self.params)

    @utils.timer("Sweep", True)
    def sweep(self, axis, grid, fixed, outer_axis=None, outer_grid=None, jobs=1, harmonics=None):
        if outer_axis is None:
            self.records = sweep(
                self.circuit, axis, grid, fixed, params=self.params, jobs=jobs, harmonics=harmonics
            )
        else:
            self.records = sweep_grid(
                self.circuit,
                axis,
                grid,
                outer_axis,
                outer_grid,
                fixed,
                params=self.params,
                jobs=jobs,
                harmonics=harmonics,
            )
        failed = sum(not record.converged for record in self.records)
        if failed:
            logger.warning(f"{failed} of {len(self.records)} sweep points did not converge")
        return self.records

    @utils.timer("Transient simulation", True)
    def simulate(self, f0: float, pin: float, port: int = 1):
        self.transient = simulate(self.circuit, f0, pin, params=self.params, port=port)
        if not self.transient.settled:
            logger.warning("Transient simulation did not reach periodic steady state")
        return self.transient

    @utils.timer("Matching optimisation", True)
    def optimize(self, spec):
        """Tunes the circuit to an OptSpec (object, dict or YAML path).
        The tuned circuit replaces `self.circuit`."""
        if not hasattr(spec, "tunables"):
            spec = load_opt_spec(spec, self.params)
        self.circuit, self.report = optimize_matching(self.circuit, spec, self.params)
        return self.report

    def save(self, filename, folder=None):
        """Writes every result of this object that exists to `folder`
        (the `output` folder setting when None)."""
        folder = folder if folder is not None else self.params["output"]["folder"]
        self.last_saved_filename = filename
        paths = []
        if self.records is not None:
            paths.append(export.save_sweep(self.records, filename, self.params, folder))
        if self.sparameters is not None:
            paths.append(export.save_sparameters_csv(self.sparameters, f"{filename}_sparams", folder))
            paths.append(export.save_touchstone(self.sparameters, filename, folder))
        if self.report is not None:
            paths.append(
                export.save_optimization_report(self.report, f"{filename}_opt", self.params, folder)
            )
        if self.solution is not None and self.solution.diagnostics:
            paths.append(export.save_hb_diagnostics(self.solution, f"{filename}_hb", folder))
        if self.transient is not None:
            paths.append(
                export.save_waveforms(
                    self.transient.time, self.transient.waveforms, f"{filename}_transient", folder
                )
            )
        return paths


###########################
##
## Utils
##
###########################


class SolverException(Exception):
    """Raised when a solver does not reach its steady state"""
