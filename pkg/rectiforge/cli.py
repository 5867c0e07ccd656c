"""
Command-line front end.

    rectiforge sim dualband_rectifier.net --f0 95e6 --pin -10
    rectiforge sweep dualband_rectifier.net --axis pin --from -40 --to 10 --step 2.5 --f0 95e6
    rectiforge sparams duplexer.net --f 95e6,925e6 --ports 3
    rectiforge sparams doubler.net --f 90e6,95e6,100e6 --pin -5
    rectiforge fbw dualband_rectifier.net --from 60e6 --to 130e6 --step 1e6 --pin -2.5
    rectiforge optimize lmatch.net --spec lmatch.yaml --output lmatch_tuned.net
    rectiforge oracle doubler.net --f0 95e6 --pin -10

Exit codes: 0 success, 1 usage error (bad flags, netlists, configs or
specs), 2 solver non-convergence, 3 I/O error. Diagnostics go to stderr as
a single line, results to stdout.
"""

import argparse
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from rectiforge.common import logger, format_number
from rectiforge.common.config.parseconfig import load_params
from rectiforge.netlist import NetlistError, load_netlist, parse_value, render
from rectiforge.hb import ConvergenceError
from rectiforge.analysis import (
    NoBandError,
    band_edges,
    fractional_bandwidth,
    records_to_frame,
    reflection_curve,
)
from rectiforge.analysis.sweep import SweepRecord
from rectiforge.optimize import OptSpecError, load_opt_spec
from rectiforge.transient import UnsupportedElementError
from rectiforge import export
from rectiforge.rectiforge import RectiForge, SolverException

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_IO = 3

LOG_FORMAT = "[%(levelname)s, %(asctime)s] %(name)s - %(message)s"


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; usage errors here are 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    subcommand: str
    netlist: Optional[str]
    freqs: list = field(default_factory=list)
    pins: list = field(default_factory=list)
    loads: list = field(default_factory=list)
    harmonics: Optional[int] = None
    stub_mode: Optional[str] = None
    output: Optional[str] = None
    seed: Optional[int] = None
    jobs: int = 1

    def overrides(self, breakdown=False) -> dict:
        """Nested parameter dict of the flags that override the config"""
        overrides = {}
        if self.harmonics is not None:
            overrides.setdefault("hb", {})["harmonics"] = self.harmonics
        if self.stub_mode is not None:
            overrides.setdefault("media", {})["stub mode"] = self.stub_mode
        if breakdown:
            overrides.setdefault("devices", {})["breakdown"] = True
        if self.seed is not None:
            overrides.setdefault("optimize", {})["seed"] = self.seed
        return overrides


## Argument helpers


def _number(text):
    try:
        return parse_value(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error))


def _number_list(text):
    values = [_number(token) for token in text.split(",") if token.strip()]
    if not values:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
    return values


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer `{text}`")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def linear_grid(start, stop, step):
    """start, start+step, ... up to and including stop"""
    if step is None or not step > 0:
        raise UsageError("--step must be > 0")
    if stop < start:
        raise UsageError("--to must not be smaller than --from")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [float(start + i * step) for i in range(count)]


def default_jobs():
    env = os.environ.get("RECTIFORGE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"RECTIFORGE_JOBS must be an integer, got `{env}`")
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--harmonics", type=int, help="number of harmonics K (>= 3)")
    common.add_argument("--stub-mode", choices=["bessel", "cap"], help="radial stub model")
    common.add_argument("--breakdown", action="store_true", help="enable diode reverse breakdown")
    common.add_argument("--config", help="user YAML file overriding the default parameters")
    common.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )
    common.add_argument(
        "--jobs", type=_positive_int, help="worker threads (default: $RECTIFORGE_JOBS or CPU count)"
    )

    parser = _ArgumentParser(prog="rectiforge", description="Nonlinear RF rectifier simulator")
    subparsers = parser.add_subparsers(dest="subcommand", parser_class=_ArgumentParser)
    subparsers.required = True

    def subcommand(name, help_text):
        sub = subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
        sub.add_argument("netlist", nargs=None if name != "fbw" else "?", help="netlist path or shipped name")
        return sub

    sim = subcommand("sim", "One harmonic-balance operating point (prints a sweep record)")
    sim.add_argument("--f0", type=_number, required=True, help="fundamental frequency (Hz)")
    sim.add_argument("--pin", type=float, required=True, help="available input power (dBm)")
    sim.add_argument("--port", type=int, default=1, help="driven port")
    sim.add_argument("--output", help="CSV file for the Newton diagnostics")

    sweep = subcommand("sweep", "Sweep of one axis (freq, pin or r_load) to CSV")
    sweep.add_argument("--axis", required=True, choices=["freq", "pin", "r_load"], help="swept quantity")
    sweep.add_argument("--from", dest="start", type=_number, required=True)
    sweep.add_argument("--to", dest="stop", type=_number, required=True)
    sweep.add_argument("--step", type=_number, required=True)
    sweep.add_argument("--f0", type=_number, help="fixed frequency (Hz)")
    sweep.add_argument("--pin", type=float, help="fixed input power (dBm)")
    sweep.add_argument("--r-load", type=_number, help="fixed load (ohm), default the .output load")
    sweep.add_argument("--outer-axis", choices=["freq", "pin", "r_load"])
    sweep.add_argument("--outer-values", type=_number_list, help="comma-separated outer grid")
    sweep.add_argument("--output", help="CSV file (stdout when omitted)")

    sparams = subcommand("sparams", "Small-signal S-parameters to CSV or Touchstone")
    sparams.add_argument("--f", type=_number_list, required=True, help="comma-separated frequencies")
    sparams.add_argument("--ports", type=int, help="expected port count; 3 adds the duplexer report")
    sparams.add_argument(
        "--pin", type=float, help="bias the diodes at this available input power (dBm)"
    )
    sparams.add_argument(
        "--f0", type=_number, help="frequency of the biasing operating point, default the first --f"
    )
    sparams.add_argument("--output", help="`.sNp` for Touchstone, anything else CSV")

    fbw = subcommand("fbw", "Fractional bandwidth from a curve file or a live sweep")
    fbw.add_argument("--curve", help="CSV with freq_hz and s11_db columns")
    fbw.add_argument("--from", dest="start", type=_number)
    fbw.add_argument("--to", dest="stop", type=_number)
    fbw.add_argument("--step", type=_number)
    fbw.add_argument("--pin", type=float, help="input power (dBm) of a large-signal sweep")
    fbw.add_argument("--threshold", type=float, help="reflection threshold (dB)")
    fbw.add_argument("--center", type=_number, help="frequency the band must contain (Hz)")
    fbw.add_argument("--mode", choices=["midpoint", "dip"], help="center definition")

    optimize = subcommand("optimize", "Tune the netlist to an optimisation spec")
    optimize.add_argument("--spec", required=True, help="optimisation spec (YAML)")
    optimize.add_argument("--seed", type=int, help="simplex jitter seed (overrides the spec)")
    optimize.add_argument("--output", help="tuned netlist path (stdout when omitted)")
    optimize.add_argument("--report", help="CSV file for the evaluation history")

    oracle = subcommand("oracle", "Transient simulation to periodic steady state")
    oracle.add_argument("--f0", type=_number, required=True, help="source frequency (Hz)")
    oracle.add_argument("--pin", type=float, required=True, help="available input power (dBm)")
    oracle.add_argument("--port", type=int, default=1, help="driven port")
    oracle.add_argument("--output", help="CSV file for the recorded waveforms")
    return parser


def run_config(args) -> RunConfig:
    freqs, pins, loads = [], [], []
    if args.subcommand in ("sim", "oracle"):
        freqs, pins = [args.f0], [args.pin]
    elif args.subcommand == "sparams":
        freqs = list(args.f)
        if any(np.diff(freqs) <= 0):
            raise UsageError("--f must list increasing frequencies")
    elif args.subcommand in ("sweep", "fbw") and args.start is not None:
        grid = linear_grid(args.start, args.stop, args.step)
        axis = getattr(args, "axis", "freq")
        {"freq": freqs, "pin": pins, "r_load": loads}[axis].extend(grid)
    return RunConfig(
        subcommand=args.subcommand,
        netlist=args.netlist,
        freqs=freqs,
        pins=pins,
        loads=loads,
        harmonics=args.harmonics,
        stub_mode=args.stub_mode,
        output=getattr(args, "output", None),
        seed=getattr(args, "seed", None),
        jobs=args.jobs if args.jobs is not None else default_jobs(),
    )


## Output helpers


def _write_table(dataframe: pd.DataFrame, out):
    out.write(export.format_frame(dataframe).to_csv(index=False, lineterminator="\n"))


def _record_row(model: RectiForge) -> pd.DataFrame:
    return records_to_frame([SweepRecord(**model.summary())])


def _setup_logging(level):
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT)
    logger.setLevel(level)


## Subcommands


def run_sim(model, args, config, out):
    try:
        model.solve(config.freqs[0], config.pins[0], port=args.port)
    finally:
        if config.output and model.solution is not None:
            export.save_hb_diagnostics(model.solution, config.output)
    _write_table(_record_row(model), out)


def run_sweep(model, args, config, out):
    fixed = {}
    if args.f0 is not None:
        fixed["freq"] = args.f0
    if args.pin is not None:
        fixed["pin"] = args.pin
    if args.r_load is not None:
        fixed["r_load"] = args.r_load
    grid = {"freq": config.freqs, "pin": config.pins, "r_load": config.loads}[args.axis]
    if args.outer_axis is not None and not args.outer_values:
        raise UsageError("--outer-axis needs --outer-values")
    records = model.sweep(
        args.axis, grid, fixed, outer_axis=args.outer_axis, outer_grid=args.outer_values, jobs=config.jobs
    )
    if config.output:
        export.save_sweep(records, config.output, model.params)
    else:
        _write_table(records_to_frame(records), out)
    if not any(record.converged for record in records):
        raise SolverException("No sweep point converged")


def run_sparams(model, args, config, out):
    if args.ports is not None and args.ports != len(model.circuit.ports):
        raise UsageError(
            f"--ports {args.ports} given, the netlist declares {len(model.circuit.ports)} port(s)"
        )
    matrices = model.s_parameters(config.freqs, jobs=config.jobs, pin=args.pin, f0=args.f0)
    if config.output:
        n = len(model.circuit.ports)
        if config.output.lower().endswith(f".s{n}p"):
            export.save_touchstone(matrices, config.output)
        else:
            export.save_sparameters_csv(matrices, config.output)
    if len(model.circuit.ports) == 3 and len(config.freqs) == 2:
        report = model.duplexer_report(*sorted(config.freqs))
        _write_table(report.table, out)
        out.write(f"selective,{str(report.selective).lower()}\n")
    elif not config.output:
        _write_table(export.sparameters_frame(matrices), out)


def run_fbw(model, args, config, out):
    settings = model.params["analysis"] if model is not None else load_params()["analysis"]
    threshold = args.threshold if args.threshold is not None else settings["fbw threshold"]
    mode = args.mode or settings["fbw center"]
    if args.curve:
        curve = pd.read_csv(args.curve)
        if not {"freq_hz", "s11_db"} <= set(curve.columns):
            raise UsageError("The curve file needs freq_hz and s11_db columns")
    elif model is None or not config.freqs:
        raise UsageError("fbw needs --curve, or a netlist with --from/--to/--step")
    elif model.circuit.has_diodes:
        if args.pin is None:
            raise UsageError("A large-signal fbw sweep needs --pin")
        curve = reflection_curve(model.sweep("freq", config.freqs, {"pin": args.pin}, jobs=config.jobs))
    else:
        matrices = model.s_parameters(config.freqs, jobs=config.jobs)
        curve = [(m.freq, m.db(1, 1)) for m in matrices]
    f_lo, f_hi = band_edges(curve, threshold, args.center)
    percent = fractional_bandwidth(curve, threshold, args.center, mode)
    _write_table(pd.DataFrame([{"f_lo_hz": f_lo, "f_hi_hz": f_hi, "fbw_pct": percent}]), out)


def run_optimize(model, args, config, out):
    spec = load_opt_spec(args.spec, model.params)
    if config.seed is not None:
        spec = dataclasses.replace(spec, seed=config.seed)
    report = model.optimize(spec)
    if args.report:
        export.save_optimization_report(report, args.report, model.params)
    _write_table(report.metrics, out)
    out.write(f"cost,{format_number(report.cost_before)},{format_number(report.cost_after)}\n")
    text = render(model.circuit)
    if config.output:
        with open(config.output, "w", encoding="utf8") as fh:
            fh.write(text)
    else:
        out.write(text)


def run_oracle(model, args, config, out):
    result = model.simulate(config.freqs[0], config.pins[0], port=args.port)
    if config.output:
        export.save_waveforms(result.time, result.waveforms, config.output)
    row = {
        "freq_hz": result.f0,
        "pin_dbm": config.pins[0],
        "vdc_v": np.nan if result.v_odc is None else result.v_odc,
        "periods": result.periods,
        "settled": result.settled,
        "energy_balance_error": result.ledger.balance_error,
    }
    _write_table(pd.DataFrame([row]), out)
    if not result.settled:
        raise SolverException("Transient simulation did not settle")


SUBCOMMANDS = {
    "sim": run_sim,
    "sweep": run_sweep,
    "sparams": run_sparams,
    "fbw": run_fbw,
    "optimize": run_optimize,
    "oracle": run_oracle,
}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _setup_logging(args.log_level)
        config = run_config(args)
        model = None
        if config.netlist is not None:
            params = load_params(args.config)
            model = RectiForge(
                load_netlist(config.netlist),
                params=params,
                overrides=config.overrides(args.breakdown),
            )
        SUBCOMMANDS[config.subcommand](model, args, config, out)
    except SystemExit as exit_request:
        # --help
        return EXIT_OK if not exit_request.code else EXIT_USAGE
    except (SolverException, ConvergenceError, NoBandError) as error:
        sys.stderr.write(f"rectiforge: {error}\n")
        return EXIT_NOT_CONVERGED
    except OSError as error:
        sys.stderr.write(f"rectiforge: {error}\n")
        return EXIT_IO
    except (
        UsageError,
        NetlistError,
        OptSpecError,
        UnsupportedElementError,
        yaml.YAMLError,
        RuntimeWarning,
        KeyError,
        ValueError,
    ) as error:
        sys.stderr.write(f"rectiforge: {error}\n")
        return EXIT_USAGE
    return EXIT_OK
