"""
Frequency, power and load sweeps of harmonic-balance operating points.

The grid is cut into chunks of a fixed size. Inside a chunk every point is
warm-started from the previous converged point; chunks are independent and
may run on a thread pool. Records always come back in grid order, and the
chunking does not depend on the number of workers, so results do not
depend on `jobs` either.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np
import pandas as pd

from rectiforge.common import logger
from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.hb import ConvergenceError, solve_hb
from rectiforge.linear import SingularSystemError
from rectiforge.netlist import Circuit

from .metrics import large_signal_s11, pce, to_db

AXES = ("freq", "pin", "r_load")

CSV_COLUMNS = {
    "freq": "freq_hz",
    "pin": "pin_dbm",
    "r_load": "rl_ohm",
    "s11_db": "s11_db",
    "v_odc": "vdc_v",
    "pce": "pce_pct",
    "iterations": "iterations",
    "converged": "converged",
}


@dataclass
class SweepRecord:
    freq: float
    pin: float
    r_load: float
    s11_db: float
    v_odc: float
    pce: float
    iterations: int
    converged: bool
    error: str = ""


def _point_circuit(circuit: Circuit, r_load: float) -> Circuit:
    load = circuit.load
    if load is None or r_load == load.value:
        return circuit
    return circuit.with_value(load.name, "value", r_load)


def solve_point(circuit, freq, pin, r_load, params, harmonics=None, initial=None):
    """One operating point. Returns (record, solution or None)."""
    nan = float("nan")
    try:
        point = _point_circuit(circuit, r_load)
        sol = solve_hb(point, freq, pin, harmonics=harmonics, params=params, initial=initial)
    except (ValueError, ConvergenceError, SingularSystemError) as error:
        logger.warning(f"Sweep point f={freq:.6g} Hz, pin={pin:.4g} dBm failed: {error}")
        return SweepRecord(freq, pin, r_load, nan, nan, nan, 0, False, str(error)), None

    s11_db = to_db(large_signal_s11(sol)) if sol.converged else nan
    v_odc = sol.v_odc if sol.v_odc is not None else nan
    efficiency = pce(v_odc, r_load, pin) if math.isfinite(v_odc) else nan
    record = SweepRecord(
        freq=freq,
        pin=pin,
        r_load=r_load,
        s11_db=s11_db,
        v_odc=v_odc,
        pce=efficiency,
        iterations=sol.iterations,
        converged=sol.converged,
        error="" if sol.converged else f"residual {sol.residual:.3g} A",
    )
    return record, sol


def _points(axis, grid, fixed):
    points = []
    for value in grid:
        point = dict(fixed)
        point[axis] = float(value)
        points.append(point)
    return points


def _solve_chunk(circuit, chunk, params, harmonics):
    records, previous = [], None
    for point in chunk:
        record, sol = solve_point(
            circuit,
            point["freq"],
            point["pin"],
            point["r_load"],
            params,
            harmonics=harmonics,
            initial=previous,
        )
        records.append(record)
        if sol is not None and sol.converged:
            previous = sol
    return records


def sweep(
    circuit: Circuit,
    axis: str,
    grid,
    fixed: dict,
    params=None,
    jobs: int = 1,
    harmonics: Optional[int] = None,
) -> list:
    """HB solution at every grid value of `axis`, the other quantities
    taken from `fixed` (keys freq, pin, r_load; r_load defaults to the value
    of the `.output` load)."""
    if axis not in AXES:
        raise ValueError(f"Unknown sweep axis `{axis}`, use one of {AXES}")
    params = params_for_circuit(circuit, params)
    fixed = dict(fixed)
    if "r_load" not in fixed:
        if circuit.load is None and axis != "r_load":
            fixed["r_load"] = float("nan")
        elif circuit.load is not None:
            fixed["r_load"] = circuit.load.value
    if axis == "r_load" and circuit.load is None:
        raise ValueError("A load sweep needs an `.output <node> <resistor>` directive")
    missing = [key for key in AXES if key != axis and key not in fixed]
    if missing:
        raise ValueError(f"Missing fixed sweep value(s): {', '.join(missing)}")

    points = _points(axis, grid, fixed)
    size = params["analysis"]["sweep chunk size"]
    chunks = [points[i : i + size] for i in range(0, len(points), size)]

    def run(chunk):
        return _solve_chunk(circuit, chunk, params, harmonics)

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(run, chunks))
    else:
        results = [run(chunk) for chunk in chunks]
    return [record for chunk_records in results for record in chunk_records]


def sweep_grid(
    circuit: Circuit,
    axis: str,
    grid,
    outer_axis: str,
    outer_grid,
    fixed: dict,
    params=None,
    jobs: int = 1,
    harmonics: Optional[int] = None,
) -> list:
    """Sweeps `axis` once per value of `outer_axis` (e.g. PCE against load at
    several input powers). Records are ordered outer value first."""
    if outer_axis == axis:
        raise ValueError("The inner and outer sweep axes must differ")
    if outer_axis not in AXES:
        raise ValueError(f"Unknown sweep axis `{outer_axis}`, use one of {AXES}")
    records = []
    for value in outer_grid:
        inner_fixed = dict(fixed)
        inner_fixed[outer_axis] = float(value)
        records += sweep(
            circuit, axis, grid, inner_fixed, params=params, jobs=jobs, harmonics=harmonics
        )
    return records


def records_to_frame(records) -> pd.DataFrame:
    rows = [asdict(record) for record in records]
    frame = pd.DataFrame(rows, columns=list(SweepRecord.__dataclass_fields__))
    frame = frame[list(CSV_COLUMNS)].rename(columns=CSV_COLUMNS)
    frame["iterations"] = frame["iterations"].astype(int)
    frame["converged"] = frame["converged"].astype(bool)
    return frame


def reflection_curve(records) -> list:
    """(freq, s11_db) pairs of the converged records, sorted by frequency"""
    pairs = [(r.freq, r.s11_db) for r in records if r.converged and np.isfinite(r.s11_db)]
    return sorted(pairs)
