"""
Writes sweeps, S-parameters, optimisation reports and waveforms to disk.

Every CSV file uses the shared number format and has no index column.
Sweeps and optimisation reports get a `<file>.params.json` sidecar with the
parameters that produced them.
"""

import json
import os

import numpy as np
import pandas as pd
import skrf as rf

from rectiforge.common import logger, format_number
from rectiforge.analysis.sweep import records_to_frame


def _path(filename, folder, extension):
    if not filename.endswith(extension):
        filename += extension
    if folder is not None:
        os.makedirs(folder, exist_ok=True)
        return os.path.join(folder, filename)
    directory = os.path.dirname(filename)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return filename


def format_frame(dataframe: pd.DataFrame) -> pd.DataFrame:
    """Copy with every float column rendered through `format_number`"""
    formatted = dataframe.copy()
    for column in formatted.columns:
        if pd.api.types.is_bool_dtype(formatted[column]):
            formatted[column] = formatted[column].map(lambda v: str(bool(v)).lower())
        elif pd.api.types.is_float_dtype(formatted[column]):
            formatted[column] = formatted[column].map(format_number)
    return formatted


def save_csv(dataframe: pd.DataFrame, filename, folder=None) -> str:
    path = _path(filename, folder, ".csv")
    format_frame(dataframe).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Saved to {path}")
    return path


def save_params(params: dict, path: str) -> str:
    sidecar = f"{path}.params.json"
    with open(sidecar, "w", encoding="utf8") as fh:
        json.dump(params, fh, sort_keys=True, indent=2, default=str)
    return sidecar


def save_sweep(records, filename, params=None, folder=None) -> str:
    path = save_csv(records_to_frame(records), filename, folder)
    if params is not None:
        save_params(params, path)
    return path


def sparameters_frame(matrices) -> pd.DataFrame:
    """freq_hz, then s<i><j>_db and s<i><j>_deg for every entry, row-major"""
    rows = []
    columns = ["freq_hz"]
    if matrices:
        n = matrices[0].n_ports
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                columns += [f"s{i}{j}_db", f"s{i}{j}_deg"]
    for matrix in matrices:
        row = [matrix.freq]
        for i in range(1, matrix.n_ports + 1):
            for j in range(1, matrix.n_ports + 1):
                row += [matrix.db(i, j), matrix.deg(i, j)]
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def save_sparameters_csv(matrices, filename, folder=None) -> str:
    return save_csv(sparameters_frame(matrices), filename, folder)


def save_touchstone(matrices, filename, folder=None) -> str:
    """Touchstone v1 file in RI format; the extension `.sNp` is added by scikit-rf."""
    if not matrices:
        raise ValueError("No S-parameters to write")
    z0 = matrices[0].z0
    frequency = rf.Frequency.from_f([m.freq for m in matrices], unit="hz")
    network = rf.Network(
        frequency=frequency, s=np.array([m.s for m in matrices]), z0=z0, name="rectiforge"
    )
    directory = folder or os.path.dirname(filename) or "."
    name = os.path.basename(filename)
    for extension in (".ts", f".s{network.nports}p"):
        if name.endswith(extension):
            name = name[: -len(extension)]
    os.makedirs(directory, exist_ok=True)
    network.write_touchstone(filename=name, dir=directory, form="ri", skrf_comment=False)
    path = os.path.join(directory, f"{name}.s{network.nports}p")
    logger.info(f"Saved to {path}")
    return path


def save_optimization_report(report, filename, params=None, folder=None) -> str:
    """History as `eval,cost,<param>...`; metrics go to `<file>_metrics.csv`"""
    path = save_csv(report.history, filename, folder)
    stem = path[: -len(".csv")]
    save_csv(report.metrics, f"{stem}_metrics.csv")
    if params is not None:
        save_params(params, path)
    return path


def save_waveforms(time, waveforms: dict, filename, folder=None) -> str:
    """`t_s,v_<node>...` for time-domain traces"""
    columns = {"t_s": np.asarray(time, dtype=float)}
    for node, samples in waveforms.items():
        columns[f"v_{node}"] = np.asarray(samples, dtype=float)
    return save_csv(pd.DataFrame(columns), filename, folder)


def save_hb_diagnostics(solution, filename, folder=None) -> str:
    """One row per Newton iteration of every source-stepping level"""
    return save_csv(solution.diagnostics_frame(), filename, folder)
