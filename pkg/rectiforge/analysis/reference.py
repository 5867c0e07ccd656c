"""
Published measurements of the dual-band rectifier, used as reference
values in reports and tests.
"""

import pandas as pd

from rectiforge.common import quant
from rectiforge.common.utils import load_yaml


def _load():
    return load_yaml("measurements.yaml", folder="reference")


def reference_measurements() -> pd.DataFrame:
    """One row per measured point: band, freq_hz, pin_dbm, rl_ohm, pce_pct, vdc_v"""
    data = _load()
    r_load = quant(data["load"], "resistance_unit")
    rows = []
    for band, info in data["bands"].items():
        freq = quant(info["freq"], "frequency_unit")
        for point in info["points"]:
            rows.append(
                {
                    "band": band,
                    "freq_hz": freq,
                    "pin_dbm": float(point["pin"]),
                    "rl_ohm": r_load,
                    "pce_pct": float(point["pce"]),
                    "vdc_v": float(point["vdc"]),
                }
            )
    return pd.DataFrame(rows)


def reference_fbw() -> dict:
    """Measured fractional bandwidth (%) per band"""
    return {
        band: float(info["fractional bandwidth"]) for band, info in _load()["bands"].items()
    }
