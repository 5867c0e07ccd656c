"""
Operating band of a reflection curve.
"""

from typing import Optional

import numpy as np
import pandas as pd

CENTER_MODES = ("midpoint", "dip")


class NoBandError(ValueError):
    """The curve has no sub-threshold interval at the requested center"""


def _curve_arrays(curve):
    if isinstance(curve, pd.DataFrame):
        freqs, values = curve["freq_hz"].to_numpy(), curve["s11_db"].to_numpy()
    else:
        pairs = np.asarray(list(curve), dtype=float)
        if pairs.size == 0:
            raise NoBandError("Empty reflection curve")
        freqs, values = pairs[:, 0], pairs[:, 1]
    freqs, values = np.asarray(freqs, dtype=float), np.asarray(values, dtype=float)
    keep = np.isfinite(values)
    freqs, values = freqs[keep], values[keep]
    if len(freqs) == 0:
        raise NoBandError("Reflection curve has no finite points")
    if np.any(np.diff(freqs) <= 0):
        raise ValueError("Reflection curve must be sorted by strictly increasing frequency")
    return freqs, values


def _crossing(f1, v1, f2, v2, threshold):
    return f1 + (threshold - v1) * (f2 - f1) / (v2 - v1)


def _runs(below):
    """Index ranges (lo, hi) of consecutive True entries"""
    runs, lo = [], None
    for i, flag in enumerate(below):
        if flag and lo is None:
            lo = i
        if not flag and lo is not None:
            runs.append((lo, i - 1))
            lo = None
    if lo is not None:
        runs.append((lo, len(below) - 1))
    return runs


def band_edges(curve, threshold: float = -10.0, center: Optional[float] = None):
    """(f_lo, f_hi) of the contiguous interval where the curve is below
    `threshold` and which contains `center` (the deepest point when None).
    Edges are interpolated linearly; an interval open at the end of the
    curve stops at the last sample."""
    freqs, values = _curve_arrays(curve)
    last = len(freqs) - 1
    bands = []
    for lo, hi in _runs(values < threshold):
        f_lo = freqs[lo] if lo == 0 else _crossing(
            freqs[lo - 1], values[lo - 1], freqs[lo], values[lo], threshold
        )
        f_hi = freqs[hi] if hi == last else _crossing(
            freqs[hi], values[hi], freqs[hi + 1], values[hi + 1], threshold
        )
        bands.append((lo, hi, float(f_lo), float(f_hi)))
    if not bands:
        raise NoBandError(f"Curve never drops below {threshold} dB")

    if center is None:
        deepest = int(np.argmin(values))
        lo, hi, f_lo, f_hi = next(b for b in bands if b[0] <= deepest <= b[1])
        return f_lo, f_hi
    for lo, hi, f_lo, f_hi in bands:
        if f_lo <= center <= f_hi:
            return f_lo, f_hi
    raise NoBandError(f"Curve is not below {threshold} dB at {center:.6g} Hz")


def fractional_bandwidth(curve, threshold: float = -10.0, center: Optional[float] = None, mode: str = "midpoint") -> float:
    """Bandwidth (%) of the sub-threshold interval around `center`,
    relative to its midpoint or (mode "dip") to the deepest point."""
    if mode not in CENTER_MODES:
        raise ValueError(f"Unknown bandwidth center mode `{mode}`, use one of {CENTER_MODES}")
    f_lo, f_hi = band_edges(curve, threshold, center)
    if mode == "midpoint":
        f_center = (f_lo + f_hi) / 2
    else:
        freqs, values = _curve_arrays(curve)
        inside = (freqs >= f_lo) & (freqs <= f_hi)
        f_center = float(freqs[inside][np.argmin(values[inside])])
    return 100.0 * (f_hi - f_lo) / f_center
