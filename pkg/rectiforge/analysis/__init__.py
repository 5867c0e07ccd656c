"""
Figures of merit and sweep drivers.
"""

from .metrics import (
    dbm_to_watts,
    watts_to_dbm,
    pce,
    large_signal_s11,
    wave_amplitudes,
    to_db,
)
from .bandwidth import NoBandError, band_edges, fractional_bandwidth
from .sweep import (
    SweepRecord,
    sweep,
    sweep_grid,
    solve_point,
    records_to_frame,
    reflection_curve,
    CSV_COLUMNS,
)
from .reference import reference_measurements, reference_fbw
