"""
Functions to save output to CSV, Touchstone and JSON files
"""

from .save import (
    format_frame,
    save_csv,
    save_params,
    save_sweep,
    sparameters_frame,
    save_sparameters_csv,
    save_touchstone,
    save_optimization_report,
    save_waveforms,
    save_hb_diagnostics,
)
