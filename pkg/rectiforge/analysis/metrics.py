"""
Figures of merit of a rectifier operating point.
"""

import math

import numpy as np


def dbm_to_watts(p_dbm):
    return 1e-3 * 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def watts_to_dbm(p_watts):
    return 10.0 * np.log10(np.asarray(p_watts, dtype=float) / 1e-3)


def pce(v_odc, r_load, pin):
    """RF-to-DC power conversion efficiency (%): V^2 / (P_in R_L) * 100"""
    if not r_load > 0:
        raise ValueError(f"Load resistance must be > 0, got {r_load}")
    return float(v_odc) ** 2 / (float(dbm_to_watts(pin)) * r_load) * 100.0


def wave_amplitudes(voltage: complex, current: complex, z0: float):
    """Incident and reflected power waves (a, b) from port voltage and the
    current flowing into the port"""
    root = math.sqrt(z0)
    a = (voltage + z0 * current) / (2 * root)
    b = (voltage - z0 * current) / (2 * root)
    return a, b


def large_signal_s11(sol, port=None) -> complex:
    """Reflection coefficient b/a at f0 of a harmonic-balance solution.

    `port` is a port index or PortSpec; the driven port by default.
    """
    if not sol.converged:
        raise ValueError("Reflection coefficient of an unconverged solution")
    index = sol.port if port is None else getattr(port, "index", port)
    z0 = getattr(port, "z0", None) or sol.port_z0[index]
    a, b = wave_amplitudes(
        sol.port_voltages[index].fundamental, sol.port_currents[index].fundamental, z0
    )
    return complex(b / a)


def to_db(reflection: complex) -> float:
    return float(20 * np.log10(max(abs(reflection), 1e-300)))
