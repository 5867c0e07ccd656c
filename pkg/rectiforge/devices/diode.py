"""
Schottky diode junction model (SPICE level-1 subset).

The junction current is an exponential whose argument is clamped: above
MAX_EXP_ARG the exponential continues along its tangent, which keeps the
current and its derivative continuous and finite for any Newton iterate.
Depletion charge and capacitance follow the SPICE form, with the linear
extension above fc·vj. The series resistance rs is not part of these
equations; circuit assemblers stamp it as a linear resistor in series with
the junction.

All functions accept scalars or numpy arrays of junction voltages.
"""

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.constants import e, k

MAX_EXP_ARG = 40.0


@dataclass(frozen=True)
class DiodeModel:
    """Junction parameters in SI units (temperature in kelvin)."""

    isat: float
    n: float = 1.0
    rs: float = 0.0
    cj0: float = 0.0
    vj: float = 1.0
    m: float = 0.5
    bv: Optional[float] = None
    fc: float = 0.5
    temp: float = 293.15
    ibv: float = 1e-4
    name: str = "D"

    def __post_init__(self):
        checks = [
            (self.isat > 0, "is must be > 0"),
            (self.n >= 1, "n must be >= 1"),
            (self.rs >= 0, "rs must be >= 0"),
            (self.cj0 >= 0, "cj0 must be >= 0"),
            (self.vj > 0, "vj must be > 0"),
            (0 < self.m < 1, "m must lie in (0, 1)"),
            (self.bv is None or self.bv > 0, "bv must be > 0"),
            (0 < self.fc < 1, "fc must lie in (0, 1)"),
            (self.temp > 0, "temp must be > 0"),
            (self.ibv > 0, "ibv must be > 0"),
        ]
        for passed, message in checks:
            if not passed:
                raise ValueError(f"Diode model {self.name}: {message}")

    @property
    def nvt(self) -> float:
        return self.n * thermal_voltage(self.temp)

    def without_breakdown(self) -> "DiodeModel":
        return dataclasses.replace(self, bv=None)


def thermal_voltage(temp: float) -> float:
    return k * temp / e


def limexp(x):
    """exp(x), continued linearly above MAX_EXP_ARG"""
    x = np.asarray(x, dtype=float)
    clipped = np.minimum(x, MAX_EXP_ARG)
    return np.where(
        x > MAX_EXP_ARG,
        np.exp(MAX_EXP_ARG) * (1.0 + x - MAX_EXP_ARG),
        np.exp(clipped),
    )


def dlimexp(x):
    x = np.asarray(x, dtype=float)
    return np.exp(np.minimum(x, MAX_EXP_ARG))


def i_of_v(model: DiodeModel, v):
    """Junction current (A) from anode to cathode."""
    nvt = model.nvt
    current = model.isat * (limexp(v / nvt) - 1.0)
    if model.bv is not None:
        # Zero at v = 0, -ibv at v = -bv
        knee = (-np.asarray(v) - model.bv) / nvt
        current = current - model.ibv * (limexp(knee) - np.exp(-model.bv / nvt))
    return current


def g_of_v(model: DiodeModel, v):
    """dI/dV of the junction (S)."""
    nvt = model.nvt
    conductance = model.isat / nvt * dlimexp(v / nvt)
    if model.bv is not None:
        knee = (-np.asarray(v) - model.bv) / nvt
        conductance = conductance + model.ibv / nvt * dlimexp(knee)
    return conductance


def q_of_v(model: DiodeModel, v):
    """Depletion charge (C)."""
    v = np.asarray(v, dtype=float)
    if model.cj0 == 0:
        return np.zeros_like(v)
    cj0, vj, m, fc = model.cj0, model.vj, model.m, model.fc
    v_fc = fc * vj
    v_low = np.minimum(v, v_fc)
    q_low = cj0 * vj / (1.0 - m) * (1.0 - (1.0 - v_low / vj) ** (1.0 - m))

    f1 = vj / (1.0 - m) * (1.0 - (1.0 - fc) ** (1.0 - m))
    f2 = (1.0 - fc) ** (1.0 + m)
    f3 = 1.0 - fc * (1.0 + m)
    q_high = cj0 * (
        f1 + (f3 * (v - v_fc) + m / (2.0 * vj) * (v**2 - v_fc**2)) / f2
    )
    return np.where(v < v_fc, q_low, q_high)


def c_of_v(model: DiodeModel, v):
    """Depletion capacitance dQ/dV (F)."""
    v = np.asarray(v, dtype=float)
    if model.cj0 == 0:
        return np.zeros_like(v)
    cj0, vj, m, fc = model.cj0, model.vj, model.m, model.fc
    v_fc = fc * vj
    v_low = np.minimum(v, v_fc)
    c_low = cj0 * (1.0 - v_low / vj) ** (-m)
    c_high = cj0 / (1.0 - fc) ** (1.0 + m) * (1.0 - fc * (1.0 + m) + m * v / vj)
    return np.where(v < v_fc, c_low, c_high)
