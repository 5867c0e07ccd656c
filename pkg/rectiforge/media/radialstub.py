"""
Open-circuited radial (butterfly sector) stub, shunt to ground.

The stub is treated as a lossless radial line; its input impedance at the
inner radius follows from the Bessel-function solution of the radial wave.
"""

import numpy as np
import scipy.special as sp
from scipy.constants import c, epsilon_0, mu_0, pi

from .microstrip import effective_permittivity
from .substrate import SubstrateSpec

ETA0 = np.sqrt(mu_0 / epsilon_0)

STUB_MODES = ("bessel", "cap")


def _check_geometry(ri, ro, angle):
    if not ri >= 0:
        raise ValueError(f"Inner radius must be >= 0, got {ri}")
    if not ro > ri:
        raise ValueError(f"Outer radius {ro} must exceed inner radius {ri}")
    if not 0 < angle <= pi:
        raise ValueError(f"Stub angle must lie in (0, pi], got {angle}")


def stub_permittivity(sub: SubstrateSpec, ri: float, ro: float, angle: float):
    """Effective permittivity of a microstrip as wide as the mean arc of the stub"""
    return effective_permittivity(sub, angle * (ri + ro) / 2.0)


def radial_stub_capacitance(
    sub: SubstrateSpec, ri: float, ro: float, angle: float
) -> float:
    """Parallel-plate capacitance of the sector (the low-frequency limit)."""
    _check_geometry(ri, ro, angle)
    eps_eff = stub_permittivity(sub, ri, ro, angle)
    return epsilon_0 * eps_eff * angle * (ro**2 - ri**2) / (2.0 * sub.height)


def feed_radius(ri: float, angle: float, min_feed_width: float) -> float:
    """Radius the stub is fed at: ri, or where the arc is `min_feed_width` wide"""
    return max(ri, min_feed_width / angle)


def radial_stub_admittance(
    sub: SubstrateSpec,
    ri: float,
    ro: float,
    angle: float,
    freq: float,
    mode: str = "bessel",
    min_feed_width: float = 1e-4,
) -> complex:
    """Input admittance of the stub at its inner radius.

    A stub declared with ri = 0 is evaluated at the radius whose arc equals
    `min_feed_width`, in both modes.
    """
    _check_geometry(ri, ro, angle)
    if mode not in STUB_MODES:
        raise ValueError(f"Unknown stub mode `{mode}`, expected one of {STUB_MODES}")

    ri_eff = feed_radius(ri, angle, min_feed_width)
    if ri_eff >= ro:
        raise ValueError(
            f"Outer radius {ro} must exceed the effective feed radius {ri_eff}"
        )
    omega = 2.0 * pi * freq
    if mode == "cap":
        return complex(0.0, omega * radial_stub_capacitance(sub, ri_eff, ro, angle))

    eps_eff = stub_permittivity(sub, ri_eff, ro, angle)
    k = omega * np.sqrt(eps_eff) / c
    eta = ETA0 / np.sqrt(eps_eff)
    a = k * ri_eff
    b = k * ro

    num = sp.j0(a) * sp.y1(b) - sp.j1(b) * sp.y0(a)
    den = sp.j1(a) * sp.y1(b) - sp.j1(b) * sp.y1(a)
    # Zin = j * x_in
    x_in = eta * sub.height / (angle * ri_eff) * num / den
    return complex(0.0, -1.0 / x_in)
