"""
Quasi-static microstrip model (Hammerstad–Jensen closed forms, no dispersion).

Width corrections for a finite metal thickness follow the same closed forms;
conductor loss uses the surface resistance of the strip, dielectric loss the
filling factor of the line.
"""

import numpy as np
from scipy.constants import c, epsilon_0, mu_0, pi

from .substrate import LineParams, SubstrateSpec

ZF0 = np.sqrt(mu_0 / epsilon_0)


def _a(u):
    return (
        1.0
        + 1.0 / 49.0 * np.log((u**4 + (u / 52.0) ** 2) / (u**4 + 0.432))
        + 1.0 / 18.7 * np.log(1.0 + (u / 18.1) ** 3)
    )


def _b(eps_r):
    return 0.564 * ((eps_r - 0.9) / (eps_r + 3.0)) ** 0.053


def _f(u):
    return 6.0 + (2.0 * pi - 6.0) * np.exp(-((30.666 / u) ** 0.7528))


def _zl1(width, height):
    """Impedance of the air-filled line"""
    u = width / height
    return ZF0 / (2.0 * pi) * np.log(_f(u) / u + np.sqrt(1.0 + (2.0 / u) ** 2))


def _ep_re(width, height, eps_r):
    u = width / height
    return (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 * (1.0 + 10.0 / u) ** (
        -_a(u) * _b(eps_r)
    )


def corrected_widths(sub: SubstrateSpec, width: float):
    """Returns (w1, wr): strip width corrected for metal thickness in air and
    in the dielectric. Both equal `width` when the metal thickness is zero."""
    if sub.metal_thickness <= 0:
        return width, width
    t_norm = sub.metal_thickness / sub.height
    delta_w1 = (
        sub.height
        * t_norm
        / pi
        * np.log(
            1.0 + 4.0 * np.e * np.tanh(np.sqrt(6.517 * width / sub.height)) ** 2 / t_norm
        )
    )
    delta_wr = delta_w1 / 2.0 * (1.0 + 1.0 / np.cosh(np.sqrt(sub.eps_r - 1.0)))
    return width + delta_w1, width + delta_wr


def effective_permittivity(sub: SubstrateSpec, width: float) -> float:
    w1, wr = corrected_widths(sub, width)
    eps_eff = _ep_re(wr, sub.height, sub.eps_r)
    if w1 != wr:
        eps_eff *= (_zl1(w1, sub.height) / _zl1(wr, sub.height)) ** 2
    return float(eps_eff)


def characteristic_impedance(sub: SubstrateSpec, width: float) -> float:
    _, wr = corrected_widths(sub, width)
    return float(_zl1(wr, sub.height) / np.sqrt(effective_permittivity(sub, width)))


def surface_resistance(freq: float, conductivity: float) -> float:
    if np.isinf(conductivity):
        return 0.0
    return float(np.sqrt(pi * freq * mu_0 / conductivity))


def microstrip_params(sub: SubstrateSpec, width: float, freq: float) -> LineParams:
    """Line parameters of a strip of `width` (m) on `sub` at `freq` (Hz)."""
    if not width > 0:
        raise ValueError(f"Strip width must be > 0, got {width}")
    eps_eff = effective_permittivity(sub, width)
    z0 = characteristic_impedance(sub, width)

    alpha_c = surface_resistance(freq, sub.conductivity) / (z0 * width)

    if sub.eps_r == 1:
        filling = 1.0
    else:
        filling = (eps_eff - 1.0) / (sub.eps_r - 1.0)
    alpha_d = (
        pi * freq / c * sub.eps_r / np.sqrt(eps_eff) * filling * sub.tan_delta
    )
    beta = 2.0 * pi * freq * np.sqrt(eps_eff) / c
    return LineParams(
        z0=z0,
        eps_eff=eps_eff,
        alpha_c=float(alpha_c),
        alpha_d=float(alpha_d),
        beta=float(beta),
    )


def mlin_abcd(params: LineParams, length: float) -> np.ndarray:
    gl = params.gamma * length
    return np.array(
        [
            [np.cosh(gl), params.z0 * np.sinh(gl)],
            [np.sinh(gl) / params.z0, np.cosh(gl)],
        ],
        dtype=complex,
    )


def mlin_two_port(params: LineParams, length: float) -> np.ndarray:
    """Y-matrix of a line section: Y11 = coth(γl)/Z0, Y12 = -csch(γl)/Z0."""
    gl = params.gamma * length
    sinh = np.sinh(gl)
    y11 = np.cosh(gl) / (params.z0 * sinh)
    y12 = -1.0 / (params.z0 * sinh)
    return np.array([[y11, y12], [y12, y11]], dtype=complex)


def abcd_to_s(abcd: np.ndarray, z0: float = 50.0) -> np.ndarray:
    a, b = abcd[0]
    c_, d = abcd[1]
    denom = a + b / z0 + c_ * z0 + d
    return np.array(
        [
            [(a + b / z0 - c_ * z0 - d) / denom, 2.0 * (a * d - b * c_) / denom],
            [2.0 / denom, (-a + b / z0 - c_ * z0 + d) / denom],
        ],
        dtype=complex,
    )
