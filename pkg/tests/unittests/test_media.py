import math

import numpy as np
import pytest

from rectiforge.media import (
    SubstrateSpec,
    abcd_to_s,
    characteristic_impedance,
    effective_permittivity,
    microstrip_params,
    mlin_abcd,
    radial_stub_admittance,
    radial_stub_capacitance,
    feed_radius,
)


@pytest.fixture
def rogers():
    return SubstrateSpec(eps_r=3.38, tan_delta=0.0027, height=0.8e-3, metal_thickness=0)


def test_air_line_has_unit_permittivity():
    air = SubstrateSpec(eps_r=1.0, tan_delta=0.0, height=1e-3, metal_thickness=0)
    assert effective_permittivity(air, 2e-3) == pytest.approx(1.0)


def test_microstrip_closed_form(rogers):
    # w/h = 2
    width = 1.6e-3
    assert characteristic_impedance(rogers, width) == pytest.approx(55.0, rel=0.01)
    assert effective_permittivity(rogers, width) == pytest.approx(2.64, rel=0.01)


def test_wider_strip_lowers_impedance(rogers):
    assert characteristic_impedance(rogers, 3e-3) < characteristic_impedance(rogers, 1e-3)


def test_metal_thickness_widens_strip(rogers):
    thick = SubstrateSpec(eps_r=3.38, tan_delta=0.0027, height=0.8e-3)
    assert characteristic_impedance(thick, 1.6e-3) < characteristic_impedance(rogers, 1.6e-3)


def test_line_losses():
    lossless = SubstrateSpec(
        eps_r=3.38, tan_delta=0.0, height=0.8e-3, conductivity=math.inf
    )
    line = microstrip_params(lossless, 1.8e-3, 925e6)
    assert line.is_lossless

    lossy = SubstrateSpec(eps_r=3.38, tan_delta=0.0027, height=0.8e-3)
    line = microstrip_params(lossy, 1.8e-3, 925e6)
    assert line.alpha_c > 0
    assert line.alpha_d > 0
    assert line.beta == pytest.approx(
        2 * math.pi * 925e6 * math.sqrt(line.eps_eff) / 299792458.0
    )


def test_lossless_line_is_unitary():
    lossless = SubstrateSpec(
        eps_r=3.38, tan_delta=0.0, height=0.8e-3, conductivity=math.inf
    )
    line = microstrip_params(lossless, 1.8e-3, 925e6)
    s = abcd_to_s(mlin_abcd(line, 37e-3), z0=50.0)
    assert np.allclose(s.conj().T @ s, np.eye(2), atol=1e-12)


def test_substrate_checks():
    with pytest.raises(ValueError):
        SubstrateSpec(eps_r=0.5, tan_delta=0.0, height=1e-3)
    with pytest.raises(ValueError):
        SubstrateSpec(eps_r=3.38, tan_delta=0.0, height=0.0)
    with pytest.raises(ValueError):
        microstrip_params(SubstrateSpec(eps_r=3.38, tan_delta=0.0, height=1e-3), 0.0, 1e9)


def test_radial_stub_is_capacitive_below_resonance(rogers):
    y = radial_stub_admittance(rogers, 0.0, 6e-3, math.pi / 2, 925e6)
    assert y.real == 0
    assert y.imag > 0


def test_radial_stub_low_frequency_limit(rogers):
    """Far below resonance the sector behaves as its plate capacitance"""
    freq = 100e6
    ri = feed_radius(0.0, math.pi / 2, 1e-4)
    capacitance = radial_stub_capacitance(rogers, ri, 6e-3, math.pi / 2)
    y = radial_stub_admittance(rogers, 0.0, 6e-3, math.pi / 2, freq)
    assert y.imag == pytest.approx(2 * math.pi * freq * capacitance, rel=0.02)

    y_cap = radial_stub_admittance(rogers, 0.0, 6e-3, math.pi / 2, freq, mode="cap")
    assert y_cap.imag == pytest.approx(2 * math.pi * freq * capacitance)


@pytest.mark.parametrize("ri", [0.0, 1e-3])
def test_stub_modes_share_the_feed_radius(rogers, ri):
    freq = 1e6
    kwargs = dict(min_feed_width=0.5e-3)
    y_bessel = radial_stub_admittance(rogers, ri, 6e-3, math.pi / 4, freq, **kwargs)
    y_cap = radial_stub_admittance(rogers, ri, 6e-3, math.pi / 4, freq, mode="cap", **kwargs)
    assert y_bessel.imag == pytest.approx(y_cap.imag, rel=1e-3)


def test_feed_radius(rogers):
    assert feed_radius(0.0, math.pi / 2, 1e-4) == pytest.approx(2e-4 / math.pi)
    assert feed_radius(1e-3, math.pi / 2, 1e-4) == 1e-3
    with pytest.raises(ValueError):
        # the arc of the whole sector is narrower than the feed
        radial_stub_admittance(rogers, 0.0, 1e-3, 0.1, 1e9, mode="cap", min_feed_width=1e-3)


def test_radial_stub_geometry(rogers):
    with pytest.raises(ValueError):
        radial_stub_admittance(rogers, 5e-3, 2e-3, math.pi / 2, 925e6)
    with pytest.raises(ValueError):
        radial_stub_admittance(rogers, 0.0, 5e-3, 4.0, 925e6)
    with pytest.raises(ValueError):
        radial_stub_admittance(rogers, 0.0, 5e-3, 1.0, 925e6, mode="exact")
