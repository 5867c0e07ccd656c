import math

import numpy as np
import pandas as pd
import pytest

from rectiforge.analysis import (
    NoBandError,
    band_edges,
    dbm_to_watts,
    fractional_bandwidth,
    pce,
    records_to_frame,
    reference_fbw,
    reference_measurements,
    reflection_curve,
    sweep,
    sweep_grid,
    watts_to_dbm,
    wave_amplitudes,
)
from rectiforge.common.config.parseconfig import default_params
from rectiforge.netlist import load_netlist


def test_power_conversions():
    assert float(dbm_to_watts(0)) == pytest.approx(1e-3)
    assert float(dbm_to_watts(-20)) == pytest.approx(1e-5)
    assert float(watts_to_dbm(1e-3)) == pytest.approx(0.0)


def test_pce():
    assert pce(2.33, 14e3, -2.5) == pytest.approx(69, abs=1)
    assert pce(0.171, 14e3, -20) == pytest.approx(20.9, abs=0.1)
    with pytest.raises(ValueError):
        pce(1.0, 0.0, -10)


@pytest.mark.parametrize(
    "row", reference_measurements().to_dict("records"), ids=lambda row: f"{row['band']}{row['pin_dbm']}"
)
def test_reference_measurements_are_consistent(row):
    """Every published efficiency follows from its voltage, load and power"""
    assert pce(row["vdc_v"], row["rl_ohm"], row["pin_dbm"]) == pytest.approx(
        row["pce_pct"], abs=1
    )


def test_reference_table():
    frame = reference_measurements()
    assert len(frame) == 6
    assert set(frame["band"]) == {"FM", "GSM"}
    assert (frame["rl_ohm"] == 14e3).all()
    assert reference_fbw() == {"FM": 21.0, "GSM": 11.0}


def test_wave_amplitudes():
    # Matched: no reflected wave
    a, b = wave_amplitudes(1.0, 1.0 / 50, 50.0)
    assert a == pytest.approx(2 / math.sqrt(50) / 2)
    assert b == pytest.approx(0.0)


@pytest.fixture
def v_curve():
    freqs = np.linspace(800e6, 1050e6, 51)
    values = -20 + np.abs(freqs - 925e6) / 5e6
    return list(zip(freqs, values))


def test_band_edges(v_curve):
    f_lo, f_hi = band_edges(v_curve, threshold=-10)
    assert f_lo == pytest.approx(875e6)
    assert f_hi == pytest.approx(975e6)


def test_fractional_bandwidth(v_curve):
    assert fractional_bandwidth(v_curve) == pytest.approx(100 * 100e6 / 925e6)
    assert fractional_bandwidth(v_curve, mode="dip") == pytest.approx(100 * 100e6 / 925e6)
    frame = pd.DataFrame(v_curve, columns=["freq_hz", "s11_db"])
    assert fractional_bandwidth(frame, center=925e6) == pytest.approx(100 * 100e6 / 925e6)


def test_band_open_at_curve_end():
    curve = [(1e6, -12.0), (2e6, -11.0), (3e6, -5.0)]
    f_lo, f_hi = band_edges(curve)
    assert f_lo == 1e6
    assert f_hi == pytest.approx(2e6 + 1e6 / 6)


def test_two_bands_pick_center():
    curve = [(1.0, -5), (2.0, -15), (3.0, -5), (4.0, -20), (5.0, -5)]
    assert band_edges(curve) == pytest.approx((3 + 1 / 3, 4 + 2 / 3))
    assert band_edges(curve, center=2.0) == pytest.approx((1.5, 2.5))


def test_no_band():
    with pytest.raises(NoBandError):
        band_edges([(1.0, -5.0), (2.0, -3.0)])
    with pytest.raises(NoBandError):
        band_edges([(1.0, -15.0), (2.0, -3.0)], center=2.0)
    with pytest.raises(NoBandError):
        band_edges([])
    with pytest.raises(ValueError):
        band_edges([(2.0, -15.0), (1.0, -15.0)])
    with pytest.raises(ValueError):
        fractional_bandwidth([(1.0, -15.0)], mode="peak")


@pytest.fixture(scope="module")
def doubler():
    return load_netlist("doubler")


def test_power_sweep(doubler):
    records = sweep(doubler, "pin", [-20, -15, -10], {"freq": 925e6})
    assert [r.pin for r in records] == [-20, -15, -10]
    assert all(r.converged for r in records)
    assert all(r.r_load == 14e3 for r in records)
    # More input power, more output voltage
    voltages = [r.v_odc for r in records]
    assert voltages == sorted(voltages)

    frame = records_to_frame(records)
    assert list(frame.columns) == [
        "freq_hz", "pin_dbm", "rl_ohm", "s11_db", "vdc_v", "pce_pct", "iterations", "converged",
    ]
    assert frame["converged"].dtype == bool


def test_sweep_does_not_depend_on_jobs(doubler):
    grid = np.linspace(-20, -10, 5)
    params = default_params()
    params["analysis"]["sweep chunk size"] = 2
    serial = sweep(doubler, "pin", grid, {"freq": 925e6}, params=params, jobs=1)
    threaded = sweep(doubler, "pin", grid, {"freq": 925e6}, params=params, jobs=3)
    assert [r.v_odc for r in serial] == [r.v_odc for r in threaded]


def test_load_sweep_grid(doubler):
    records = sweep_grid(
        doubler, "r_load", [10e3, 14e3], "pin", [-20, -10], {"freq": 925e6}
    )
    assert [(r.pin, r.r_load) for r in records] == [
        (-20, 10e3), (-20, 14e3), (-10, 10e3), (-10, 14e3),
    ]


def test_sweep_arguments(doubler):
    with pytest.raises(ValueError):
        sweep(doubler, "temperature", [1], {"freq": 925e6, "pin": -10})
    with pytest.raises(ValueError):
        sweep(doubler, "pin", [-10], {})
    with pytest.raises(ValueError):
        sweep_grid(doubler, "pin", [-10], "pin", [-10], {"freq": 925e6})


def test_failed_point_is_recorded(doubler):
    (record,) = sweep(doubler, "pin", [40.0], {"freq": 925e6})
    assert not record.converged
    assert math.isnan(record.pce)
    assert record.error


def test_reflection_curve(doubler):
    records = sweep(doubler, "freq", [950e6, 900e6], {"pin": -10})
    curve = reflection_curve(records)
    assert [f for f, _ in curve] == [900e6, 950e6]
    assert all(s11 <= 0 for _, s11 in curve)
