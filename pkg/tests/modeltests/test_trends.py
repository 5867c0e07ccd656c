import numpy as np
import pytest
from tests.modeltests.utils import exec_run, read_output

from rectiforge import RectiForge
from rectiforge.analysis import band_edges, reflection_curve
from rectiforge.common.utils import inputdata_path

pytestmark = pytest.mark.slow

# (frequency, input power of minimum reflection) per band
BANDS = {"FM": (95e6, -2.5), "GSM": (925e6, -5.0)}
PIN_GRID = list(np.arange(-15.0, 5.01, 2.5))


@pytest.fixture(scope="module")
def script_output():
    """Load sweeps of the doubler at three input powers"""
    return exec_run("runs/run_loads.py")


@pytest.fixture(scope="module")
def tuned():
    """The dual-band example after its matching optimisation"""
    model = RectiForge("dualband_rectifier")
    model.optimize(inputdata_path("optspecs", "dualband_match.yaml"))
    return model


def test_duplexer_selectivity():
    model = RectiForge("duplexer")
    report = model.duplexer_report(95e6, 925e6)
    assert report.selective
    fm, gsm = report.table.itertuples(index=False)
    assert fm.s21_db - fm.s31_db > 20
    assert gsm.s31_db - gsm.s21_db > 10


def test_matching_does_not_worsen(tuned):
    assert tuned.report.cost_after <= tuned.report.cost_before


@pytest.mark.parametrize("band", BANDS)
def test_reflection_below_threshold_after_matching(tuned, band):
    f0, pin = BANDS[band]
    tuned.solve(f0, pin)
    assert tuned.summary()["s11_db"] < -10

    grid = [f0 * (1 + step) for step in (-0.1, -0.05, -0.02, 0.0, 0.02, 0.05, 0.1)]
    curve = reflection_curve(tuned.sweep("freq", grid, {"pin": pin}))
    f_lo, f_hi = band_edges(curve, -10.0, center=f0)
    assert f_lo < f0 < f_hi


@pytest.mark.parametrize("band", BANDS)
def test_efficiency_peaks_at_moderate_power(tuned, band):
    f0, _ = BANDS[band]
    records = tuned.sweep("pin", PIN_GRID, {"freq": f0})
    assert all(record.converged for record in records)
    pce = np.array([record.pce for record in records])
    peak = int(np.argmax(pce))
    assert -7.5 <= PIN_GRID[peak] <= 2.5
    # unimodal: rising up to the peak, falling after it
    assert np.all(np.diff(pce[: peak + 1]) > 0)
    assert np.all(np.diff(pce[peak:]) < 0)


@pytest.mark.parametrize("band", BANDS)
def test_light_load_dependence_of_dual_band_rectifier(tuned, band):
    """PCE at -10 dBm changes by less than 10 points between 10 and 18 kohm"""
    f0, _ = BANDS[band]
    records = tuned.sweep("r_load", [10e3, 12e3, 14e3, 16e3, 18e3], {"freq": f0, "pin": -10.0})
    assert all(record.converged for record in records)
    pce = [record.pce for record in records]
    assert max(pce) - min(pce) < 10


def test_light_load_dependence(script_output):
    """Same spread on the lumped doubler"""
    output_df = read_output(filename="run_loads_-10dBm")
    assert output_df["converged"].all()
    assert output_df["rl_ohm"].tolist() == [10e3, 12e3, 14e3, 16e3, 18e3]
    assert output_df["pce_pct"].max() - output_df["pce_pct"].min() < 10


def test_efficiency_grows_with_power(script_output):
    peaks = [
        read_output(filename=f"run_loads_{pin}dBm")["pce_pct"].max() for pin in [-20, -10, 0]
    ]
    assert peaks == sorted(peaks)


def test_repeated_sweeps_are_identical():
    model = RectiForge("doubler")
    first = [r.v_odc for r in model.sweep("pin", [-20, -10], {"freq": 95e6})]
    second = [r.v_odc for r in model.sweep("pin", [-20, -10], {"freq": 95e6})]
    assert first == second
