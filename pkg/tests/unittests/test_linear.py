import numpy as np
import pytest

from rectiforge import RectiForge
from rectiforge.common.utils import FrequencyClampWarning
from rectiforge.linear import duplexer_report, port_response, s_parameters
from rectiforge.netlist import GROUND, load_netlist, parse


def test_matched_load():
    circuit = parse(".port P1 in 0 z0=50\nR1 in 0 50")
    (s,) = s_parameters(circuit, 1e9)
    assert abs(s.s[0, 0]) < 1e-12
    assert s.db(1, 1) < -200


def test_series_resistor():
    circuit = parse(
        """
        .port P1 a 0 z0=50
        .port P2 b 0 z0=50
        R1 a b 50
        """
    )
    (s,) = s_parameters(circuit, 1e6)
    assert s.s[0, 0] == pytest.approx(1 / 3)
    assert s.s[1, 0] == pytest.approx(2 / 3)
    assert s.s[0, 1] == pytest.approx(2 / 3)
    assert s.is_reciprocal()
    assert s.is_passive()


def test_lc_match():
    """14.9 nH series, 1.49 pF shunt matches 200 ohm to 50 ohm at 925 MHz"""
    circuit = load_netlist("lmatch")
    circuit = circuit.with_value("L1", "value", 14.90e-9)
    circuit = circuit.with_value("C1", "value", 1.490e-12)
    (s,) = s_parameters(circuit, 925e6)
    assert s.db(1, 1) < -30


def test_port_response_divider():
    circuit = parse(".port P1 in 0 z0=50\nR1 in 0 50")
    voltages = port_response(circuit, 1e6, 1, 2.0)
    assert voltages["in"] == pytest.approx(1.0)
    assert voltages[GROUND] == 0


def test_duplexer_is_reciprocal_and_passive():
    circuit = load_netlist("duplexer")
    for s in s_parameters(circuit, [95e6, 925e6]):
        assert s.n_ports == 3
        assert s.is_reciprocal(tol=1e-9)
        assert s.is_passive()


def test_duplexer_selectivity():
    report = duplexer_report(load_netlist("duplexer"), 95e6, 925e6)
    assert report.selective
    fm, gsm = report.table.itertuples(index=False)
    assert fm.band == "FM"
    assert fm.s21_db > fm.s31_db
    assert gsm.s31_db > gsm.s21_db


def test_duplexer_needs_three_ports():
    with pytest.raises(ValueError):
        duplexer_report(load_netlist("lmatch"), 95e6, 925e6)


def test_frequency_order_and_jobs():
    circuit = load_netlist("duplexer")
    freqs = np.linspace(80e6, 1e9, 7)
    serial = s_parameters(circuit, freqs)
    threaded = s_parameters(circuit, freqs, jobs=3)
    assert [s.freq for s in serial] == list(freqs)
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.s, b.s)


def test_zero_frequency_is_clamped():
    circuit = parse(".port P1 in 0 z0=50\nR1 in 0 100")
    with pytest.warns(FrequencyClampWarning):
        (s,) = s_parameters(circuit, 0.0)
    assert s.freq == 1.0
    assert s.s[0, 0] == pytest.approx(1 / 3)


def test_needs_a_port():
    circuit = parse("R1 in 0 100")
    with pytest.raises(ValueError):
        s_parameters(circuit, 1e9)


def test_zero_frequency_limit_of_reactive_circuit():
    """Inductors short and capacitors open in the clamped DC limit"""
    reactive = parse(
        """
        .port P1 in 0 z0=50
        L1 in a 10n
        C1 a 0 1p
        R1 a b 150
        C2 b 0 20p
        R2 b 0 50
        """
    )
    resistive = parse(".port P1 in 0 z0=50\nR1 in b 150\nR2 b 0 50")
    with pytest.warns(FrequencyClampWarning):
        (s,) = s_parameters(reactive, 0.0)
    (expected,) = s_parameters(resistive, 1e3)
    assert expected.s[0, 0] == pytest.approx(0.6)
    assert s.s[0, 0] == pytest.approx(expected.s[0, 0], rel=1e-6)


def test_s11_follows_the_large_signal_bias():
    model = RectiForge("doubler")
    (unbiased,) = model.s_parameters([95e6])
    (weak,) = model.s_parameters([95e6], pin=-40)
    (strong,) = model.s_parameters([95e6], pin=0)

    bias = model.solution.dc_bias()
    assert model.solution.pin == 0
    assert set(bias) == {"D1", "D2"}
    assert all(v < 0 for v in bias.values())
    assert abs(weak.s[0, 0] - unbiased.s[0, 0]) < 1e-3
    assert abs(strong.s[0, 0] - unbiased.s[0, 0]) > 1e-3

    (direct,) = s_parameters(model.circuit, 95e6, bias=bias, params=model.params)
    assert np.array_equal(direct.s, strong.s)


def test_bias_is_ignored_without_diodes():
    model = RectiForge("lmatch")
    (unbiased,) = model.s_parameters([925e6])
    (biased,) = model.s_parameters([925e6], pin=0)
    assert model.solution is None
    assert np.array_equal(unbiased.s, biased.s)
