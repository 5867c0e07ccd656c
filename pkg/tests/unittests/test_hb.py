import numpy as np
import pytest

from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.devices import c_of_v, g_of_v
from rectiforge.hb import HarmonicSpectrum, norton_reduce, solve_dc, solve_hb, available_source_voltage
from rectiforge.hb.network import incidence, junctions
from rectiforge.hb.solver import _HarmonicBalanceProblem
from rectiforge.linear import port_response
from rectiforge.netlist import load_netlist, parse


@pytest.fixture(scope="module")
def doubler():
    return load_netlist("doubler")


@pytest.fixture(scope="module")
def doubler_solution(doubler):
    return solve_hb(doubler, 925e6, -10.0)


def test_available_source_voltage():
    # 0 dBm into 50 ohm: 1 mW = Vs^2 / (8 * 50)
    assert available_source_voltage(0.0, 50.0) == pytest.approx(np.sqrt(0.4))


def test_spectrum_of_a_cosine():
    t = np.arange(32) / 32
    samples = 0.5 + 2.0 * np.cos(2 * np.pi * t + 0.3)
    spectrum = HarmonicSpectrum.from_time(1e6, samples, harmonics=4)
    assert spectrum.dc == pytest.approx(0.5)
    assert spectrum.fundamental == pytest.approx(2.0 * np.exp(0.3j))
    assert spectrum.magnitude(3) == pytest.approx(0.0, abs=1e-12)


def test_dc_of_undriven_doubler(doubler):
    dc = solve_dc(doubler)
    assert dc.converged
    assert all(abs(v) < 1e-9 for v in dc.node_voltages.values())


def test_dc_forward_diode():
    circuit = parse(
        """
        .model D diode is=3e-6 n=1.06
        .port P1 in 0 z0=50
        D1 in 0 model=D
        """
    )
    dc = solve_dc(circuit, port_voltages={1: 1.0})
    v = dc.node_voltages["in"]
    assert 0.1 < v < 0.4
    assert dc.junction_currents["D1"] == pytest.approx((1.0 - v) / 50, rel=1e-6)


def test_small_signal_limit(doubler):
    """At -60 dBm the fundamental matches the linearised network"""
    pin = -60.0
    sol = solve_hb(doubler, 925e6, pin)
    assert sol.converged
    vs = available_source_voltage(pin, 50.0)
    linear = port_response(doubler, 925e6, 1, vs)
    for node in ("in", "x", "out"):
        assert sol.spectrum(node).fundamental == pytest.approx(
            linear[node], rel=1e-3, abs=1e-9
        )


def test_doubler_rectifies(doubler_solution):
    sol = doubler_solution
    assert sol.converged
    assert sol.v_odc > 0
    # The output is nearly pure DC
    assert sol.spectrum("out").magnitude(1) < 0.05 * sol.v_odc


def test_power_ledger_closes(doubler_solution):
    ledger = doubler_solution.ledger
    assert ledger.balance_error < 1e-6
    assert 0 < ledger.dc_load < ledger.port_input <= ledger.available * (1 + 1e-9)


def test_more_harmonics_changes_little(doubler, doubler_solution):
    finer = solve_hb(doubler, 925e6, -10.0, harmonics=16)
    assert finer.converged
    assert finer.v_odc == pytest.approx(doubler_solution.v_odc, rel=1e-3)


def test_warm_start(doubler, doubler_solution):
    warm = solve_hb(doubler, 925e6, -8.0, initial=doubler_solution)
    cold = solve_hb(doubler, 925e6, -8.0)
    assert warm.converged and cold.converged
    assert warm.v_odc == pytest.approx(cold.v_odc, rel=1e-5)


def test_diagnostics(doubler):
    sol = solve_hb(doubler, 925e6, -10.0, diagnostics=True)
    frame = sol.diagnostics_frame()
    assert list(frame.columns) == ["level_dbm", "iteration", "residual_a", "step_scale"]
    assert len(frame) > 0
    assert frame["step_scale"].between(0, 1).all()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"f0": 925e6, "pin": 30.0},
        {"f0": -1.0, "pin": -10.0},
        {"f0": 925e6, "pin": -10.0, "harmonics": 2},
        {"f0": 925e6, "pin": -10.0, "port": 2},
    ],
)
def test_preconditions(doubler, kwargs):
    with pytest.raises(ValueError):
        solve_hb(doubler, **kwargs)


def test_circuit_without_diodes_is_linear():
    circuit = load_netlist("lmatch")
    pin = 0.0
    sol = solve_hb(circuit, 925e6, pin)
    assert sol.converged
    linear = port_response(circuit, 925e6, 1, available_source_voltage(pin, 50.0))
    for node in ("in", "out"):
        spectrum = sol.spectrum(node)
        assert spectrum.fundamental == pytest.approx(linear[node], rel=1e-9)
        for k in range(2, sol.harmonics + 1):
            assert spectrum.magnitude(k) <= 1e-12 * abs(spectrum.fundamental)
    assert sol.ledger.balance_error < 1e-6


SINGLE_PORT = """
.model D diode is=3e-6 n=1.06
.port P1 in 0 z0=50
C1 in 0 10p
R1 in a 100
D1 a 0 model=D
"""


def test_norton_equivalent_of_single_port():
    circuit = parse(SINGLE_PORT)
    freq, vs = 95e6, 0.2
    norton = norton_reduce(circuit, freq, excitation={1: vs})
    assert norton.nodes == ["a"]

    z_c = 1 / (2j * np.pi * freq * 10e-12)
    z_th = 100 + 50 * z_c / (50 + z_c)
    v_th = vs * z_c / (50 + z_c)
    assert norton.admittance[0, 0] == pytest.approx(1 / z_th, rel=1e-12)
    assert norton.current[0] == pytest.approx(v_th / z_th, rel=1e-12)


def test_norton_expansion_restores_full_solution(doubler):
    """Junctions linearised at 0 V: the reduced solve, expanded, equals the full nodal solve"""
    freq, vs = 925e6, 0.3
    params = params_for_circuit(doubler, None)
    gmin = params["devices"]["gmin"]
    norton = norton_reduce(doubler, freq, excitation={1: vs}, params=params)
    junction_list = junctions(doubler, params)
    b = incidence(junction_list, norton.nodes)
    omega = 2 * np.pi * freq
    y_j = np.array(
        [
            float(g_of_v(j.model, 0.0)) + gmin + 1j * omega * float(c_of_v(j.model, 0.0))
            for j in junction_list
        ]
    )
    v_kept = np.linalg.solve(norton.admittance + b.T @ np.diag(y_j) @ b, norton.current)
    expanded = norton.expand(v_kept)

    full = port_response(doubler, freq, 1, vs, params=params)
    scale = max(abs(v) for v in full.values())
    for node, value in full.items():
        assert abs(expanded[node] - value) <= 1e-12 * scale

    currents = y_j * (b @ v_kept)
    reference = np.array(
        [y * (full[j.anode] - full[j.cathode]) for y, j in zip(y_j, junction_list)]
    )
    assert np.max(np.abs(currents - reference)) <= 1e-12 * np.max(np.abs(reference))


def test_higher_harmonics_have_no_source(doubler):
    for k in (2, 3):
        norton = norton_reduce(doubler, k * 925e6)
        assert np.all(norton.current == 0)

    problem = _HarmonicBalanceProblem(doubler, 925e6, 4, params_for_circuit(doubler, None), 1)
    assert np.any(problem.nortons[1].current != 0)
    for norton in problem.nortons[2:]:
        assert np.all(norton.current == 0)


def test_jacobian_matches_finite_differences(doubler):
    problem = _HarmonicBalanceProblem(doubler, 95e6, 4, params_for_circuit(doubler, None), 1)
    vs = available_source_voltage(-10.0, 50.0)
    rng = np.random.default_rng(0)
    x = 0.05 * rng.standard_normal(problem.size)

    _, g_t, c_t = problem.residual(x, vs)
    analytic = problem.jacobian(g_t, c_t)

    h = 1e-6
    numeric = np.empty_like(analytic)
    for column in range(problem.size):
        step = np.zeros(problem.size)
        step[column] = h
        numeric[:, column] = (problem.residual(x + step, vs)[0] - problem.residual(x - step, vs)[0]) / (2 * h)
    assert np.max(np.abs(analytic - numeric)) < 1e-4 * np.max(np.abs(analytic))


@pytest.fixture(scope="module")
def dualband():
    return load_netlist("dualband_rectifier")


@pytest.mark.slow
@pytest.mark.parametrize("f0", [95e6, 925e6])
def test_dual_band_example_converges(dualband, f0):
    coarse = solve_hb(dualband, f0, -10.0, harmonics=8)
    fine = solve_hb(dualband, f0, -10.0, harmonics=16)
    assert coarse.converged and fine.converged
    assert coarse.v_odc > 0
    assert fine.v_odc == pytest.approx(coarse.v_odc, rel=1e-3)
