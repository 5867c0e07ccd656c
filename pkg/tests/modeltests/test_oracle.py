import pytest

from rectiforge import RectiForge, load_params

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def model():
    params = load_params()
    params["transient"]["steps per period"] = 500
    return RectiForge("doubler", params)


@pytest.mark.parametrize("pin", [-20, -10, 0])
def test_harmonic_balance_matches_transient(model, pin):
    """Both solvers agree on the output voltage of the lumped doubler"""
    hb = model.solve(95e6, pin)
    transient = model.simulate(95e6, pin)
    assert transient.settled
    assert hb.ledger.balance_error < 1e-6
    assert transient.v_odc == pytest.approx(hb.v_odc, rel=0.01)


def _transient(steps, pin):
    params = load_params()
    params["transient"]["steps per period"] = steps
    return RectiForge("doubler", params).simulate(95e6, pin)


def test_halving_the_step_changes_little():
    coarse = _transient(500, -10.0)
    fine = _transient(1000, -10.0)
    assert coarse.settled and fine.settled
    assert fine.v_odc == pytest.approx(coarse.v_odc, rel=5e-4)


def test_doubler_output_at_high_power(model):
    """Twice the swing at the diode junction minus the forward drops"""
    result = model.simulate(95e6, 5.0)
    assert result.settled
    swing = result.last_period["x"]
    v_peak = (swing.max() - swing.min()) / 2
    v_drop = (result.conduction_drop("D1") + result.conduction_drop("D2")) / 2
    assert result.v_odc > v_peak - v_drop
    assert result.v_odc == pytest.approx(2 * (v_peak - v_drop), rel=0.05)
