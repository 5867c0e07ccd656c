import pytest
from tests.modeltests.utils import exec_run, read_output

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def script_output():
    """Runs the script shown in the documentation"""
    return exec_run("runs/run_base.py")


def test_run_successfully(script_output):
    """Run should be successful"""
    assert script_output["model1"].status == "converged"


def test_outputfile_exists(script_output):
    """Output file should exist"""
    model = script_output["model1"]
    read_output(model)


def test_params_sidecar(script_output):
    model = script_output["model1"]
    with open(f"output/{model.last_saved_filename}.csv.params.json") as fh:
        assert '"harmonics": 8' in fh.read()


def test_output_voltage_grows_with_power(script_output):
    output_df = read_output(script_output["model1"])
    assert output_df["converged"].all()
    assert output_df["vdc_v"].is_monotonic_increasing


def test_summary_matches_sweep(script_output):
    """The single solve and the sweep point at the same power agree"""
    model = script_output["model1"]
    summary = model.summary()
    output_df = read_output(model).set_index("pin_dbm")
    assert output_df.loc[-10, "vdc_v"] == pytest.approx(summary["v_odc"], rel=1e-4)
    assert 0 < summary["pce"] < 100
