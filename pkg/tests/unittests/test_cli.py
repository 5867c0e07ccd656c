import io

import pandas as pd
import pytest

from rectiforge.cli import (
    EXIT_IO,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    linear_grid,
    main,
)
from rectiforge.common.utils import inputdata_path
from rectiforge.netlist import parse


def run(*argv):
    out = io.StringIO()
    code = main(list(argv) + ["--jobs", "1"] if len(argv) > 1 else list(argv), out=out)
    return code, out.getvalue()


def test_linear_grid():
    assert linear_grid(-20, -10, 5) == [-20.0, -15.0, -10.0]
    assert linear_grid(1e6, 1.25e6, 0.1e6) == pytest.approx([1e6, 1.1e6, 1.2e6])
    with pytest.raises(UsageError):
        linear_grid(0, 1, 0)
    with pytest.raises(UsageError):
        linear_grid(1, 0, 0.1)


def test_help():
    assert main(["--help"], out=io.StringIO()) == EXIT_OK


def test_unknown_flag():
    code, _ = run("sim", "doubler", "--f0", "925e6", "--pin", "-10", "--bogus")
    assert code == EXIT_USAGE


def test_missing_netlist():
    code, _ = run("sim", "no_such_file.net", "--f0", "925e6", "--pin", "-10")
    assert code == EXIT_IO


def test_sparams_duplexer():
    code, text = run("sparams", "duplexer", "--f", "95e6,925e6", "--ports", "3")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "band,freq_hz,s11_db,s21_db,s31_db,s23_db"
    assert lines[1].startswith("FM,9.5e7,")
    assert lines[-1] == "selective,true"


def test_sparams_at_an_operating_point():
    args = ("sparams", "doubler", "--f", "90e6,95e6,100e6")
    code, unbiased = run(*args)
    assert code == EXIT_OK
    code, biased = run(*args, "--pin", "0", "--f0", "95e6")
    assert code == EXIT_OK
    assert len(biased.splitlines()) == len(unbiased.splitlines()) == 4
    assert biased.splitlines()[0] == unbiased.splitlines()[0]
    assert biased != unbiased


def test_sparams_port_mismatch():
    code, _ = run("sparams", "duplexer", "--f", "95e6", "--ports", "2")
    assert code == EXIT_USAGE


def test_sparams_touchstone(tmp_path):
    target = tmp_path / "lmatch.s1p"
    code, _ = run("sparams", "lmatch", "--f", "900e6,925e6,950e6", "--output", str(target))
    assert code == EXIT_OK
    assert target.exists()


def test_sim():
    code, text = run("sim", "doubler", "--f0", "925e6", "--pin", "-10")
    assert code == EXIT_OK
    header, row = text.splitlines()
    assert header == "freq_hz,pin_dbm,rl_ohm,s11_db,vdc_v,pce_pct,iterations,converged"
    assert row.endswith(",true")


def test_sweep_to_file(tmp_path):
    target = tmp_path / "sweep.csv"
    code, _ = run(
        "sweep", "doubler", "--axis", "pin", "--from", "-20", "--to", "-10",
        "--step", "5", "--f0", "925e6", "--output", str(target),
    )
    assert code == EXIT_OK
    frame = pd.read_csv(target)
    assert frame["pin_dbm"].tolist() == [-20, -15, -10]
    assert (tmp_path / "sweep.csv.params.json").exists()


def test_sweep_without_converged_points():
    code, _ = run(
        "sweep", "doubler", "--axis", "pin", "--from", "30", "--to", "40",
        "--step", "10", "--f0", "925e6",
    )
    assert code == EXIT_NOT_CONVERGED


def test_fbw_from_curve(tmp_path):
    curve = tmp_path / "curve.csv"
    pd.DataFrame(
        {"freq_hz": [1e6, 2e6, 3e6, 4e6, 5e6], "s11_db": [-5, -15, -20, -15, -5]}
    ).to_csv(curve, index=False)
    code, text = run("fbw", "--curve", str(curve))
    assert code == EXIT_OK
    header, row = text.splitlines()
    assert header == "f_lo_hz,f_hi_hz,fbw_pct"
    assert row == "1.5e6,4.5e6,100"


def test_fbw_without_band(tmp_path):
    curve = tmp_path / "curve.csv"
    pd.DataFrame({"freq_hz": [1e6, 2e6], "s11_db": [-5, -3]}).to_csv(curve, index=False)
    code, _ = run("fbw", "--curve", str(curve))
    assert code == EXIT_NOT_CONVERGED


def test_optimize(tmp_path):
    tuned = tmp_path / "tuned.net"
    code, text = run(
        "optimize", "lmatch", "--spec", inputdata_path("optspecs", "lmatch.yaml"),
        "--output", str(tuned), "--report", str(tmp_path / "history.csv"),
    )
    assert code == EXIT_OK
    assert "cost," in text
    circuit = parse(tuned.read_text())
    assert circuit.element("L1").value == pytest.approx(14.9e-9, rel=0.02)
    assert (tmp_path / "history_metrics.csv").exists()


def test_oracle_rejects_distributed_netlist():
    code, _ = run("oracle", "duplexer", "--f0", "95e6", "--pin", "-10")
    assert code == EXIT_USAGE
