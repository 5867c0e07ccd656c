import pytest
import yaml

from rectiforge import load_params
from rectiforge.common.config.parseconfig import (
    check_params,
    default_params,
    option_parser,
    params_for_circuit,
    resolve_params,
)
from rectiforge.netlist import parse


def test_defaults():
    params = load_params()
    assert params["hb"]["harmonics"] == 8
    assert params["hb"]["oversampling"] == 4
    assert params["hb"]["step limit"] == pytest.approx(0.1)
    assert params["hb"]["abs tolerance"] == pytest.approx(1e-12)
    assert params["devices"]["breakdown"] is False
    assert params["media"]["stub mode"] == "bessel"
    assert params["media"]["stub min feed width"] == pytest.approx(1e-4)
    assert params["transient"]["steps per period"] == 2000
    assert params["analysis"]["fbw center"] == "midpoint"
    assert params["optimize"]["penalty"] == 1e6
    assert params["output"]["folder"] == "output"


def test_default_params_returns_a_copy():
    params = default_params()
    params["hb"]["harmonics"] = 3
    assert default_params()["hb"]["harmonics"] == 8


def test_user_yaml(tmp_path):
    user_file = tmp_path / "user.yaml"
    user_file.write_text(yaml.safe_dump({"hb": {"harmonics": 12}}))
    params = load_params(str(user_file))
    assert params["hb"]["harmonics"] == 12
    assert params["hb"]["max iterations"] == 200


def test_obsolete_key_raises():
    with pytest.raises(RuntimeWarning):
        check_params({"hb": {"harmonix": 12}})


def test_invalid_value_raises():
    with pytest.raises(ValueError):
        check_params({"hb": {"harmonics": 2}})
    with pytest.raises(ValueError):
        check_params({"media": {"stub mode": "exact"}})


def test_precedence():
    """Overrides beat netlist options, which beat the given params"""
    base = check_params({"hb": {"harmonics": 10, "max iterations": 30}})
    options = {"hb.harmonics": "12", "hb.max_iterations": "40"}
    params = resolve_params(base, options, overrides={"hb": {"harmonics": 16}})
    assert params["hb"]["harmonics"] == 16
    assert params["hb"]["max iterations"] == 40


def test_option_parser():
    assert option_parser("hb.harmonics").parse("5") == 5
    assert option_parser("media.stub_mode").parse("cap") == "cap"
    with pytest.raises(KeyError):
        option_parser("hb.unknown_key")
    with pytest.raises(KeyError):
        option_parser("hb")


def test_params_for_circuit_uses_options():
    circuit = parse(
        """
        .port P1 in 0 z0=50
        R1 in 0 50
        .options hb.harmonics=5 media.stub_mode=cap
        """
    )
    params = params_for_circuit(circuit)
    assert params["hb"]["harmonics"] == 5
    assert params["media"]["stub mode"] == "cap"

    explicit = default_params()
    assert params_for_circuit(circuit, explicit) is explicit
