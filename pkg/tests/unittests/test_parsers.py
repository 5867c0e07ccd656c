import pytest

from rectiforge.common.config.utils import PARSER_FACTORY
from rectiforge.common import quant


def test_float_parser():
    p = PARSER_FACTORY.create_parser({"type": "float"}, quant)
    assert p.parse(1.5) == 1.5
    assert p.parse("1e-12") == 1e-12

    with pytest.raises(ValueError):
        p.parse("test")
    with pytest.raises(ValueError):
        p.parse(True)

    p2 = PARSER_FACTORY.create_parser({"type": "float", "min": 0, "max": 1}, quant)
    assert p2.parse(0) == 0
    assert p2.parse(1) == 1

    with pytest.raises(ValueError):
        p2.parse(-0.1)
    with pytest.raises(ValueError):
        p2.parse(1.1)


def test_int_parser():
    p = PARSER_FACTORY.create_parser({"type": "int", "min": 3}, quant)
    assert p.parse(8) == 8
    # Netlist `.options` values arrive as text
    assert p.parse("8") == 8

    with pytest.raises(ValueError):
        p.parse("8.5")
    with pytest.raises(ValueError):
        p.parse(2)


def test_bool_parser():
    p = PARSER_FACTORY.create_parser({"type": "bool"}, quant)
    assert p.parse(True) is True
    assert p.parse("yes") is True
    assert p.parse("on") is True
    assert p.parse("false") is False
    assert p.parse(0) is False

    with pytest.raises(ValueError):
        p.parse("test")
    with pytest.raises(ValueError):
        p.parse(2)


def test_str_parser():
    p = PARSER_FACTORY.create_parser({"type": "str"}, quant)
    assert p.parse("test") == "test"
    assert p.parse(1.5) == "1.5"


def test_enum_parser():
    p = PARSER_FACTORY.create_parser(
        {"type": "enum", "values": ["bessel", "cap"], "default": "bessel"}, quant
    )
    assert p.parse("cap") == "cap"

    with pytest.raises(ValueError):
        p.parse("exact")

    # Default must be one of the allowed values
    with pytest.raises(ValueError):
        PARSER_FACTORY.create_parser({"type": "enum", "values": ["a", "b"]}, quant)
    with pytest.raises(ValueError):
        PARSER_FACTORY.create_parser(
            {"type": "enum", "values": ["a", "b"], "default": "c"}, quant
        )


def test_quantity_parser():
    p = PARSER_FACTORY.create_parser(
        {"type": "quantity", "unit": "length_unit"}, quant
    )
    assert p.parse("35 um") == pytest.approx(3.5e-5)
    assert p.parse("0.1 mm") == pytest.approx(1e-4)
    # Bare numbers are already in the target unit
    assert p.parse(0.8e-3) == 0.8e-3

    with pytest.raises(ValueError):
        p.parse("5 kg")
    with pytest.raises(ValueError):
        p.parse(True)

    p2 = PARSER_FACTORY.create_parser({"type": "quantity", "unit": "angle_unit"}, quant)
    assert p2.parse("180 deg") == pytest.approx(3.141592653589793)


def test_unknown_parser_type():
    with pytest.raises(KeyError):
        PARSER_FACTORY.create_parser({"type": "datasource"}, quant)
