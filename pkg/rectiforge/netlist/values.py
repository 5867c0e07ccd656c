"""
Numeric value tokens of the netlist format.

Two suffix families are understood:

* SPICE scale factors (f, p, n, u, m, k, meg, g, t), optionally followed by
  a unit name that is ignored (`20pF`, `14kohm`, `230nH`). The scale is
  applied as a decimal exponent, so `0.18p` is exactly the float `1.8e-13`.
* Explicit physical units (mm, um, cm, nm, mil, deg, rad), converted with
  pint to SI (metres, radians).

Angles without a unit are degrees.
"""

import re
from decimal import Decimal, InvalidOperation
from typing import Optional

from rectiforge.common import quant

SPICE_SCALES = {
    "meg": 6,
    "f": -15,
    "p": -12,
    "n": -9,
    "u": -6,
    "m": -3,
    "k": 3,
    "g": 9,
    "t": 12,
}

# Unit names that may trail a scale factor (and are otherwise ignored)
TRAILING_UNITS = {"", "f", "h", "ohm", "ohms", "hz", "s", "v", "a", "w"}

EXPLICIT_UNITS = {
    "mm": "length_unit",
    "um": "length_unit",
    "cm": "length_unit",
    "nm": "length_unit",
    "mil": "length_unit",
    "deg": "angle_unit",
    "rad": "angle_unit",
}

_TOKEN = re.compile(
    r"^(?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)(?P<suffix>[a-z]*)$"
)

# Render order of scale suffixes (engineering notation)
_RENDER_SCALES = [("t", 12), ("g", 9), ("meg", 6), ("k", 3), ("", 0),
                  ("m", -3), ("u", -6), ("n", -9), ("p", -12), ("f", -15)]


def _split_suffix(suffix: str):
    """Returns the decimal exponent of a SPICE suffix, or None if invalid."""
    if suffix in TRAILING_UNITS and suffix != "f":
        return 0
    for prefix, exponent in SPICE_SCALES.items():
        if suffix.startswith(prefix) and suffix[len(prefix):] in TRAILING_UNITS:
            return exponent
    return None


def parse_value(token: str, quantity: Optional[str] = None) -> float:
    """Parses a numeric token to an SI float.

    Args:
        token: e.g. "14k", "0.18p", "1.6mm", "90deg", "5.8e7"
        quantity: "angle" makes unitless numbers degrees; "length" and
            "angle" reject units of the other dimension

    Raises:
        ValueError: the token is not a number with a known suffix
    """
    text = token.strip().lower()
    match = _TOKEN.match(text)
    if match is None:
        raise ValueError(f"Invalid numeric value `{token}`")
    number, suffix = match.group("number"), match.group("suffix")

    if suffix in EXPLICIT_UNITS:
        target = EXPLICIT_UNITS[suffix]
        if quantity is not None and not target.startswith(quantity):
            raise ValueError(f"Unit `{suffix}` in `{token}` is not a {quantity}")
        return quant(float(number), suffix, target)

    exponent = _split_suffix(suffix)
    if exponent is None:
        raise ValueError(f"Unknown unit suffix `{suffix}` in `{token}`")
    if quantity == "angle":
        if exponent != 0:
            raise ValueError(f"Angle `{token}` cannot carry a scale factor")
        return quant(float(number), "deg", "angle_unit")
    try:
        return float(Decimal(number).scaleb(exponent))
    except InvalidOperation:
        raise ValueError(f"Invalid numeric value `{token}`")


def _mantissas(mantissa: float):
    for digits in range(1, 13):
        yield f"{mantissa:.{digits}g}"


def format_value(value: float, quantity: Optional[str] = None) -> str:
    """Shortest token that parses back to exactly `value`.

    Lengths are written in mm, angles in deg, anything else in engineering
    notation with SPICE suffixes (14000 -> "14k"). Falls back on repr().
    """
    value = float(value)
    candidates = []
    if quantity == "length":
        millimetres = quant(value, "m", "mm")
        candidates += [f"{text}mm" for text in _mantissas(millimetres)]
    elif quantity == "angle":
        degrees = quant(value, "rad", "deg")
        candidates += [f"{text}deg" for text in _mantissas(degrees)]
    elif value != 0:
        for suffix, exponent in _RENDER_SCALES:
            mantissa = value / 10.0**exponent
            if 1 <= abs(mantissa) < 1000:
                candidates += [f"{text}{suffix}" for text in _mantissas(mantissa)]
                break
    else:
        candidates.append("0")

    for candidate in candidates:
        try:
            if parse_value(candidate, quantity) == value:
                return candidate
        except ValueError:
            continue

    fallback = repr(value)
    if quantity == "angle":
        fallback += "rad"
    elif quantity == "length":
        fallback = _length_in_metres(value)
    return fallback


def _length_in_metres(value: float) -> str:
    """Lengths only accept explicit units, so exact metres go through um."""
    for text in _mantissas(quant(value, "m", "um")):
        candidate = f"{text}um"
        if parse_value(candidate, "length") == value:
            return candidate
    return f"{value!r}"
