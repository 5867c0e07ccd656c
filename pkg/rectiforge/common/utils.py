"""
Common functions and utilities
"""

import math
import os
import time
import yaml
from rectiforge.common import logger


def timer(name, log=False):
    """Decorator which times functions

    The duration goes to the package logger only, so that command-line
    output on stdout stays reproducible.

    Arguments:
        name {str} -- Description of the function
        log {bool} -- Log on INFO level instead of DEBUG
    """

    def decorator(fct):
        def wrapper(*args, **kwargs):
            time1 = time.time()
            result = fct(*args, **kwargs)
            time2 = time.time()
            message = "{} took {:.3g} seconds.".format(name, time2 - time1)
            if log:
                logger.info(message)
            else:
                logger.debug(message)
            return result

        wrapper.__doc__ = fct.__doc__
        wrapper.__name__ = fct.__name__
        return wrapper

    return decorator


def inputdata_path(*parts):
    return os.path.join(os.path.dirname(__file__), "../inputdata/", *parts)


def load_yaml(filename, folder="config"):
    full_filename = inputdata_path(folder, filename)
    with open(full_filename, "r", encoding="utf8") as configfile:
        output = yaml.safe_load(configfile)
    return output


def format_number(value):
    """Formats a number with 6 significant digits.

    Scientific notation is used when |value| lies outside [1e-3, 1e6]. Zero
    is written as `0`, non-finite values as `nan`, `inf` or `-inf`.
    """
    if isinstance(value, bool):
        return str(value).lower()
    if value is None:
        return ""
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    if value == 0:
        return "0"
    if 1e-3 <= abs(value) <= 1e6:
        text = f"{value:.6f}"
        digits_before = len(str(int(abs(value))).lstrip("0"))
        decimals = max(6 - digits_before, 0) if digits_before else None
        if decimals is None:
            # |value| < 1: keep 6 significant digits after the leading zeros
            decimals = 6 - int(math.floor(math.log10(abs(value)))) - 1
        text = f"{value:.{decimals}f}"
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text
    mantissa, exponent = f"{value:.5e}".split("e")
    if "." in mantissa:
        mantissa = mantissa.rstrip("0").rstrip(".")
    return f"{mantissa}e{int(exponent)}"


class RectiforgeSolverWarning(Warning):
    pass


class HarmonicTruncationWarning(RectiforgeSolverWarning):
    """The highest retained harmonic still carries a significant junction current"""


class FrequencyClampWarning(RectiforgeSolverWarning):
    """A frequency below the solver floor was raised to the floor"""
