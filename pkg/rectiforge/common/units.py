"""
Uses the Pint package to parse quantities with units.
Symbolic target units (like `length_unit`) are mapped to SI units
through `default_units.yaml`.
"""
import pint

from .utils import load_yaml


DEFAULT_UNITS = load_yaml("default_units.yaml")


class Quantity:
    """
    The Quantity object creates a callable object which parses quantities
    with units (see __call__ usage).

    """

    def __init__(self):
        self.default_units = DEFAULT_UNITS
        self._pint_registry = pint.UnitRegistry()

    def __call__(self, *args, only_magnitude=True, can_be_false=True):
        """Usage:
        - quant(string, to_unit):        quant('35 um', 'length_unit')
        - quant(value, unit, to_unit):   quant(90, 'deg', 'angle_unit')
        """

        if len(args) not in [2, 3]:
            raise RuntimeError("Incorrect number of arguments to quant")

        if args[0] is False and can_be_false:
            return False

        target_unit = self._parse_default_units(args[-1])

        if len(args) == 2:
            quantity = self._pint_registry.Quantity(str(args[0]))
        else:
            quantity = self._pint_registry.Quantity(args[0], str(args[1]))

        if only_magnitude:
            return float(quantity.to(target_unit).magnitude)
        return quantity.to(target_unit)

    def __repr__(self):
        units = ", ".join(
            [f"{key}: {value}" for key, value in self.default_units.items()]
        )
        return f"Quantity with units: {units}"

    def to_base(self, text: str) -> float:
        """Magnitude in SI base units of a quantity string like "10 nH"."""
        return float(self._pint_registry.Quantity(str(text)).to_base_units().magnitude)

    ####### Private functions #######

    def _parse_default_units(self, units):
        for key, value in self.default_units.items():
            # Add brackets () to avoid order of operation problems with compound units
            units = units.replace(key, f"({value})")
        return units


quant = Quantity()
