"""
Planar transmission media: substrate, microstrip line, radial stub.
"""

from .substrate import SubstrateSpec, LineParams
from .microstrip import (
    microstrip_params,
    mlin_abcd,
    mlin_two_port,
    abcd_to_s,
    effective_permittivity,
    characteristic_impedance,
)
from .radialstub import (
    radial_stub_admittance,
    radial_stub_capacitance,
    feed_radius,
    STUB_MODES,
)
