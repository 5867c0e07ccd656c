"""
Substrate and transmission-line parameter containers.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SubstrateSpec:
    """Dielectric substrate with a metal ground plane.

    All values in SI units (height and metal thickness in metres,
    conductivity in S/m). `conductivity` may be `inf` for a lossless metal.
    """

    eps_r: float
    tan_delta: float
    height: float
    metal_thickness: float = 35e-6
    conductivity: float = 5.8e7

    def __post_init__(self):
        if not self.eps_r >= 1:
            raise ValueError(f"eps_r must be >= 1, got {self.eps_r}")
        if not self.tan_delta >= 0:
            raise ValueError(f"tan_delta must be >= 0, got {self.tan_delta}")
        if not self.height > 0:
            raise ValueError(f"height must be > 0, got {self.height}")
        if not self.metal_thickness >= 0:
            raise ValueError(
                f"metal thickness must be >= 0, got {self.metal_thickness}"
            )
        if not self.conductivity > 0:
            raise ValueError(f"conductivity must be > 0, got {self.conductivity}")


@dataclass(frozen=True)
class LineParams:
    """Quasi-static line parameters at one frequency (losses in Np/m)."""

    z0: float
    eps_eff: float
    alpha_c: float
    alpha_d: float
    beta: float

    @property
    def alpha(self) -> float:
        return self.alpha_c + self.alpha_d

    @property
    def gamma(self) -> complex:
        return complex(self.alpha, self.beta)

    @property
    def is_lossless(self) -> bool:
        return self.alpha == 0 and math.isfinite(self.beta)
