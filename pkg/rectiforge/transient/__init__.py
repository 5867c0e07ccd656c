from .oracle import (
    TransientResult,
    EnergyLedger,
    UnsupportedElementError,
    simulate,
)
