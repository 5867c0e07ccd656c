from .diode import (
    DiodeModel,
    thermal_voltage,
    i_of_v,
    g_of_v,
    q_of_v,
    c_of_v,
    MAX_EXP_ARG,
)
