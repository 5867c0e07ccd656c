"""
Small-signal (linear) analysis: nodal assembly, S-parameters, duplexer report.
"""

from .assemble import (
    AdmittanceSystem,
    SingularSystemError,
    element_admittance,
    build_admittance,
    assemble_admittance,
    port_response,
    solve_nodal,
    diode_model,
    junction_nodes,
    circuit_nodes,
)
from .sparams import SParameterMatrix, s_parameters, port_impedance_matrix
from .duplexer import DuplexerReport, duplexer_report
