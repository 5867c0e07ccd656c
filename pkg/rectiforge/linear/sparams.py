"""
Scattering parameters of the port-terminated network.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from rectiforge.common.config.parseconfig import params_for_circuit
from rectiforge.netlist import Circuit

from .assemble import assemble_admittance, port_injection


@dataclass
class SParameterMatrix:
    freq: float
    s: np.ndarray
    z0: np.ndarray

    @property
    def n_ports(self) -> int:
        return self.s.shape[0]

    def db(self, i: int, j: int) -> float:
        """|S_ij| in dB, ports numbered from 1"""
        magnitude = abs(self.s[i - 1, j - 1])
        return float(20 * np.log10(max(magnitude, 1e-300)))

    def deg(self, i: int, j: int) -> float:
        return float(np.degrees(np.angle(self.s[i - 1, j - 1])))

    def is_reciprocal(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.s - self.s.T)) < tol)

    def is_passive(self, tol: float = 1e-10) -> bool:
        """I - S^H S positive semi-definite"""
        eigenvalues = np.linalg.eigvalsh(
            np.eye(self.n_ports) - self.s.conj().T @ self.s
        )
        return bool(np.min(eigenvalues) > -tol)


def port_impedance_matrix(circuit: Circuit, freq: float, bias=None, params=None):
    """Z_p[i, j]: voltage across port i per ampere injected at port j, with
    every port terminated in its z0."""
    system = assemble_admittance(circuit, freq, bias=bias, params=params)
    ports = circuit.ports
    rhs = np.column_stack([port_injection(system, port, 1.0) for port in ports])
    solution = system.solve(rhs)
    # The injection pattern doubles as the differential port readout
    return system.freq, rhs.T @ solution


def _s_matrix(circuit, freq, bias, params):
    freq, zp = port_impedance_matrix(circuit, freq, bias=bias, params=params)
    z0 = np.array([port.z0 for port in circuit.ports], dtype=float)
    d_inv = np.diag(1.0 / np.sqrt(z0))
    s = 2.0 * d_inv @ zp @ d_inv - np.eye(len(z0))
    return SParameterMatrix(freq=freq, s=s, z0=z0)


def s_parameters(
    circuit: Circuit, freqs, bias: Optional[dict] = None, params=None, jobs: int = 1
) -> list:
    """S-matrices at each frequency, in the order of `freqs`."""
    if not circuit.ports:
        raise ValueError("S-parameters need at least one .port")
    params = params_for_circuit(circuit, params)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))

    def compute(freq):
        return _s_matrix(circuit, float(freq), bias, params)

    if jobs > 1 and len(freqs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(compute, freqs))
    return [compute(freq) for freq in freqs]
