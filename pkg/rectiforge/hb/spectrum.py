"""
Harmonic spectra of periodic waveforms.

Phasors are peak amplitudes: a spectrum (V_0, V_1, ..., V_K) stands for

    v(t) = V_0 + sum_k Re(V_k exp(j k w0 t))

with V_0 real. Inside the solver a spectrum is handled as a real coefficient
vector [V_0, Re V_1, Im V_1, ..., Re V_K, Im V_K] of length 2K + 1.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class HarmonicSpectrum:
    f0: float
    phasors: np.ndarray

    def __post_init__(self):
        phasors = np.array(self.phasors, dtype=complex)
        phasors[0] = phasors[0].real
        self.phasors = phasors

    @property
    def harmonics(self) -> int:
        return len(self.phasors) - 1

    @property
    def dc(self) -> float:
        return float(self.phasors[0].real)

    @property
    def fundamental(self) -> complex:
        return complex(self.phasors[1])

    def magnitude(self, k: int) -> float:
        return float(abs(self.phasors[k]))

    def to_time(self, n: int) -> np.ndarray:
        """Waveform on n equidistant samples of one period (n > 2K)."""
        if n <= 2 * self.harmonics:
            raise ValueError(f"{n} samples cannot represent {self.harmonics} harmonics")
        spectrum = np.zeros(n // 2 + 1, dtype=complex)
        spectrum[0] = n * self.phasors[0].real
        spectrum[1 : self.harmonics + 1] = n * self.phasors[1:] / 2
        return np.fft.irfft(spectrum, n)

    @classmethod
    def from_time(cls, f0: float, samples, harmonics: int) -> "HarmonicSpectrum":
        samples = np.asarray(samples, dtype=float)
        n = len(samples)
        spectrum = np.fft.rfft(samples)
        phasors = np.empty(harmonics + 1, dtype=complex)
        phasors[0] = spectrum[0].real / n
        phasors[1:] = 2 * spectrum[1 : harmonics + 1] / n
        return cls(f0=f0, phasors=phasors)

    @classmethod
    def from_coefficients(cls, f0: float, coefficients) -> "HarmonicSpectrum":
        return cls(f0=f0, phasors=coefficients_to_phasors(coefficients))

    def __sub__(self, other: "HarmonicSpectrum") -> "HarmonicSpectrum":
        return HarmonicSpectrum(f0=self.f0, phasors=self.phasors - other.phasors)


def coefficients_to_phasors(coefficients) -> np.ndarray:
    coefficients = np.asarray(coefficients, dtype=float)
    return np.concatenate(
        [[complex(coefficients[0])], coefficients[1::2] + 1j * coefficients[2::2]]
    )


def phasors_to_coefficients(phasors) -> np.ndarray:
    phasors = np.asarray(phasors, dtype=complex)
    coefficients = np.empty(2 * len(phasors) - 1)
    coefficients[0] = phasors[0].real
    coefficients[1::2] = phasors[1:].real
    coefficients[2::2] = phasors[1:].imag
    return coefficients


def n_samples(harmonics: int, oversampling: int) -> int:
    return oversampling * (harmonics + 1)


def transform_matrices(harmonics: int, n: int, omega: float):
    """Real transforms between coefficient vectors and time samples.

    Returns (E, F, D):
        E (n x H): samples = E @ coefficients
        F (H x n): coefficients = F @ samples (exact for band-limited input)
        D (H x H): coefficients of the time derivative
    """
    size = 2 * harmonics + 1
    theta = 2 * np.pi * np.arange(n) / n
    to_time = np.empty((n, size))
    to_freq = np.empty((size, n))
    derivative = np.zeros((size, size))
    to_time[:, 0] = 1.0
    to_freq[0, :] = 1.0 / n
    for k in range(1, harmonics + 1):
        re, im = 2 * k - 1, 2 * k
        cos, sin = np.cos(k * theta), np.sin(k * theta)
        to_time[:, re] = cos
        to_time[:, im] = -sin
        to_freq[re, :] = 2.0 / n * cos
        to_freq[im, :] = -2.0 / n * sin
        derivative[re, im] = -k * omega
        derivative[im, re] = k * omega
    return to_time, to_freq, derivative
