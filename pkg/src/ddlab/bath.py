"""Bath spectral densities, thermal weights, and the integrand weight.

Units: hbar = k_B = 1 throughout.  With the default cutoff omega_d = 1 all
frequencies are measured in units of the cutoff and times in units of the
bath correlation time t_C = 1/omega_d.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "OhmicBath",
    "ClassicalBath",
    "TabulatedSpectralDensity",
    "spectral_density",
    "thermal_weight",
    "integrand_weight",
]

# below this value of omega/(2T) the direct coth evaluation cancels badly
_COTH_SERIES_CUT = 1e-6


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic quantum bath J(w) = 2*alpha*w up to a hard cutoff omega_d.

    temperature = 0 means the zero-temperature bath (coth factor = 1).
    """

    alpha: float
    omega_d: float = 1.0
    temperature: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.omega_d <= 0:
            raise ValueError(f"omega_d must be > 0, got {self.omega_d}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def cutoff(self) -> float:
        return self.omega_d


@dataclass(frozen=True)
class TabulatedSpectralDensity:
    """Spectral density given by (omega, J) samples, linearly interpolated.

    omega must be strictly ascending and J nonnegative.  Beyond the last
    sample J is identically zero; below the first sample the first value
    is held constant.
    """

    omegas: np.ndarray
    values: np.ndarray
    temperature: float = 0.0

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        jv = np.asarray(self.values, dtype=float)
        if om.ndim != 1 or om.size < 2:
            raise ValueError("need at least two (omega, J) samples")
        if jv.shape != om.shape:
            raise ValueError("omega and J arrays must have the same length")
        if not np.all(np.diff(om) > 0):
            raise ValueError("omega samples must be strictly ascending")
        if np.any(om < 0):
            raise ValueError("omega samples must be nonnegative")
        if np.any(jv < 0):
            raise ValueError("J samples must be nonnegative")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        om.setflags(write=False)
        jv.setflags(write=False)
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "values", jv)

    @classmethod
    def from_csv(cls, path, temperature: float = 0.0) -> "TabulatedSpectralDensity":
        """Load from a two-column CSV with header ``omega,J``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["omega", "J"]:
                raise ValueError(f"{path}: expected header 'omega,J', got {header}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        om = np.array([r[0] for r in rows])
        jv = np.array([r[1] for r in rows])
        return cls(om, jv, temperature)

    @property
    def cutoff(self) -> float:
        return float(self.omegas[-1])


@dataclass(frozen=True)
class ClassicalBath:
    """Classical Gaussian noise described by a one-sided power spectrum.

    power_spectrum maps omega >= 0 to p(omega) >= 0 and must accept numpy
    arrays.  The spectrum is treated as zero above omega_max.  The
    autocovariance convention is g(tau) = (1/pi) * int_0^inf p(w) cos(w tau) dw.
    """

    power_spectrum: Callable[[np.ndarray], np.ndarray]
    omega_max: float

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError(f"omega_max must be > 0, got {self.omega_max}")
        # spot-check nonnegativity on a coarse grid; full validation is the
        # caller's responsibility for arbitrary callables
        probe = np.linspace(0.0, self.omega_max, 17)[1:]
        vals = np.asarray(self.power_spectrum(probe), dtype=float)
        if np.any(vals < 0):
            raise ValueError("power_spectrum is negative on [0, omega_max]")

    @property
    def cutoff(self) -> float:
        return self.omega_max


QuantumBath = Union[OhmicBath, TabulatedSpectralDensity]
Bath = Union[OhmicBath, TabulatedSpectralDensity, ClassicalBath]


def spectral_density(bath: QuantumBath, omega):
    """J(omega) for a quantum bath.  Accepts scalars or arrays."""
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0):
        raise ValueError("omega must be nonnegative")
    if isinstance(bath, OhmicBath):
        out = 2.0 * bath.alpha * om * (om <= bath.omega_d)
    elif isinstance(bath, TabulatedSpectralDensity):
        out = np.interp(om, bath.omegas, bath.values, right=0.0)
    else:
        raise TypeError(f"not a quantum bath: {type(bath).__name__}")
    return out if isinstance(omega, np.ndarray) else float(out)


def thermal_weight(temperature: float, omega):
    """coth(omega / (2 T)), the thermal occupation factor.

    Returns exactly 1 at T = 0.  For omega/(2T) < 1e-6 the series
    2T/omega + omega/(6T) is used to avoid catastrophic evaluation.
    Raises for omega = 0 at T > 0 where the weight diverges.
    """
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0):
        raise ValueError("omega must be nonnegative")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0.0:
        out = np.ones_like(om)
        return out if isinstance(omega, np.ndarray) else 1.0
    if np.any(om == 0):
        raise ValueError("thermal weight diverges at omega = 0 for T > 0")
    x = om / (2.0 * temperature)
    small = x < _COTH_SERIES_CUT
    out = np.empty_like(x)
    out[small] = 1.0 / x[small] + x[small] / 3.0
    out[~small] = 1.0 / np.tanh(x[~small])
    return out if isinstance(omega, np.ndarray) else float(out)


def integrand_weight(bath: Bath, omega):
    """The weight the decoherence integrals run against.

    Quantum baths give J(omega) * coth(omega/(2T)); classical baths give
    p(omega)/pi.  Accepts scalars or arrays.
    """
    if isinstance(bath, ClassicalBath):
        om = np.asarray(omega, dtype=float)
        if np.any(om < 0):
            raise ValueError("omega must be nonnegative")
        out = np.asarray(bath.power_spectrum(om), dtype=float) / np.pi
        out = np.where(om <= bath.omega_max, out, 0.0)
        return out if isinstance(omega, np.ndarray) else float(out)
    j = spectral_density(bath, omega)
    if bath.temperature == 0.0:
        return j
    return j * thermal_weight(bath.temperature, omega)
