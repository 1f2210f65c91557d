"""Dephasing phase, decay exponent and signal under a pulse sequence.

One code path serves quantum and classical baths and every sequence
including n = 0 (free evolution):

    phi_n(t) = int_0^wc  J(w) / (2 w^2) * x_n(w t) dw        (quantum only)
    chi_n(t) = int_0^wc  W(w) / (4 w^2) * |y_n(w t)|^2 dw
    s_n(t)   = cos(2 phi_n) * exp(-2 chi_n)

where W is the bath integrand weight (J coth for quantum, p/pi for
classical) and wc the bath cutoff.  The integrands extend continuously to
w = 0; below w = 1e-8 * wc they are evaluated from the small-z expansions
of the filters to avoid 0/0 cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import Bath, ClassicalBath, integrand_weight, spectral_density
from .filters import (
    x_factor_array,
    x_taylor_moments,
    y_abs_sq_array,
    y_taylor_moments,
)
from .quadrature import QuadratureError, QuadratureSpec, integrate_adaptive
from .sequences import PulseSequence

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "CoherencePoint",
    "CoherenceCurve",
    "chi",
    "phase",
    "signal",
    "coherence_curve",
]

# exp(-2*350) is at the edge of the double range; larger chi is reported
# as a saturated zero signal
CHI_MAX = 350.0

# the Taylor branch of the integrands engages below either threshold; the
# z cut also protects small-t evaluations where the direct filter sums are
# noise-limited for large pulse counts
_SMALL_OMEGA_FRACTION = 1e-8
_SMALL_Z = 1e-5


@dataclass(frozen=True)
class CoherencePoint:
    """Signal sample at one time: t, phase, decay exponent, s, quad error."""

    t: float
    phi: float
    chi: float
    signal: float
    quad_error: float = 0.0
    saturated: bool = False


@dataclass(frozen=True)
class CoherenceCurve:
    """Coherence samples over an ascending time grid."""

    points: tuple

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    def signals(self) -> np.ndarray:
        return np.array([p.signal for p in self.points])


def _initial_panels(t: float, omega_cut: float) -> int:
    # the filter factors oscillate on scale pi/t in omega (term frequencies
    # in |y|^2 are bounded by t); two panels per period, floor of 16
    return max(16, math.ceil(omega_cut * t / math.pi))


def _chi_raw(seq: PulseSequence, bath: Bath, t: float, quad: QuadratureSpec):
    """Unclamped decay exponent with its quadrature error bound."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 0.0, 0.0
    wc = bath.cutoff
    w_switch = _SMALL_OMEGA_FRACTION * wc
    s1, s2, s3 = y_taylor_moments(seq)
    quartic = s2 * s2 / 4.0 - s1 * s3 / 3.0

    def f(w):
        out = np.empty_like(w)
        small = (w < w_switch) | (w * t < _SMALL_Z)
        big = ~small
        if np.any(big):
            wb = w[big]
            ysq = y_abs_sq_array(seq, wb * t)
            out[big] = integrand_weight(bath, wb) * ysq / (4.0 * wb * wb)
        if np.any(small):
            ws = w[small]
            z2 = (ws * t) ** 2
            out[small] = integrand_weight(bath, ws) * (t * t / 4.0) * (s1 * s1 + z2 * quartic)
        return out

    try:
        val, err, _ = integrate_adaptive(f, 0.0, wc, quad, _initial_panels(t, wc))
    except QuadratureError as exc:
        raise QuadratureError(
            f"chi(t={t:g}): {exc}", estimate=exc.estimate, error_bound=exc.error_bound
        ) from exc
    return max(val, 0.0), err


def chi(seq: PulseSequence, bath: Bath, t: float,
        quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Decay exponent chi_n(t) >= 0, clamped at 350."""
    val, _ = _chi_raw(seq, bath, t, quad)
    return min(val, CHI_MAX)


def phase(seq: PulseSequence, bath: Bath, t: float,
          quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Deterministic phase phi_n(t); exactly zero for classical baths."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if isinstance(bath, ClassicalBath) or t == 0.0:
        return 0.0
    wc = bath.cutoff
    w_switch = _SMALL_OMEGA_FRACTION * wc
    x1, x3 = x_taylor_moments(seq)

    def f(w):
        out = np.empty_like(w)
        small = (w < w_switch) | (w * t < _SMALL_Z)
        big = ~small
        if np.any(big):
            wb = w[big]
            out[big] = spectral_density(bath, wb) * x_factor_array(seq, wb * t) / (2.0 * wb * wb)
        if np.any(small):
            ws = w[small]
            zs = ws * t
            out[small] = spectral_density(bath, ws) * (zs * x1 - zs**3 * x3 / 6.0) / (2.0 * ws * ws)
        return out

    try:
        val, _, _ = integrate_adaptive(f, 0.0, wc, quad, _initial_panels(t, wc))
    except QuadratureError as exc:
        raise QuadratureError(
            f"phase(t={t:g}): {exc}", estimate=exc.estimate, error_bound=exc.error_bound
        ) from exc
    return val


def signal(seq: PulseSequence, bath: Bath, t: float,
           quad: QuadratureSpec = QuadratureSpec()) -> CoherencePoint:
    """Full coherence point s_n(t) = cos(2 phi) exp(-2 chi)."""
    phi = phase(seq, bath, t, quad)
    chi_val, err = _chi_raw(seq, bath, t, quad)
    if chi_val >= CHI_MAX:
        return CoherencePoint(t=float(t), phi=phi, chi=CHI_MAX, signal=0.0,
                              quad_error=err, saturated=True)
    s = math.cos(2.0 * phi) * math.exp(-2.0 * chi_val)
    return CoherencePoint(t=float(t), phi=phi, chi=chi_val, signal=s, quad_error=err)


def coherence_curve(seq: PulseSequence, bath: Bath, t_grid,
                    quad: QuadratureSpec = QuadratureSpec()) -> CoherenceCurve:
    """Evaluate the signal over an ascending, nonnegative time grid."""
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size < 1:
        raise ValueError("t_grid must be a nonempty 1-d sequence of times")
    if np.any(ts < 0):
        raise ValueError("t_grid times must be nonnegative")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    return CoherenceCurve(points=tuple(signal(seq, bath, float(t), quad) for t in ts))
