"""Asymptotic secret-key rate of polarisation-encoded DV-MDI-QKD.

The model assumes infinite decoy states and signals: the single-photon
yield and phase-error rate entering the key formula are the true ones, so

    R = P11 * Y11 * (1 - H2(eX11)) - QZ * f_e * H2(EZ)

with P11 the probability that both parties emit exactly one photon,
Y11/eX11 the single-photon yield and X-basis error, and QZ/EZ the
weak-coherent-pulse gain and QBER in the key basis.  The relay performs a
linear-optics Bell-state measurement with four threshold detectors (a
polarising beam splitter per output port); detector efficiency eta_d is
folded into the leg transmissivities and each detector dark-clicks with
probability y0 per gate.

Misalignment is modelled by a polarisation rotation on each arm in front
of the relay with sin^2(2*tau) = e_d*(2 - e_d), i.e. a per-photon flip
probability of e_d/2, which reproduces the (1 - e_d)^2 coincidence factor
of the single-photon error formula.  The same rotation applied coherently
to phase-randomised weak coherent pulses gives the closed-form gain/QBER
below; both are checked against the Monte Carlo detector simulation in
``dv_mc``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import i0e

from .errors import UndefinedQberError

# Intensity search domain for the coarse grid (mean photon numbers).
MU_GRID_MIN = 1e-3
MU_GRID_MAX = 1.0
MU_GRID_SIZE = 50


def binary_entropy(x):
    """Shannon entropy of a bit with probability ``x``, in bits (0*log0 = 0)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    out = np.zeros_like(arr)
    inner = (arr > 0) & (arr < 1)
    xi = arr[inner]
    out[inner] = -xi * np.log2(xi) - (1 - xi) * np.log2(1 - xi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DvDetectorPreset:
    """Threshold-detector parameter set for the relay.

    eta_d: detector efficiency; y0: dark-click probability per detector per
    gate; e_d: intrinsic misalignment error; f_e: error-correction
    inefficiency (>= 1).
    """

    eta_d: float
    y0: float
    e_d: float
    f_e: float

    def __post_init__(self):
        if not 0 < self.eta_d <= 1:
            raise ValueError("eta_d must be in (0, 1]")
        if not 0 <= self.y0 < 1:
            raise ValueError("y0 must be in [0, 1)")
        if not 0 <= self.e_d < 0.5:
            raise ValueError("e_d must be in [0, 0.5)")
        if self.f_e < 1:
            raise ValueError("f_e must be >= 1")


@dataclass(frozen=True)
class IntensityPair:
    """Mean photon numbers of Alice's and Bob's signal pulses."""

    mu_a: float
    mu_b: float

    def __post_init__(self):
        if not (0 < self.mu_a < np.inf and 0 < self.mu_b < np.inf):
            raise ValueError("intensities must be positive and finite")


@dataclass(frozen=True)
class DvRateBreakdown:
    p_z11: float
    y_z11: float
    e_x11: float
    q_z: float
    e_z: float
    rate_raw: float
    rate_clamped: float
    dark_only: bool = False  # e_x11 pinned to 1/2 because the yield is dark-count-only


def _check_eta(eta_a, eta_b):
    if np.any(np.asarray(eta_a) < 0) or np.any(np.asarray(eta_a) > 1):
        raise ValueError("eta_a must be in [0, 1]")
    if np.any(np.asarray(eta_b) < 0) or np.any(np.asarray(eta_b) > 1):
        raise ValueError("eta_b must be in [0, 1]")


def single_photon_yield(eta_a: float, eta_b: float, preset: DvDetectorPreset) -> float:
    """Z-basis yield for single-photon inputs on both arms."""
    _check_eta(eta_a, eta_b)
    a = eta_a * preset.eta_d
    b = eta_b * preset.eta_d
    y0 = preset.y0
    return (1 - y0) ** 2 * (
        4 * y0**2 * (1 - a) * (1 - b)
        + 2 * y0 * (a + b - 1.5 * a * b)
        + 0.5 * a * b
    )


def single_photon_error_x(eta_a: float, eta_b: float, preset: DvDetectorPreset) -> float:
    """X-basis error rate for single-photon inputs, clamped to [0, 1/2].

    Returns 1/2 when the conditioning yield vanishes (no signal reaches the
    relay and dark counts are absent, so the error is maximal by
    convention).
    """
    _check_eta(eta_a, eta_b)
    y_x11 = single_photon_yield(eta_a, eta_b, preset)
    if y_x11 <= 0.0:
        return 0.5
    a = eta_a * preset.eta_d
    b = eta_b * preset.eta_d
    val = 0.5 - (1 - preset.y0) ** 2 * (1 - preset.e_d) ** 2 * a * b / (4 * y_x11)
    return float(min(max(val, 0.0), 0.5))


def _bessel_i0(x):
    # I0(x) = i0e(x)*exp(x); i0e keeps large arguments finite before the product.
    return i0e(x) * np.exp(x)


def _wcp_event_rates(eta_a, eta_b, mu_a, mu_b, preset: DvDetectorPreset):
    """Conditional gains given equal / unequal key bits (broadcasts over mu arrays).

    Derived by averaging the four threshold-detector click probabilities of
    the rotated coherent pulses over the random relative phase; the phase
    integrals reduce to modified Bessel functions I0.
    """
    lam_a = np.asarray(mu_a, dtype=float) * eta_a * preset.eta_d
    lam_b = np.asarray(mu_b, dtype=float) * eta_b * preset.eta_d
    g1 = 1.0 - preset.y0
    mu_tot = lam_a + lam_b
    x = np.sqrt(lam_a * lam_b)
    ed = preset.e_d
    s2 = ed / 2.0          # sin^2(tau), per-arm rotation
    c2 = 1.0 - s2
    p = c2 * lam_a + s2 * lam_b
    q = s2 * lam_a + c2 * lam_b
    t = np.sqrt(ed * (2.0 - ed)) * x   # sin(2*tau) * sqrt(lam_a*lam_b)

    # bits unequal: the expected coincidence, degraded by rotation leakage
    gain_unequal = (
        2 * g1**2 * np.exp(-mu_tot / 2) * (1.0 + _bessel_i0(t))
        - 4 * g1**3 * (np.exp(-p - q / 2) + np.exp(-q - p / 2)) * _bessel_i0(t / 2)
        + 4 * g1**4 * np.exp(-mu_tot)
    )
    # bits equal: accidental coincidences (dark counts, rotation leakage)
    gain_equal = (
        2 * g1**2 * np.exp(-mu_tot / 2) * (_bessel_i0(x) + _bessel_i0((1 - ed) * x))
        - 4 * g1**3 * (
            np.exp(-(1 + c2) * mu_tot / 2) * _bessel_i0(s2 * x)
            + np.exp(-(1 + s2) * mu_tot / 2) * _bessel_i0(c2 * x)
        )
        + 4 * g1**4 * np.exp(-mu_tot)
    )
    return gain_equal, gain_unequal


def wcp_gain_qber(eta_a: float, eta_b: float, intensities: IntensityPair,
                  preset: DvDetectorPreset) -> tuple[float, float]:
    """Key-basis gain and QBER for phase-randomised weak coherent pulses.

    A successful relay announcement flags anti-correlated bits, so every
    announcement with equal bits is an error; the QBER is the equal-bits
    conditional gain over the total.
    """
    _check_eta(eta_a, eta_b)
    gain_equal, gain_unequal = _wcp_event_rates(
        eta_a, eta_b, intensities.mu_a, intensities.mu_b, preset
    )
    total = gain_equal + gain_unequal
    if total <= 0.0:
        raise UndefinedQberError("no successful relay events for these parameters")
    q_z = float(total / 2.0)
    e_z = float(gain_equal / total)
    return q_z, e_z


def _rate_arrays(eta_a, eta_b, mu_a, mu_b, preset: DvDetectorPreset):
    """Raw rate over intensity arrays (used by the optimiser grid)."""
    p11 = mu_a * mu_b * np.exp(-(mu_a + mu_b))
    y11 = single_photon_yield(eta_a, eta_b, preset)
    ex11 = single_photon_error_x(eta_a, eta_b, preset)
    gain_equal, gain_unequal = _wcp_event_rates(eta_a, eta_b, mu_a, mu_b, preset)
    total = gain_equal + gain_unequal
    q_z = total / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        e_z = np.where(total > 0, gain_equal / np.where(total > 0, total, 1.0), 0.5)
    return p11 * y11 * (1.0 - binary_entropy(ex11)) - q_z * preset.f_e * binary_entropy(e_z)


def dv_rate(eta_a: float, eta_b: float, intensities: IntensityPair,
            preset: DvDetectorPreset) -> DvRateBreakdown:
    """Secret-key rate in bits per relay use, raw and clamped at zero."""
    _check_eta(eta_a, eta_b)
    p11 = intensities.mu_a * intensities.mu_b * np.exp(-(intensities.mu_a + intensities.mu_b))
    y11 = single_photon_yield(eta_a, eta_b, preset)
    ex11 = single_photon_error_x(eta_a, eta_b, preset)
    dark_only = eta_a * eta_b == 0  # no signal coincidences; e_x11 rests on darks alone
    q_z, e_z = wcp_gain_qber(eta_a, eta_b, intensities, preset)
    rate = float(p11 * y11 * (1.0 - binary_entropy(ex11)) - q_z * preset.f_e * binary_entropy(e_z))
    return DvRateBreakdown(
        p_z11=float(p11),
        y_z11=float(y11),
        e_x11=float(ex11),
        q_z=q_z,
        e_z=e_z,
        rate_raw=rate,
        rate_clamped=max(rate, 0.0),
        dark_only=bool(dark_only),
    )


@dataclass(frozen=True)
class IntensityOptimum:
    intensities: IntensityPair
    rate: float
    no_positive_rate: bool
    breakdown: DvRateBreakdown


def optimize_intensities(eta_a: float, eta_b: float, preset: DvDetectorPreset) -> IntensityOptimum:
    """Maximise the rate over signal intensities.

    Coarse logarithmic grid followed by Nelder-Mead refinement in
    log-intensity space, so the result always dominates the seed grid.  If
    the rate is non-positive everywhere the optimum reports a zero rate
    with ``no_positive_rate`` set.
    """
    _check_eta(eta_a, eta_b)
    grid = np.geomspace(MU_GRID_MIN, MU_GRID_MAX, MU_GRID_SIZE)
    mu_a, mu_b = np.meshgrid(grid, grid, indexing="ij")
    rates = _rate_arrays(eta_a, eta_b, mu_a, mu_b, preset)
    k = np.unravel_index(int(np.argmax(rates)), rates.shape)
    x0 = np.log([mu_a[k], mu_b[k]])

    def objective(x):
        return -_rate_arrays(eta_a, eta_b, np.exp(x[0]), np.exp(x[1]), preset)

    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"xatol": 1e-7, "fatol": 1e-14, "maxiter": 600})
    best_x = res.x if -res.fun >= rates[k] else x0
    pair = IntensityPair(float(np.exp(best_x[0])), float(np.exp(best_x[1])))
    breakdown = dv_rate(eta_a, eta_b, pair, preset)
    if breakdown.rate_raw <= 0.0:
        return IntensityOptimum(pair, 0.0, True, breakdown)
    return IntensityOptimum(pair, breakdown.rate_raw, False, breakdown)
