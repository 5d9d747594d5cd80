"""Monte Carlo simulation of the relay's linear-optics Bell-state measurement.

Independent oracle for the analytic DV formulas: four threshold detectors
(one polarising beam splitter per output port of a balanced beam splitter),
per-detector dark clicks, per-photon misalignment, and the two-detector
coincidence patterns that identify the two distinguishable Bell outcomes
({1H,1V}/{2H,2V} for the symmetric outcome, {1H,2V}/{1V,2H} for the
antisymmetric one).

Single-photon trials route photons according to the Bell-outcome
statistics of the post-rotation polarisation pair (same-polarisation pairs
bunch into one detector); weak-coherent-pulse trials propagate the rotated
coherent amplitudes through the beam splitter network, draw a uniform
relative phase per trial, and click each detector independently with the
threshold-detector probability 1 - (1-y0) exp(-intensity).

Randomness is counter-based: each fixed-size chunk of trials draws from a
Philox stream keyed by (seed, stream, chunk index), and the reductions are
integer counts, so estimates are byte-identical regardless of evaluation
order or parallelism.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .dv import (
    DvDetectorPreset,
    IntensityPair,
    single_photon_error_x,
    single_photon_yield,
    wcp_gain_qber,
)

CHUNK_TRIALS = 1 << 18
MIN_TRIALS = 10_000

# Philox stream tags (second key word) for the independent sub-simulations.
_STREAM_SINGLE_Z = 0
_STREAM_SINGLE_X = 1
_STREAM_WCP = 2


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo probability estimate with its binomial standard error.

    ``n_events`` is the number of trials the estimate conditions on (all
    trials for unconditional probabilities, successful announcements for
    conditional error rates).  Estimates with no conditioning events are
    marked undefined via NaN.
    """

    mean: float
    std_error: float
    n_trials: int
    seed: int
    n_events: int

    @property
    def defined(self) -> bool:
        return not math.isnan(self.mean)


def _estimate(successes: int, n: int, n_trials: int, seed: int) -> McEstimate:
    if n == 0:
        return McEstimate(math.nan, math.nan, n_trials, seed, 0)
    p = successes / n
    return McEstimate(p, math.sqrt(p * (1.0 - p) / n), n_trials, seed, n)


def _chunk_rng(seed: int, stream: int, chunk: int) -> Generator:
    return Generator(Philox(key=[np.uint64(seed & (2**64 - 1)),
                                 np.uint64((stream << 32) | chunk)]))


def _chunks(n_trials: int):
    done = 0
    chunk = 0
    while done < n_trials:
        m = min(CHUNK_TRIALS, n_trials - done)
        yield chunk, m
        done += m
        chunk += 1


_PSI_PLUS = ((0, 1), (2, 3))    # detector index pairs: 0=1H, 1=1V, 2=2H, 3=2V
_PSI_MINUS = ((0, 3), (1, 2))


def _classify(clicks: np.ndarray):
    """Success mask and symmetric-outcome mask from the 4-detector clicks."""
    exactly_two = clicks.sum(axis=1) == 2
    sym = (clicks[:, 0] & clicks[:, 1]) | (clicks[:, 2] & clicks[:, 3])
    antisym = (clicks[:, 0] & clicks[:, 3]) | (clicks[:, 1] & clicks[:, 2])
    return exactly_two & (sym | antisym), sym


def _place(clicks: np.ndarray, rows: np.ndarray, detectors: np.ndarray):
    clicks[rows, detectors[rows]] = True


def simulate_single_photon(eta_a: float, eta_b: float, preset: DvDetectorPreset,
                           n_trials: int, seed: int) -> tuple[McEstimate, McEstimate]:
    """Estimate the single-photon key-basis yield and X-basis error rate."""
    if n_trials < MIN_TRIALS:
        raise ValueError(f"n_trials must be >= {MIN_TRIALS}")
    a = eta_a * preset.eta_d
    b = eta_b * preset.eta_d
    p_flip = preset.e_d / 2.0
    y0 = preset.y0

    succ_z = 0
    succ_x = 0
    err_x = 0
    for chunk, m in _chunks(n_trials):
        # --- key (Z) basis: yield only ---
        u = _chunk_rng(seed, _STREAM_SINGLE_Z, chunk).random((m, 12))
        arr_a = u[:, 0] < a
        arr_b = u[:, 1] < b
        pol_a = (u[:, 2] < 0.5) ^ (u[:, 4] < p_flip)  # False = H
        pol_b = (u[:, 3] < 0.5) ^ (u[:, 5] < p_flip)
        clicks = u[:, 8:12] < y0
        both = arr_a & arr_b
        port_a = np.where(u[:, 6] < 0.5, 0, 2)
        port_b = np.where(u[:, 7] < 0.5, 0, 2)
        # same polarisation: the pair bunches into a single detector
        rows = np.where(both & (pol_a == pol_b))[0]
        _place(clicks, rows, port_a + pol_a.astype(int))
        # orthogonal polarisations: the photons route independently
        rows = np.where(both & (pol_a != pol_b))[0]
        _place(clicks, rows, port_a + pol_a.astype(int))
        _place(clicks, rows, port_b + pol_b.astype(int))
        rows = np.where(arr_a & ~arr_b)[0]
        _place(clicks, rows, port_a + pol_a.astype(int))
        rows = np.where(~arr_a & arr_b)[0]
        _place(clicks, rows, port_b + pol_b.astype(int))
        ok, _ = _classify(clicks)
        succ_z += int(ok.sum())

        # --- conjugate (X) basis: conditional error rate ---
        u = _chunk_rng(seed, _STREAM_SINGLE_X, chunk).random((m, 14))
        arr_a = u[:, 0] < a
        arr_b = u[:, 1] < b
        bit_a = u[:, 2] < 0.5
        bit_b = u[:, 3] < 0.5
        x_a = bit_a ^ ((u[:, 4] < p_flip) & arr_a)
        x_b = bit_b ^ ((u[:, 5] < p_flip) & arr_b)
        clicks = u[:, 8:12] < y0
        both = arr_a & arr_b
        bell_branch = u[:, 6] < 0.5   # the two detectable Bell outcomes carry half the weight
        port = np.where(u[:, 7] < 0.5, 0, 2)
        pol_r = (u[:, 12] < 0.5).astype(int)
        # equal X bits + detectable branch: symmetric outcome, both photons in one port
        rows = np.where(both & (x_a == x_b) & bell_branch)[0]
        _place(clicks, rows, port)
        _place(clicks, rows, port + 1)
        # unequal X bits + detectable branch: antisymmetric outcome, opposite ports
        rows = np.where(both & (x_a != x_b) & bell_branch)[0]
        _place(clicks, rows, port)                      # H click
        _place(clicks, rows, np.where(port == 0, 3, 1))  # V click in the other port
        # undetectable branch: the pair bunches with a uniform polarisation
        rows = np.where(both & ~bell_branch)[0]
        _place(clicks, rows, port + pol_r)
        # single arrivals measure as a uniform polarisation at a uniform port
        rows = np.where(arr_a & ~arr_b)[0]
        _place(clicks, rows, port + pol_r)
        rows = np.where(~arr_a & arr_b)[0]
        _place(clicks, rows, np.where(u[:, 13] < 0.5, 0, 2) + pol_r)
        ok, sym = _classify(clicks)
        declared_equal = sym  # symmetric outcome flags correlated X bits
        succ_x += int(ok.sum())
        err_x += int((ok & (declared_equal != (bit_a == bit_b))).sum())

    y_est = _estimate(succ_z, n_trials, n_trials, seed)
    e_est = _estimate(err_x, succ_x, n_trials, seed)
    return y_est, e_est


def simulate_wcp(eta_a: float, eta_b: float, intensities: IntensityPair,
                 preset: DvDetectorPreset, n_trials: int, seed: int
                 ) -> tuple[McEstimate, McEstimate]:
    """Estimate the weak-coherent-pulse key-basis gain and QBER."""
    if n_trials < MIN_TRIALS:
        raise ValueError(f"n_trials must be >= {MIN_TRIALS}")
    lam_a = intensities.mu_a * eta_a * preset.eta_d
    lam_b = intensities.mu_b * eta_b * preset.eta_d
    tau = math.asin(math.sqrt(preset.e_d / 2.0))
    c, s = math.cos(tau), math.sin(tau)
    y0 = preset.y0

    succ = 0
    err = 0
    for chunk, m in _chunks(n_trials):
        u = _chunk_rng(seed, _STREAM_WCP, chunk).random((m, 8))
        bit_a = u[:, 0] < 0.5  # False = H
        bit_b = u[:, 1] < 0.5
        # only the relative optical phase matters for the intensities
        amp_a = math.sqrt(lam_a) * np.exp(2j * np.pi * u[:, 2])
        amp_b = math.sqrt(lam_b)
        # rotated polarisation vectors (H, V components)
        va_h = np.where(bit_a, -s, c)
        va_v = np.where(bit_a, c, s)
        vb_h = np.where(bit_b, -s, c)
        vb_v = np.where(bit_b, c, s)
        u_h, u_v = amp_a * va_h, amp_a * va_v
        w_h, w_v = amp_b * vb_h, amp_b * vb_v
        intens = np.stack([
            np.abs(u_h - w_h) ** 2, np.abs(u_v - w_v) ** 2,
            np.abs(u_h + w_h) ** 2, np.abs(u_v + w_v) ** 2,
        ], axis=1) / 2.0
        clicks = u[:, 4:8] < (1.0 - (1.0 - y0) * np.exp(-intens))
        ok, _ = _classify(clicks)
        succ += int(ok.sum())
        err += int((ok & (bit_a == bit_b)).sum())  # announcements flag unequal bits

    q_est = _estimate(succ, n_trials, n_trials, seed)
    e_est = _estimate(err, succ, n_trials, seed)
    return q_est, e_est


@dataclass(frozen=True)
class McComparison:
    quantity: str
    analytic: float
    estimate: McEstimate
    n_sigma: float

    @property
    def consistent(self) -> bool:
        return self.estimate.defined and abs(self.n_sigma) <= 3.0


def validate_against_analytic(eta_a: float, eta_b: float, intensities: IntensityPair,
                              preset: DvDetectorPreset, n_trials: int, seed: int
                              ) -> list[McComparison]:
    """Compare every analytic DV quantity with its Monte Carlo estimate."""
    rows = []
    y_est, e_est = simulate_single_photon(eta_a, eta_b, preset, n_trials, seed)
    q_est, qber_est = simulate_wcp(eta_a, eta_b, intensities, preset, n_trials, seed)
    q_an, qber_an = wcp_gain_qber(eta_a, eta_b, intensities, preset)
    pairs = [
        ("Y_Z11", single_photon_yield(eta_a, eta_b, preset), y_est),
        ("e_X11", single_photon_error_x(eta_a, eta_b, preset), e_est),
        ("Q_Z", q_an, q_est),
        ("E_Z", qber_an, qber_est),
    ]
    for name, analytic, est in pairs:
        if est.defined and est.std_error > 0:
            z = (est.mean - analytic) / est.std_error
        else:
            z = math.inf
        rows.append(McComparison(name, analytic, est, z))
    return rows
