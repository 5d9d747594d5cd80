"""Secret-key rate of CV-MDI-QKD under worst-case two-mode Gaussian attacks.

The rate is R = xi * I_AB - chi_E.  Alice's and Bob's coherent-state
amplitudes interfere at the relay, which announces the outcome of a
continuous-variable Bell measurement; Eve controls a correlated two-mode
Gaussian environment in normal form (omega_a, omega_b, g, g').  For fixed
observed transmissivities and excess noise, Eve's Holevo information on
Alice's variable is maximised over the remaining attack freedom.

Key structural fact used by the optimiser: the conditional state of the
kept modes (and hence the Holevo bound, via purity of the global
conditional state) depends on the attack only through the variances of the
two measured Bell quadratures.  The four-parameter attack family therefore
collapses to the two input-referred noises (chi_q, chi_p), and the excess
noise constraint chi = sqrt(chi_q * chi_p) = chi_loss + eps leaves a single
search direction: the q/p noise split.  Its physical range is set by the
uncertainty relation of the two Bell quadratures, whose commutator is
proportional to eta_b - eta_a.

Relay detection efficiency is folded into Alice's transmissivity
(eta_a -> eta_a * eta_d), which lower-bounds the rate because the rate
decreases faster in eta_a than in eta_b.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DivergenceError, FormulaDomainError, InfeasibleNoiseError, NearSymmetricError
from .gaussian import (
    EprSource,
    TwoModeAttack,
    attack_is_physical,
    bosonic_entropy,
    equivalent_noise,
    pure_loss_attack,
)

# Near-symmetric dispatch threshold for the closed forms.
SYMMETRY_GUARD = 1e-9
# Operating point used for large-modulation (asymptotic) curve evaluation.
ASYMPTOTIC_MODULATION = 1e6
# Convergence of the closed-form checks requires h-arguments >= 1 up to tolerance.
H_ARG_TOL = 1e-6


@dataclass(frozen=True)
class CvParams:
    """Protocol parameters: modulation phi (SNU), reconciliation efficiency xi,
    relay detection efficiency eta_d, observed excess noise epsilon (SNU).

    ``holevo_target`` selects whose variable Eve is bounded on; the default
    is Alice's (direct reconciliation).
    """

    phi: float
    xi: float
    eta_d: float
    epsilon: float
    holevo_target: str = "alice"

    def __post_init__(self):
        if self.phi < 0:
            raise ValueError("phi must be >= 0")
        if not 0 <= self.xi <= 1:
            raise ValueError("xi must be in [0, 1]")
        if not 0 < self.eta_d <= 1:
            raise ValueError("eta_d must be in (0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.holevo_target not in ("alice", "bob"):
            raise ValueError("holevo_target must be 'alice' or 'bob'")


@dataclass(frozen=True)
class CvRateBreakdown:
    i_ab: float
    chi_e: float
    rate_raw: float
    rate_clamped: float
    attack: TwoModeAttack


def mutual_information(phi: float, chi: float) -> float:
    """Alice-Bob mutual information log2((phi + 1) / chi) in bits."""
    if phi < 0:
        raise ValueError("phi must be >= 0")
    if chi <= 0:
        raise ValueError("chi must be > 0")
    return math.log2((phi + 1.0) / chi)


def chi_loss(eta_a: float, eta_b: float) -> float:
    """Input-referred noise of the pure-loss channel pair."""
    if eta_a <= 0 or eta_b <= 0:
        raise ValueError("transmissivities must be positive")
    return 2.0 * (eta_a + eta_b) / (eta_a * eta_b)


def _h(x):
    return bosonic_entropy(x)


def closed_form_rate_asymmetric(eta_a: float, eta_b: float, epsilon: float = 0.0) -> float:
    """Large-modulation, ideal-reconciliation rate for distinct transmissivities."""
    if not (0 < eta_a <= 1 and 0 < eta_b <= 1):
        raise ValueError("transmissivities must be in (0, 1]")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if abs(eta_a - eta_b) <= SYMMETRY_GUARD * (eta_a + eta_b):
        raise NearSymmetricError(
            "legs are (near-)symmetric; use closed_form_rate_symmetric"
        )
    chi = chi_loss(eta_a, eta_b) + epsilon
    s = eta_a + eta_b
    d = abs(eta_a - eta_b)
    arg1 = eta_a * chi / s - 1.0
    arg2 = (eta_a * eta_b * chi - s * s) / (d * s)
    for arg in (arg1, arg2):
        if arg < 1.0 - H_ARG_TOL:
            raise FormulaDomainError(f"entropy argument {arg} below 1")
    arg1 = max(arg1, 1.0)
    arg2 = max(arg2, 1.0)
    return math.log2(2.0 * s / (math.e * d * chi)) + _h(arg1) - _h(arg2)


def closed_form_rate_symmetric(eta: float, epsilon: float = 0.0) -> float:
    """Large-modulation, ideal-reconciliation rate for equal legs."""
    if not 0 < eta <= 1:
        raise ValueError("eta must be in (0, 1]")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    chi = 4.0 / eta + epsilon
    if chi <= 4.0:
        raise DivergenceError("rate diverges as the equivalent noise approaches 4")
    return _h(chi / 2.0 - 1.0) + math.log2(16.0 / (math.e**2 * chi * (chi - 4.0)))


def closed_form_rate(eta_a: float, eta_b: float, epsilon: float = 0.0) -> float:
    """Dispatch between the asymmetric and symmetric closed forms."""
    try:
        return closed_form_rate_asymmetric(eta_a, eta_b, epsilon)
    except NearSymmetricError:
        return closed_form_rate_symmetric(0.5 * (eta_a + eta_b), epsilon)


# ---------------------------------------------------------------------------
# Worst-case attack search
# ---------------------------------------------------------------------------

def _conditional_blocks(eta_a, eta_b, mu, v_q, v_p):
    """Post-relay conditional covariance of (A, B) from the Bell-quadrature
    environment variances (v_q, v_p); broadcasts over arrays.

    Closed form of the Schur-complement update; validated against the
    constructive six-mode computation in gaussian.relay_conditional_state.
    """
    phz2 = mu * mu - 1.0
    s_q = ((eta_a + eta_b) * mu + v_q) / 2.0
    s_p = ((eta_a + eta_b) * mu + v_p) / 2.0
    va_q = mu - eta_a * phz2 / (2.0 * s_q)
    va_p = mu - eta_a * phz2 / (2.0 * s_p)
    vb_q = mu - eta_b * phz2 / (2.0 * s_q)
    vb_p = mu - eta_b * phz2 / (2.0 * s_p)
    c_q = np.sqrt(eta_a * eta_b) * phz2 / (2.0 * s_q)
    c_p = -np.sqrt(eta_a * eta_b) * phz2 / (2.0 * s_p)
    return va_q, va_p, vb_q, vb_p, c_q, c_p


def _holevo_from_blocks(va_q, va_p, vb_q, vb_p, c_q, c_p, target: str = "alice"):
    """Eve's Holevo bound from the conditional (A, B) covariance.

    The global conditional state is pure, so S(E|relay) = S(AB|relay) and
    S(E|relay, target) equals the entropy of the other party's mode after a
    heterodyne on the target mode.
    """
    det_a = va_q * va_p
    det_b = vb_q * vb_p
    det_c = c_q * c_p
    det_v = (va_q * vb_q - c_q**2) * (va_p * vb_p - c_p**2)
    delta = det_a + det_b + 2.0 * det_c
    disc = np.sqrt(np.maximum(delta**2 - 4.0 * det_v, 0.0))
    nu_plus = np.sqrt(np.maximum((delta + disc) / 2.0, 1.0))
    nu_minus = np.sqrt(np.maximum((delta - disc) / 2.0, 1.0))
    s_joint = bosonic_entropy(nu_plus) + bosonic_entropy(nu_minus)
    if target == "alice":
        w_q = vb_q - c_q**2 / (va_q + 1.0)
        w_p = vb_p - c_p**2 / (va_p + 1.0)
    else:
        w_q = va_q - c_q**2 / (vb_q + 1.0)
        w_p = va_p - c_p**2 / (vb_p + 1.0)
    nu_cond = np.sqrt(np.maximum(w_q * w_p, 1.0))
    return s_joint - bosonic_entropy(nu_cond)


def _attack_from_split(eta_a, eta_b, v_q, v_p):
    """A normal-form attack realising the Bell-quadrature variances (v_q, v_p).

    Uses equal thermal variances; the correlations then absorb the q/p
    asymmetry.  Returns None when that representative is unphysical.
    """
    w0 = (1.0 - eta_a) + (1.0 - eta_b)
    if w0 <= 0:
        if v_q > 1e-12 or v_p > 1e-12:
            return None
        return pure_loss_attack()
    k = math.sqrt((1.0 - eta_a) * (1.0 - eta_b))
    if k == 0:
        # one lossless link: single thermal mode, no correlations possible
        if abs(v_q - v_p) > 1e-9 * max(v_q, v_p, 1.0):
            return None
        omega = max(v_q / w0, 1.0)
        lossy_on_a = eta_a < 1.0
        attack = TwoModeAttack(omega if lossy_on_a else 1.0,
                               omega if not lossy_on_a else 1.0, 0.0, 0.0)
        return attack
    omega = max((v_q + v_p) / (2.0 * w0), 1.0)
    g = (w0 * omega - v_q) / (2.0 * k)
    g_p = (v_p - w0 * omega) / (2.0 * k)
    attack = TwoModeAttack(omega, omega, g, g_p)
    ok, _ = attack_is_physical(attack)
    if ok:
        return attack
    # give the correlations more thermal room
    for scale in (1.5, 2.0, 4.0, 8.0):
        cand = TwoModeAttack(omega * scale, omega * scale,
                             (w0 * omega * scale - v_q) / (2.0 * k),
                             (v_p - w0 * omega * scale) / (2.0 * k))
        ok, _ = attack_is_physical(cand)
        if ok:
            return cand
    return None


def _split_window(eta_a, eta_b, chi):
    """Feasible range of the q/p split parameter t (chi_q = chi * t).

    Positivity of the input-referred noises gives t in (beta/chi, chi/beta)
    with beta = (eta_a + eta_b)^2 / (eta_a * eta_b); the Bell-quadrature
    uncertainty product bounds chi_q + chi_p from above.
    """
    beta = (eta_a + eta_b) ** 2 / (eta_a * eta_b)
    scale = (eta_a + eta_b) / (eta_a * eta_b)
    delta2 = (eta_a - eta_b) ** 2
    s_max = (chi**2 + beta**2 - scale**2 * delta2) / beta
    if s_max < 2.0 * chi:  # only the symmetric split survives
        return 1.0, 1.0
    root = math.sqrt(s_max**2 - 4.0 * chi**2)
    t_lo = (s_max - root) / (2.0 * chi)
    t_hi = (s_max + root) / (2.0 * chi)
    return max(t_lo, beta / chi * (1 + 1e-12)), min(t_hi, chi / beta * (1 - 1e-12))


def worst_case_holevo(eta_a: float, eta_b: float, params: CvParams) -> tuple[float, TwoModeAttack]:
    """Maximal Holevo information compatible with the observed excess noise.

    Folds the relay detection efficiency into eta_a, then maximises over
    the physically achievable q/p noise splits at fixed chi = chi_loss +
    epsilon.  Returns the bound and a normal-form attack attaining it.
    """
    return _worst_case_holevo_folded(eta_a * params.eta_d, eta_b, params)


def _worst_case_holevo_folded(eta_a: float, eta_b: float, params: CvParams
                              ) -> tuple[float, TwoModeAttack]:
    if not (0 < eta_a <= 1 and 0 < eta_b <= 1):
        raise ValueError("transmissivities must be in (0, 1]")
    if params.epsilon > 0 and eta_a == 1.0 and eta_b == 1.0:
        raise InfeasibleNoiseError("lossless links admit no noise-injecting attack")
    mu = params.phi + 1.0
    cl = chi_loss(eta_a, eta_b)
    chi = cl + params.epsilon
    v0 = (1.0 - eta_a) + (1.0 - eta_b)
    scale = (eta_a + eta_b) / (eta_a * eta_b)

    def split_noise(t):
        v_q = v0 + (chi * t - cl) / scale
        v_p = v0 + (chi / t - cl) / scale
        return v_q, v_p

    def objective(t):
        v_q, v_p = split_noise(t)
        if v_q <= 0 or v_p <= 0:
            return np.inf
        if _attack_from_split(eta_a, eta_b, v_q, v_p) is None:
            return np.inf
        blocks = _conditional_blocks(eta_a, eta_b, mu, v_q, v_p)
        return -_holevo_from_blocks(*blocks, target=params.holevo_target)

    t_lo, t_hi = _split_window(eta_a, eta_b, chi)
    if t_hi <= t_lo:
        candidates = np.array([1.0])
    else:
        candidates = np.unique(np.concatenate((
            [1.0, t_lo, t_hi], np.geomspace(t_lo, t_hi, 65)
        )))
    values = np.array([objective(t) for t in candidates])
    if not np.isfinite(values).any():
        raise InfeasibleNoiseError(
            f"no physical attack reproduces epsilon={params.epsilon}"
        )
    best = int(np.argmin(values))
    t_best, f_best = float(candidates[best]), float(values[best])
    if t_hi > t_lo:
        lo = float(candidates[max(best - 1, 0)])
        hi = float(candidates[min(best + 1, len(candidates) - 1)])
        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        if np.isfinite(res.fun) and res.fun < f_best:
            t_best, f_best = float(res.x), float(res.fun)
    v_q, v_p = split_noise(t_best)
    attack = _attack_from_split(eta_a, eta_b, v_q, v_p)
    # confirm the attack reproduces the observed noise within tolerance
    chi_chk, _ = equivalent_noise(eta_a, eta_b, attack, EprSource(mu))
    if abs(chi_chk - chi) > 1e-6:
        raise InfeasibleNoiseError("constructed attack misses the target noise")
    return -f_best, attack


def general_rate(eta_a: float, eta_b: float, params: CvParams) -> CvRateBreakdown:
    """Rate xi * I_AB - chi_E at the worst-case attack, raw and clamped.

    The detection efficiency is folded into eta_a before all computations;
    I_AB uses the observed equivalent noise at the worst-case attack.
    """
    eta_a_eff = eta_a * params.eta_d
    chi_e, attack = _worst_case_holevo_folded(eta_a_eff, eta_b, params)
    chi, _ = equivalent_noise(eta_a_eff, eta_b, attack, EprSource(params.phi + 1.0))
    i_ab = mutual_information(params.phi, chi)
    rate = params.xi * i_ab - chi_e
    return CvRateBreakdown(
        i_ab=i_ab,
        chi_e=chi_e,
        rate_raw=rate,
        rate_clamped=max(rate, 0.0),
        attack=attack,
    )


def asymptotic_rate(eta_a: float, eta_b: float, params: CvParams) -> CvRateBreakdown:
    """Large-modulation worst-case rate, with xi applied to the net key yield.

    This is the protocol's asymptotic operating point (the regime of the
    closed forms and of the reported order-of-magnitude comparisons): the
    rate is evaluated at a modulation large enough that I_AB - chi_E has
    converged, and the reconciliation efficiency scales the extracted key.
    The finite-modulation rate at the preset parameters remains available
    through general_rate.
    """
    operating = replace(params, phi=ASYMPTOTIC_MODULATION, xi=1.0)
    breakdown = general_rate(eta_a, eta_b, operating)
    rate = params.xi * (breakdown.i_ab - breakdown.chi_e)
    return CvRateBreakdown(
        i_ab=breakdown.i_ab,
        chi_e=breakdown.chi_e,
        rate_raw=rate,
        rate_clamped=max(rate, 0.0),
        attack=breakdown.attack,
    )
