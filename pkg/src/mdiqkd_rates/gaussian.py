"""Gaussian-state toolkit in shot-noise units (vacuum quadrature variance = 1).

Covariance matrices use the interleaved quadrature ordering
(q1, p1, q2, p2, ...), so the symplectic form is block-diagonal 2x2.
The module provides the symplectic spectrum, von Neumann entropies, the
two-mode attack normal form, the entanglement-based source, and the
post-relay conditional state obtained by mixing the travelling modes with
the attack modes on beamsplitters and measuring the two commuting Bell
quadratures q- and p+.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasurementError

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9

_Z2 = np.diag([1.0, -1.0])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for the (q1, p1, ...) ordering."""
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), w)


def symplectic_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, sorted descending.

    The values are the moduli of the eigenvalues of i*Omega*V, which come
    in pairs; one representative per mode is returned.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise ValueError("covariance matrix must be square with even dimension")
    if np.abs(matrix - matrix.T).max() > max(SYMMETRY_TOL, SYMMETRY_TOL * np.abs(matrix).max()):
        raise ValueError("covariance matrix must be symmetric")
    n = matrix.shape[0] // 2
    eigs = np.linalg.eigvals(symplectic_form(n) @ matrix)
    nu = np.sort(np.abs(eigs.imag))[::-1]
    return nu[::2].copy()


def bosonic_entropy(x):
    """Entropy contribution of one symplectic eigenvalue, in bits.

    h(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2), with
    h(1) = 0; values within PHYSICALITY_TOL below 1 are clamped to 1.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 1.0 - PHYSICALITY_TOL):
        raise ValueError("symplectic eigenvalue below 1 is unphysical")
    arr = np.maximum(arr, 1.0)
    out = np.zeros_like(arr)
    m = arr > 1.0
    xp = (arr[m] + 1.0) / 2.0
    xm = (arr[m] - 1.0) / 2.0
    out[m] = xp * np.log2(xp) - xm * np.log2(xm)
    return out if out.ndim else float(out)


@dataclass
class QuadratureCM:
    """Covariance matrix of an n-mode Gaussian state (optionally with mean)."""

    n_modes: int
    matrix: np.ndarray
    mean: np.ndarray | None = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape != (2 * self.n_modes, 2 * self.n_modes):
            raise ValueError("matrix shape does not match the mode count")
        if np.abs(self.matrix - self.matrix.T).max() > max(
            SYMMETRY_TOL, SYMMETRY_TOL * np.abs(self.matrix).max()
        ):
            raise ValueError("covariance matrix must be symmetric")

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.matrix)

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return bool(self.symplectic_eigenvalues().min() >= 1.0 - tol)


def von_neumann_entropy(cm: QuadratureCM) -> float:
    """Entropy of a Gaussian state in bits: sum of h over the symplectic spectrum."""
    nu = cm.symplectic_eigenvalues()
    if nu.min() < 1.0 - PHYSICALITY_TOL:
        raise ValueError("state is unphysical; entropy undefined")
    return float(np.sum(bosonic_entropy(np.maximum(nu, 1.0))))


@dataclass(frozen=True)
class TwoModeAttack:
    """Normal form of a correlated two-mode Gaussian environment.

    omega_a/omega_b are the thermal variances coupled to Alice's and Bob's
    links; g and g_prime correlate the environment's q and p quadratures.
    """

    omega_a: float
    omega_b: float
    g: float = 0.0
    g_prime: float = 0.0

    def covariance(self) -> np.ndarray:
        v = np.zeros((4, 4))
        v[:2, :2] = self.omega_a * np.eye(2)
        v[2:, 2:] = self.omega_b * np.eye(2)
        v[:2, 2:] = np.diag([self.g, self.g_prime])
        v[2:, :2] = np.diag([self.g, self.g_prime])
        return v


def pure_loss_attack() -> TwoModeAttack:
    return TwoModeAttack(1.0, 1.0, 0.0, 0.0)


def attack_is_physical(attack: TwoModeAttack, tol: float = PHYSICALITY_TOL) -> tuple[bool, float]:
    """Whether the normal form is a valid state, plus the eigenvalue margin."""
    nu_min = symplectic_eigenvalues(attack.covariance()).min()
    margin = float(nu_min - 1.0)
    return margin >= -tol, margin


@dataclass(frozen=True)
class EprSource:
    """Two-mode squeezed vacuum used in the entanglement-based picture."""

    mu: float  # quadrature variance of each arm; mu = modulation + 1

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("source variance must be >= 1")

    @classmethod
    def from_modulation(cls, phi: float) -> "EprSource":
        return cls(mu=phi + 1.0)

    def covariance(self) -> np.ndarray:
        c = math.sqrt(self.mu**2 - 1.0)
        v = np.zeros((4, 4))
        v[:2, :2] = self.mu * np.eye(2)
        v[2:, 2:] = self.mu * np.eye(2)
        v[:2, 2:] = c * _Z2
        v[2:, :2] = c * _Z2
        return v


def beamsplitter_symplectic(n_modes: int, i: int, j: int, eta: float) -> np.ndarray:
    """Beamsplitter of transmissivity eta mixing modes i and j.

    Mode i receives sqrt(eta)*a_i + sqrt(1-eta)*a_j.
    """
    if not 0 <= eta <= 1:
        raise ValueError("eta must be in [0, 1]")
    s = np.eye(2 * n_modes)
    c, r = math.sqrt(eta), math.sqrt(1.0 - eta)
    for k in range(2):
        s[2 * i + k, 2 * i + k] = c
        s[2 * i + k, 2 * j + k] = r
        s[2 * j + k, 2 * i + k] = -r
        s[2 * j + k, 2 * j + k] = c
    return s


def squeezer_symplectic(n_modes: int, i: int, r: float) -> np.ndarray:
    """Single-mode squeezer acting on mode i (q scaled by e^r)."""
    s = np.eye(2 * n_modes)
    s[2 * i, 2 * i] = math.exp(r)
    s[2 * i + 1, 2 * i + 1] = math.exp(-r)
    return s


def _condition_on_quadrature(v: np.ndarray, index: int) -> np.ndarray:
    """Gaussian update of the full matrix after ideal homodyne of one quadrature."""
    var = v[index, index]
    if var <= 0 or not np.isfinite(var):
        raise DegenerateMeasurementError("measured quadrature has singular variance")
    col = v[:, index]
    return v - np.outer(col, col) / var


# Mode layout of the relay model: 0=A (Alice kept), 1=a (Alice travel),
# 2=B (Bob kept), 3=b (Bob travel), 4/5 = attack modes.
_N_MODES = 6


def _pre_measurement_cm(eta_a: float, eta_b: float, attack: TwoModeAttack,
                        source: EprSource) -> np.ndarray:
    v = np.eye(2 * _N_MODES)
    epr = source.covariance()
    for k0, k1 in ((0, 1), (2, 3)):
        idx = np.r_[2 * k0:2 * k0 + 2, 2 * k1:2 * k1 + 2]
        v[np.ix_(idx, idx)] = epr
    v[8:12, 8:12] = attack.covariance()
    s = beamsplitter_symplectic(_N_MODES, 1, 4, eta_a) @ beamsplitter_symplectic(_N_MODES, 3, 5, eta_b)
    return s @ v @ s.T


def relay_conditional_state(eta_a: float, eta_b: float, attack: TwoModeAttack,
                            source: EprSource) -> QuadratureCM:
    """Conditional covariance of the kept modes (A, B) after the relay measurement.

    The travelling modes are mixed on a balanced beamsplitter and the relay
    homodynes q of the difference mode and p of the sum mode.  These
    quadratures commute, so the conditioning is a plain Gaussian (Schur
    complement) update and the conditional covariance is independent of the
    announced outcome.
    """
    if not (0 < eta_a <= 1 and 0 < eta_b <= 1):
        raise ValueError("transmissivities must be in (0, 1]")
    ok, margin = attack_is_physical(attack)
    if not ok:
        raise ValueError(f"attack is unphysical (margin {margin:.3e})")
    v = _pre_measurement_cm(eta_a, eta_b, attack, source)
    # balanced beamsplitter on the travelling modes: mode1 -> (a - b)/sqrt2,
    # mode3 -> (a + b)/sqrt2
    s = np.eye(2 * _N_MODES)
    c = math.sqrt(0.5)
    for k in range(2):
        s[2 + k, 2 + k] = c
        s[2 + k, 6 + k] = -c
        s[6 + k, 2 + k] = c
        s[6 + k, 6 + k] = c
    v = s @ v @ s.T
    v = _condition_on_quadrature(v, 2 * 1)      # q of the difference mode
    v = _condition_on_quadrature(v, 2 * 3 + 1)  # p of the sum mode
    idx = np.r_[0:2, 4:6]
    return QuadratureCM(2, v[np.ix_(idx, idx)])


def relay_quadrature_variances(eta_a: float, eta_b: float, attack: TwoModeAttack,
                               source: EprSource) -> tuple[float, float]:
    """Variances of the measured Bell quadratures q- and p+."""
    v_env_q = (
        (1 - eta_a) * attack.omega_a + (1 - eta_b) * attack.omega_b
        - 2.0 * math.sqrt((1 - eta_a) * (1 - eta_b)) * attack.g
    )
    v_env_p = (
        (1 - eta_a) * attack.omega_a + (1 - eta_b) * attack.omega_b
        + 2.0 * math.sqrt((1 - eta_a) * (1 - eta_b)) * attack.g_prime
    )
    s_q = ((eta_a + eta_b) * source.mu + v_env_q) / 2.0
    s_p = ((eta_a + eta_b) * source.mu + v_env_p) / 2.0
    return s_q, s_p


def equivalent_noise(eta_a: float, eta_b: float, attack: TwoModeAttack,
                     source: EprSource) -> tuple[float, float]:
    """Total equivalent input-referred noise chi and its excess part epsilon.

    The environment contribution to each measured Bell quadrature, referred
    to the channel input, defines per-quadrature equivalent noises; chi is
    their geometric mean and epsilon = chi - chi_loss vanishes exactly for
    the pure-loss attack.  The result is independent of the source
    modulation.
    """
    if eta_a * eta_b == 0:
        raise ValueError("equivalent noise diverges at zero transmissivity")
    s_q, s_p = relay_quadrature_variances(eta_a, eta_b, attack, source)
    v_q = 2.0 * s_q - (eta_a + eta_b) * source.mu
    v_p = 2.0 * s_p - (eta_a + eta_b) * source.mu
    chi_loss = 2.0 * (eta_a + eta_b) / (eta_a * eta_b)
    scale = (eta_a + eta_b) / (eta_a * eta_b)
    v0 = (1 - eta_a) + (1 - eta_b)
    chi_q = chi_loss + scale * (v_q - v0)
    chi_p = chi_loss + scale * (v_p - v0)
    if chi_q <= 0 or chi_p <= 0:
        raise ValueError("attack squeezes the relay quadratures below the input-referred floor")
    chi = math.sqrt(chi_q * chi_p)
    return chi, chi - chi_loss
