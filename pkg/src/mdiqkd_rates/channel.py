"""Fibre link budgets, relay placements and secret-key capacity bounds.

Distances are in km, attenuation in dB/km, transmissivities dimensionless.
The relay splits the total Alice-Bob distance into two fibre legs; each leg
is an independent lossy channel and the equivalent end-to-end channel has
transmissivity eta_a * eta_b.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergenceError, InfeasibleConfigError

DEFAULT_ATTENUATION_DB_PER_KM = 0.2


def transmissivity_from_distance(d_km: float, attenuation_db_per_km: float = DEFAULT_ATTENUATION_DB_PER_KM) -> float:
    """Transmissivity of a fibre of length ``d_km`` at the given attenuation."""
    if d_km < 0:
        raise ValueError(f"distance must be >= 0, got {d_km}")
    if attenuation_db_per_km <= 0:
        raise ValueError(f"attenuation must be > 0, got {attenuation_db_per_km}")
    return 10.0 ** (-attenuation_db_per_km * d_km / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """Two fibre legs meeting at the relay."""

    d_a_km: float
    d_b_km: float
    attenuation_db_per_km: float = DEFAULT_ATTENUATION_DB_PER_KM

    def __post_init__(self):
        if self.d_a_km < 0 or self.d_b_km < 0:
            raise ValueError("leg lengths must be >= 0")
        if self.attenuation_db_per_km <= 0:
            raise ValueError("attenuation must be > 0")

    @property
    def eta_a(self) -> float:
        return transmissivity_from_distance(self.d_a_km, self.attenuation_db_per_km)

    @property
    def eta_b(self) -> float:
        return transmissivity_from_distance(self.d_b_km, self.attenuation_db_per_km)

    @property
    def eta_tot(self) -> float:
        """End-to-end transmissivity of the equivalent point-to-point channel."""
        return self.eta_a * self.eta_b


@dataclass(frozen=True)
class RelayConfiguration:
    """Placement rule for the untrusted relay.

    kind is one of ``relay-at-alice`` (zero-length Alice leg),
    ``fixed-alice-leg`` (constant Alice leg of ``d_fixed_km``) or
    ``symmetric`` (both parties equidistant from the relay).
    """

    kind: str
    d_fixed_km: float = 0.0

    _KINDS = ("relay-at-alice", "fixed-alice-leg", "symmetric")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown relay configuration {self.kind!r}")
        if self.kind == "fixed-alice-leg" and self.d_fixed_km <= 0:
            raise ValueError("fixed-alice-leg requires d_fixed_km > 0")

    @classmethod
    def at_alice(cls) -> "RelayConfiguration":
        return cls("relay-at-alice")

    @classmethod
    def fixed_alice_leg(cls, d_fixed_km: float) -> "RelayConfiguration":
        return cls("fixed-alice-leg", d_fixed_km)

    @classmethod
    def symmetric(cls) -> "RelayConfiguration":
        return cls("symmetric")


def split_total_distance(config: RelayConfiguration, d_tot_km: float) -> tuple[float, float]:
    """Split a total Alice-Bob distance into (d_a, d_b) legs for a relay placement."""
    if d_tot_km < 0:
        raise ValueError(f"total distance must be >= 0, got {d_tot_km}")
    if config.kind == "relay-at-alice":
        return 0.0, d_tot_km
    if config.kind == "symmetric":
        return d_tot_km / 2.0, d_tot_km / 2.0
    if d_tot_km < config.d_fixed_km:
        raise InfeasibleConfigError(
            f"total distance {d_tot_km} km is shorter than the fixed Alice leg "
            f"{config.d_fixed_km} km"
        )
    return config.d_fixed_km, d_tot_km - config.d_fixed_km


def secret_key_capacity_bounds(eta_tot: float) -> tuple[float, float]:
    """Lower and upper bounds on the secret-key capacity of a lossy channel.

    The lower bound is the reverse-coherent-information rate
    -log2(1 - eta), the upper bound log2((1 + eta) / (1 - eta)); both in
    bits per channel use and both increasing in the transmissivity.
    """
    if eta_tot < 0 or eta_tot > 1:
        raise ValueError(f"eta_tot must be in [0, 1), got {eta_tot}")
    if eta_tot == 1:
        raise DivergenceError("capacity bounds diverge at unit transmissivity")
    lower = math.log2(1.0 / (1.0 - eta_tot))
    upper = math.log2((1.0 + eta_tot) / (1.0 - eta_tot))
    return lower, upper
