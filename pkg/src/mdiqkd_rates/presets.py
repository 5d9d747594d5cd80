"""Named parameter presets and the curve registry used by sweeps and the CLI.

DV presets cover the standard detector classes: room-temperature
semiconductor APDs (``dv-practical``), the best self-differencing
InGaAs/InP APDs with typical and optimistic misalignment
(``dv-best-semi-low`` / ``dv-best-semi-high``), and cryogenic
superconducting-nanowire detectors (``dv-snspd``).  CV presets describe a
room-temperature coherent-state implementation with practical and ideal
reconciliation.  Two capacity curves bound any protocol over the same
channel.

Custom presets can be merged from a JSON file: a list of objects with keys
``name``, ``kind`` ("dv" or "cv") and the preset fields (``eta_d``, ``y0``,
``e_d``, ``f_e`` for DV; ``eta_d``, ``eps``, ``phi``, ``xi`` for CV).
"""
from __future__ import annotations

import json
from pathlib import Path

from .channel import RelayConfiguration
from .cv import CvParams
from .dv import DvDetectorPreset

DV_PRESETS: dict[str, DvDetectorPreset] = {
    "dv-practical": DvDetectorPreset(eta_d=0.145, y0=6e-6, e_d=0.015, f_e=1.16),
    "dv-best-semi-low": DvDetectorPreset(eta_d=0.55, y0=5e-4, e_d=0.015, f_e=1.16),
    "dv-best-semi-high": DvDetectorPreset(eta_d=0.55, y0=5e-4, e_d=0.001, f_e=1.16),
    "dv-snspd": DvDetectorPreset(eta_d=0.93, y0=1e-6, e_d=0.001, f_e=1.16),
}

CV_PRESETS: dict[str, CvParams] = {
    "cv-practical": CvParams(phi=60.0, xi=0.97, eta_d=0.98, epsilon=0.01),
    "cv-ideal-rec": CvParams(phi=60.0, xi=1.0, eta_d=0.98, epsilon=0.01),
}

CAPACITY_CURVES = ("capacity-lower", "capacity-upper")

PANELS: dict[str, RelayConfiguration] = {
    "a": RelayConfiguration.at_alice(),
    "b": RelayConfiguration.fixed_alice_leg(0.1),
    "c": RelayConfiguration.fixed_alice_leg(1.0),
    "d": RelayConfiguration.symmetric(),
}


def all_curve_names(extra: dict | None = None) -> list[str]:
    names = list(DV_PRESETS) + list(CV_PRESETS) + list(CAPACITY_CURVES)
    if extra:
        names += list(extra)
    return names


def resolve_curve(name: str, extra: dict | None = None):
    """Return ("dv"|"cv"|"capacity", preset-or-bound-tag) for a curve name."""
    if extra and name in extra:
        return extra[name]
    if name in DV_PRESETS:
        return "dv", DV_PRESETS[name]
    if name in CV_PRESETS:
        return "cv", CV_PRESETS[name]
    if name in CAPACITY_CURVES:
        return "capacity", name.split("-")[1]
    raise KeyError(f"unknown curve {name!r}; known: {', '.join(all_curve_names(extra))}")


def load_custom_presets(path: str | Path) -> dict:
    """Load extra presets from JSON into {name: (kind, preset)} form."""
    with open(path) as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ValueError("preset file must contain a JSON list")
    extra = {}
    for entry in entries:
        try:
            name = entry["name"]
            kind = entry["kind"]
            if kind == "dv":
                preset = DvDetectorPreset(
                    eta_d=float(entry["eta_d"]), y0=float(entry["y0"]),
                    e_d=float(entry["e_d"]), f_e=float(entry["f_e"]),
                )
            elif kind == "cv":
                preset = CvParams(
                    phi=float(entry["phi"]), xi=float(entry["xi"]),
                    eta_d=float(entry["eta_d"]), epsilon=float(entry["eps"]),
                )
            else:
                raise ValueError(f"kind must be 'dv' or 'cv', got {kind!r}")
        except KeyError as exc:
            raise ValueError(f"preset entry {entry!r} is missing key {exc}") from exc
        extra[name] = (kind, preset)
    return extra
