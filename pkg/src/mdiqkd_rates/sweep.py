"""Distance sweeps over the named rate curves, and their file outputs.

A sweep evaluates each requested curve on a grid of total Alice-Bob
distances for one relay placement (panel).  DV curves are intensity
optimised per point, CV curves are attack optimised at the asymptotic
operating point, and the capacity curves bound any protocol over the same
end-to-end channel.  Records are sorted by (curve, distance) and the CSV
and JSON emitters format deterministically, so identical sweeps produce
byte-identical files at any parallelism level.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cv, dv
from .channel import (
    secret_key_capacity_bounds,
    split_total_distance,
    transmissivity_from_distance,
)
from .errors import InfeasibleConfigError, UndefinedComparisonError
from .presets import PANELS, resolve_curve

CSV_HEADER = "d_tot_km,curve_id,rate_bits_per_use,rate_clamped,notes"


@dataclass(frozen=True)
class SweepSpec:
    panel: str
    d_min_km: float
    d_max_km: float
    steps: int
    curves: tuple[str, ...]
    attenuation_db_per_km: float = 0.2
    seed: int = 0
    spacing: str = "linear"  # or "log"

    def __post_init__(self):
        if self.panel not in PANELS:
            raise ValueError(f"panel must be one of {sorted(PANELS)}")
        if not self.d_min_km < self.d_max_km:
            raise ValueError("d_min must be < d_max")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if self.spacing not in ("linear", "log"):
            raise ValueError("spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.d_min_km <= 0:
            raise ValueError("log spacing requires d_min > 0")
        if not self.curves:
            raise ValueError("at least one curve is required")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.d_min_km, self.d_max_km, self.steps)
        return np.linspace(self.d_min_km, self.d_max_km, self.steps)


@dataclass(frozen=True)
class CurveRecord:
    d_tot_km: float
    curve_id: str
    rate_raw: float
    rate_clamped: float
    notes: str = ""
    aux: dict = field(default_factory=dict)


def _evaluate_point(task) -> CurveRecord:
    curve_id, resolved, d_tot, panel, attenuation = task
    config = PANELS[panel]
    try:
        d_a, d_b = split_total_distance(config, d_tot)
    except InfeasibleConfigError as exc:
        return CurveRecord(d_tot, curve_id, math.nan, math.nan, f"skipped: {exc}")
    eta_a = transmissivity_from_distance(d_a, attenuation)
    eta_b = transmissivity_from_distance(d_b, attenuation)
    kind, preset = resolved
    if kind == "dv":
        opt = dv.optimize_intensities(eta_a, eta_b, preset)
        notes = "no-positive-rate" if opt.no_positive_rate else ""
        aux = {"mu_a": opt.intensities.mu_a, "mu_b": opt.intensities.mu_b}
        return CurveRecord(d_tot, curve_id, opt.breakdown.rate_raw,
                           opt.breakdown.rate_clamped, notes, aux)
    if kind == "cv":
        breakdown = cv.asymptotic_rate(eta_a, eta_b, preset)
        attack = breakdown.attack
        aux = {"omega_a": attack.omega_a, "omega_b": attack.omega_b,
               "g": attack.g, "g_prime": attack.g_prime}
        return CurveRecord(d_tot, curve_id, breakdown.rate_raw,
                           breakdown.rate_clamped, "", aux)
    lower, upper = secret_key_capacity_bounds(eta_a * eta_b)
    value = lower if preset == "lower" else upper
    return CurveRecord(d_tot, curve_id, value, value, "")


def run_sweep(spec: SweepSpec, extra_presets: dict | None = None, jobs: int = 1
              ) -> list[CurveRecord]:
    """Evaluate every (curve, distance) point of the sweep.

    Infeasible panel/distance combinations are recorded as skipped rows.
    The result is deterministic for a given spec, independent of ``jobs``.
    """
    tasks = []
    for curve_id in spec.curves:
        resolved = resolve_curve(curve_id, extra_presets)
        for d_tot in spec.grid():
            tasks.append((curve_id, resolved, float(d_tot), spec.panel,
                          spec.attenuation_db_per_km))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_evaluate_point, tasks, chunksize=4))
    else:
        records = [_evaluate_point(t) for t in tasks]
    records.sort(key=lambda r: (r.curve_id, r.d_tot_km))
    return records


def compare_curves(records: list[CurveRecord], curve_x: str, curve_y: str,
                   d_tot_km: float) -> float:
    """log10 of the clamped-rate ratio of two curves at one grid distance."""

    def find(curve_id):
        for rec in records:
            if rec.curve_id == curve_id and math.isclose(rec.d_tot_km, d_tot_km,
                                                         rel_tol=0, abs_tol=1e-9):
                return rec
        raise UndefinedComparisonError(
            f"curve {curve_id!r} has no record at {d_tot_km} km")

    rx, ry = find(curve_x), find(curve_y)
    for rec in (rx, ry):
        if not (rec.rate_clamped > 0):
            raise UndefinedComparisonError(
                f"curve {rec.curve_id!r} has no positive rate at {d_tot_km} km")
    return math.log10(rx.rate_clamped / ry.rate_clamped)


def load_overlay_points(path) -> list[tuple[float, float]]:
    """Parse user-supplied measurement points: CSV d_tot_km,rate_bits_per_use."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "d_tot_km,rate_bits_per_use":
        raise ValueError("overlay file must start with header 'd_tot_km,rate_bits_per_use'")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"overlay line {lineno}: expected 2 fields, got {len(parts)}")
        try:
            d, rate = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ValueError(f"overlay line {lineno}: {exc}") from exc
        if rate < 0:
            raise ValueError(f"overlay line {lineno}: rates must be >= 0")
        points.append((d, rate))
    return points


def _fmt(value: float) -> str:
    return "%.10g" % value


def records_to_csv(records: list[CurveRecord]) -> str:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(",".join([
            _fmt(rec.d_tot_km), rec.curve_id, _fmt(rec.rate_raw),
            _fmt(rec.rate_clamped), rec.notes,
        ]))
    return "\n".join(lines) + "\n"


def records_to_json(records: list[CurveRecord]) -> str:
    payload = {"records": [asdict(rec) | {"rate_bits_per_use": rec.rate_raw}
                           for rec in records]}
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n"


def emit_outputs(records: list[CurveRecord], fmt: str, path,
                 overlay: list[tuple[float, float]] | None = None) -> list[str]:
    """Write the records in one format; returns the written file paths."""
    if not records:
        raise ValueError("refusing to emit empty record set")
    path = str(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write(records_to_csv(records))
        return [path]
    if fmt == "json":
        with open(path, "w", newline="") as fh:
            fh.write(records_to_json(records))
        return [path]
    if fmt == "svg":
        from .plotting import render_rate_plot
        render_rate_plot(records, path, overlay=overlay)
        return [path]
    raise ValueError(f"unknown output format {fmt!r}")
