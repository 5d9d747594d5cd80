"""Command-line interface: distance sweeps, curve comparison, oracle validation.

Exit codes: 0 success, 1 computation infeasibility, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dv_mc
from .dv import DvDetectorPreset, IntensityPair
from .errors import UndefinedComparisonError
from .presets import (
    CAPACITY_CURVES,
    CV_PRESETS,
    DV_PRESETS,
    PANELS,
    all_curve_names,
    load_custom_presets,
)
from .sweep import (
    SweepSpec,
    compare_curves,
    emit_outputs,
    load_overlay_points,
    run_sweep,
)

DEFAULT_CURVES = ",".join(list(DV_PRESETS) + list(CV_PRESETS) + list(CAPACITY_CURVES))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdiqkd",
                                     description="Secret-key-rate curves for MDI-QKD")
    sub = parser.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sweep", help="Sweep rates over total distance and emit files.")
    s.add_argument("--panel", choices=sorted(PANELS), default="a",
                   help="relay placement: a=relay at Alice, b=100 m Alice leg, "
                        "c=1 km Alice leg, d=symmetric")
    s.add_argument("--dmin", type=float, default=0.5, help="minimum total distance (km)")
    s.add_argument("--dmax", type=float, default=25.0, help="maximum total distance (km)")
    s.add_argument("--steps", type=int, default=50, help="number of grid points")
    s.add_argument("--curves", default=DEFAULT_CURVES,
                   help="comma-separated curve names (see `mdiqkd presets`)")
    s.add_argument("--atten", type=float, default=0.2, help="fibre attenuation (dB/km)")
    s.add_argument("--seed", type=int, default=0, help="seed recorded with the sweep")
    s.add_argument("--spacing", choices=("linear", "log"), default="linear")
    s.add_argument("--out", default="sweep", help="output base path (no extension)")
    s.add_argument("--format", dest="formats", default="csv",
                   help="comma-separated outputs: csv,json,svg (svg implies csv)")
    s.add_argument("--overlay", default=None,
                   help="CSV of measured points to draw on the plot")
    s.add_argument("--config", default=None, help="JSON file with extra presets")
    s.add_argument("--jobs", type=int, default=1, help="parallel workers")

    c = sub.add_parser("compare", help="log10 rate ratio of two curves at one distance.")
    c.add_argument("--in", dest="infile", required=True, help="sweep CSV to read")
    c.add_argument("--x", required=True, help="numerator curve id")
    c.add_argument("--y", required=True, help="denominator curve id")
    c.add_argument("--d", type=float, required=True, help="total distance (km)")

    v = sub.add_parser("validate-mc",
                       help="Check the analytic DV formulas against the Monte Carlo oracle.")
    v.add_argument("--trials", type=int, default=1_000_000, help="trials per estimate")
    v.add_argument("--seed", type=int, default=2024, help="base seed")
    v.add_argument("--tuples", type=int, default=5, help="number of random parameter tuples")

    p = sub.add_parser("presets", help="List the named curves and their parameters.")
    p.add_argument("--config", default=None, help="JSON file with extra presets")
    return parser


def _parse_csv_records(path):
    """Reload sweep records from a CSV written by `sweep`."""
    from .sweep import CSV_HEADER, CurveRecord

    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} is not a sweep CSV (bad header)")
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        d, curve_id, raw, clamped, notes = line.split(",", 4)
        records.append(CurveRecord(float(d), curve_id, float(raw), float(clamped), notes))
    return records


def _cmd_sweep(args) -> int:
    extra = load_custom_presets(args.config) if args.config else None
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    for fmt in formats:
        if fmt not in ("csv", "json", "svg"):
            print(f"error: unknown format {fmt!r}", file=sys.stderr)
            return 2
    if "svg" in formats and "csv" not in formats:
        formats.append("csv")  # figures always ship with the delimited table
    try:
        spec = SweepSpec(
            panel=args.panel, d_min_km=args.dmin, d_max_km=args.dmax,
            steps=args.steps, curves=tuple(args.curves.split(",")),
            attenuation_db_per_km=args.atten, seed=args.seed, spacing=args.spacing,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    overlay = load_overlay_points(args.overlay) if args.overlay else None
    try:
        records = run_sweep(spec, extra_presets=extra, jobs=args.jobs)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    written = []
    for fmt in formats:
        out = Path(f"{args.out}.{fmt}")
        out.parent.mkdir(parents=True, exist_ok=True)
        written += emit_outputs(records, fmt, out, overlay=overlay)
    for path in written:
        print(path)
    return 0


def _cmd_compare(args) -> int:
    records = _parse_csv_records(args.infile)
    try:
        gap = compare_curves(records, args.x, args.y, args.d)
    except UndefinedComparisonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print("%.6f" % gap)
    return 0


def _cmd_validate_mc(args) -> int:
    rng = np.random.default_rng(args.seed)
    all_ok = True
    header = f"{'tuple':>5} {'quantity':>7} {'analytic':>13} {'monte carlo':>13} " \
             f"{'std err':>10} {'z':>7}  result"
    print(header)
    print("-" * len(header))
    for i in range(args.tuples):
        eta_a, eta_b = rng.uniform(0.3, 0.95, 2)
        preset = DvDetectorPreset(
            eta_d=rng.uniform(0.1, 0.9),
            y0=10.0 ** rng.uniform(-6, -2.5),
            e_d=rng.uniform(0.002, 0.05),
            f_e=1.16,
        )
        intensities = IntensityPair(*rng.uniform(0.1, 0.7, 2))
        rows = dv_mc.validate_against_analytic(
            eta_a, eta_b, intensities, preset, args.trials, seed=args.seed + 1000 * i)
        for row in rows:
            ok = row.consistent
            all_ok &= ok
            print(f"{i:>5} {row.quantity:>7} {row.analytic:>13.6e} "
                  f"{row.estimate.mean:>13.6e} {row.estimate.std_error:>10.2e} "
                  f"{row.n_sigma:>7.2f}  {'pass' if ok else 'FAIL'}")
    print("overall:", "pass" if all_ok else "FAIL")
    return 0 if all_ok else 1


def _cmd_presets(args) -> int:
    print("DV presets (eta_d, y0, e_d, f_e):")
    for name, p in DV_PRESETS.items():
        print(f"  {name:<18} {p.eta_d:g}, {p.y0:g}, {p.e_d:g}, {p.f_e:g}")
    print("CV presets (phi, xi, eta_d, epsilon):")
    for name, p in CV_PRESETS.items():
        print(f"  {name:<18} {p.phi:g}, {p.xi:g}, {p.eta_d:g}, {p.epsilon:g}")
    print("capacity curves:")
    for name in CAPACITY_CURVES:
        print(f"  {name}")
    if args.config:
        extra = load_custom_presets(args.config)
        print("custom presets:")
        for name, (kind, preset) in extra.items():
            print(f"  {name:<18} [{kind}] {preset}")
    print("panels: a=relay at Alice, b=100 m Alice leg, c=1 km Alice leg, d=symmetric")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd == "sweep":
            return _cmd_sweep(args)
        if args.cmd == "compare":
            return _cmd_compare(args)
        if args.cmd == "validate-mc":
            return _cmd_validate_mc(args)
        if args.cmd == "presets":
            return _cmd_presets(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
