"""Rate-curve figures: one series per curve on a logarithmic rate axis."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# keep text as text so series labels survive in the SVG output
matplotlib.rcParams["svg.fonttype"] = "none"

DEFAULT_RATE_RANGE = (1e-8, 10.0)

_STYLE = {
    "dv-practical": dict(color="#8c510a"),
    "dv-best-semi-low": dict(color="#bf812d", linestyle="--"),
    "dv-best-semi-high": dict(color="#bf812d"),
    "dv-snspd": dict(color="#35978f"),
    "cv-practical": dict(color="#c51b7d"),
    "cv-ideal-rec": dict(color="#7b3294"),
    "capacity-lower": dict(color="#4d4d4d", linestyle=":"),
    "capacity-upper": dict(color="#4d4d4d", linestyle="--"),
}


def render_rate_plot(records, path, overlay=None, rate_range=DEFAULT_RATE_RANGE,
                     title=None):
    """Render clamped rates versus distance; zero/NaN rates are masked out.

    Overlay points (user-supplied measurements) are drawn as squares and
    never participate in any computation.
    """
    curves: dict[str, list] = {}
    for rec in records:
        curves.setdefault(rec.curve_id, []).append(rec)

    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    for curve_id in sorted(curves):
        recs = sorted(curves[curve_id], key=lambda r: r.d_tot_km)
        xs = [r.d_tot_km for r in recs if r.rate_clamped > 0]
        ys = [r.rate_clamped for r in recs if r.rate_clamped > 0]
        style = _STYLE.get(curve_id, {})
        ax.plot(xs, ys, label=curve_id, **style)
    if overlay:
        ax.plot([p[0] for p in overlay], [p[1] for p in overlay],
                marker="s", linestyle="none", color="black", markersize=5,
                label="measured")
    ax.set_yscale("log")
    ax.set_ylim(*rate_range)
    ax.set_xlabel("total distance (km)")
    ax.set_ylabel("secret-key rate (bits per relay use)")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
