"""Figure rendering: PNGs saved next to the CSV output.

The CSVs remain the machine-readable contract; figures are a convenience
view of the same series.  Uses the Agg backend so rendering works headless.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", name).strip("-")


def _series_label(s) -> str:
    if not s.params:
        return s.name
    keep = {k: v for k, v in s.params.items() if k in ("field", "alpha", "beta", "n")}
    if not keep:
        return s.name
    return ", ".join(f"{k}={v}" for k, v in sorted(keep.items()))


def _numeric(xs):
    try:
        return [float(x) for x in xs]
    except (TypeError, ValueError):
        return None


def render_figures(report, outdir) -> list:
    outdir = Path(outdir)
    paths = []
    groups = {}
    for s in report.series:
        groups.setdefault(s.name, []).append(s)

    for name, group in sorted(groups.items()):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        drew = False
        finite_vals = []
        for s in group:
            xs = _numeric(s.xs)
            vals = _numeric(s.values)
            if xs is None or vals is None or not xs:
                continue
            ax.plot(xs, vals, marker="o", markersize=3, linewidth=1.2,
                    label=_series_label(s))
            finite_vals.extend(v for v in vals if math.isfinite(v))
            drew = True
        if not drew:
            plt.close(fig)
            continue
        if finite_vals and min(finite_vals) > 0 \
                and max(finite_vals) / min(finite_vals) > 1e3:
            ax.set_yscale("log")
        ax.set_xlabel("x")
        ax.set_ylabel(name)
        ax.set_title(f"{report.experiment}: {name}")
        if len(group) > 1:
            ax.legend(fontsize=7)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = outdir / f"{report.experiment}_{_slug(name)}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        paths.append(path)

    if report.experiment == "conditions":
        p = _frontier_figure(report, outdir)
        if p is not None:
            paths.append(p)

    for name, field in sorted(getattr(report, "field_dumps", {}).items()):
        if field.grid.n != 2:
            continue
        paths.append(_heatmap(report.experiment, name, field, outdir))
    return paths


def _frontier_figure(report, outdir: Path):
    """Admissible/inadmissible cells in the (alpha, p) plane with the analytic curve."""
    cells = []
    for s in report.series:
        if s.name != "admissible":
            continue
        for p, ok in zip(s.xs, s.values):
            cells.append((float(s.params["alpha"]), float(p), ok > 0.5,
                          int(s.params["n"])))
    if not cells:
        return None
    n = cells[0][3]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for alpha, p, ok, _ in cells:
        ax.plot(alpha, p, "o", color="tab:green" if ok else "tab:red", markersize=6)
    alphas = np.linspace(1.0, 1.0 + 1.0 / (n - 1) - 1e-3, 200)
    ax.plot(alphas, n / (n - alphas * (n - 1)), "k--", linewidth=1.2,
            label="p = n/(n - alpha(n-1))")
    ax.set_xlabel("alpha")
    ax.set_ylabel("p")
    ax.set_ylim(0.0, max(p for _, p, _, _ in cells) + 0.5)
    ax.set_title("admissibility frontier")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = outdir / "conditions_frontier.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _heatmap(experiment: str, name: str, field, outdir: Path):
    shown = np.where(field.mask, field.values, np.nan)
    (x0, x1), (y0, y1) = field.grid.bbox
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    im = ax.imshow(shown.T, origin="lower", extent=(x0, x1, y0, y1),
                   aspect="equal", cmap="viridis")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(f"{experiment}: {name}")
    fig.tight_layout()
    path = outdir / f"{experiment}_field_{_slug(name)}.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
