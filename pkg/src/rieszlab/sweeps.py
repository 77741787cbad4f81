"""Shared log-grid sweeps and growth heuristics used by the structural checks."""
from __future__ import annotations

import numpy as np

DEFAULT_LO = 1e-8
DEFAULT_HI = 1e8


def log_grid(lo: float = DEFAULT_LO, hi: float = DEFAULT_HI, points_per_decade: int = 8) -> np.ndarray:
    """Log-spaced evaluation grid, endpoints included."""
    if not (0.0 < lo < hi):
        raise ValueError("log_grid needs 0 < lo < hi")
    decades = np.log10(hi / lo)
    count = int(round(decades * points_per_decade)) + 1
    return np.logspace(np.log10(lo), np.log10(hi), count)


def decade_sup_growth(t: np.ndarray, ratios: np.ndarray, factor: float = 1.5) -> bool:
    """True when the sup of `ratios` over the top decade of `t` exceeds the sup
    over the decade below it by more than `factor` (a still-growing tail)."""
    finite = np.isfinite(ratios)
    if not finite.any():
        return True
    t, ratios = t[finite], ratios[finite]
    top = t.max()
    last = ratios[t > top / 10.0]
    prev = ratios[(t <= top / 10.0) & (t > top / 100.0)]
    if last.size == 0 or prev.size == 0:
        return False
    return float(last.max()) > factor * float(prev.max())


def doubling_sup(fn, grid: np.ndarray, growth_factor: float = 1.5):
    """Sup over the grid of fn(2t)/fn(t) plus an unboundedness flag.

    The flag is raised when the ratio overflows somewhere on the grid or when
    the per-decade sup is still growing by more than `growth_factor` between
    the top two decades.  Returns (value, unbounded, witness_t).
    """
    t = np.asarray(grid, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        lo_v = np.asarray(fn(t), dtype=float)
        hi_v = np.asarray(fn(2.0 * t), dtype=float)
    if np.any((lo_v <= 0.0) & np.isfinite(lo_v)):
        bad = t[(lo_v <= 0.0) & np.isfinite(lo_v)][0]
        raise ValueError(f"doubling_sup: function is not positive at t={bad!r}")
    with np.errstate(invalid="ignore"):
        ratios = hi_v / lo_v
    finite = np.isfinite(ratios)
    overflowed = bool(np.any(~np.isfinite(hi_v) & np.isfinite(lo_v)))
    if not finite.any():
        return float("inf"), True, float(t[0])
    idx = int(np.nanargmax(np.where(finite, ratios, -np.inf)))
    value = float(ratios[idx])
    unbounded = overflowed or decade_sup_growth(t[finite], ratios[finite], growth_factor)
    return value, unbounded, float(t[idx])
