"""Built-in test-field families.

Two flavors: nonnegative densities (inputs to the potential and maximal
operators) and smooth scalar fields (inputs to the representation and
embedding runs).  Random members are seeded and smoothed by an averaging
pass, so families are reproducible and diverse without being adversarial.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..fields import DomainGeometry, Grid, GridField

NONNEG_MEMBERS = ("ball-indicator", "cube-indicator", "gauss", "trig")
SMOOTH_MEMBERS = ("linear", "trig", "gauss")


def _reference(dom: DomainGeometry, grid: Grid):
    if dom.reference_ball is not None:
        center, radius = dom.reference_ball
        return np.asarray(center, dtype=float), float(radius)
    lo = np.array([b[0] for b in grid.bbox])
    hi = np.array([b[1] for b in grid.bbox])
    return 0.5 * (lo + hi), float(0.25 * np.min(hi - lo))


def _smoothed_noise(grid: Grid, seed: int, signed: bool) -> np.ndarray:
    rng = np.random.default_rng(seed)
    raw = rng.random(grid.res)
    if signed:
        raw = 2.0 * raw - 1.0
    return ndimage.uniform_filter(raw, size=3, mode="nearest")


def nonneg_family(dom: DomainGeometry, grid: Grid, mask: np.ndarray,
                  seeds=(0,), members=None) -> list:
    """Named nonnegative fields: indicators, a Gaussian bump, a positive trig
    polynomial, and one smoothed random field per seed."""
    center, radius = _reference(dom, grid)
    pts = grid.centers()
    dist = np.linalg.norm(pts - center, axis=-1).reshape(grid.res)
    cheb = np.max(np.abs(pts - center), axis=-1).reshape(grid.res)

    catalogue = {
        "ball-indicator": lambda: (dist < 0.5 * radius).astype(float),
        "cube-indicator": lambda: (cheb < 0.5 * radius).astype(float),
        "gauss": lambda: np.exp(-0.5 * (dist / (radius / 3.0)) ** 2),
        "trig": lambda: _positive_trig(grid),
    }
    chosen = list(members) if members is not None else list(NONNEG_MEMBERS)
    out = []
    for name in chosen:
        if name not in catalogue:
            raise ValueError(f"unknown nonnegative family member: {name!r}")
        out.append((name, GridField(grid, mask, catalogue[name]())))
    for seed in seeds:
        out.append((f"random-{int(seed)}",
                    GridField(grid, mask, _smoothed_noise(grid, int(seed), signed=False))))
    return out


def _positive_trig(grid: Grid) -> np.ndarray:
    pts = grid.centers()
    prod = np.ones(pts.shape[0])
    for a, (lo, hi) in enumerate(grid.bbox):
        prod *= np.sin(np.pi * (pts[:, a] - lo) / (hi - lo))
    return (1.0 + 0.5 * prod).reshape(grid.res)


def smooth_family(dom: DomainGeometry, grid: Grid, mask: np.ndarray,
                  seeds=(0,), members=None) -> list:
    """Named smooth fields: a linear ramp, a tensor trig polynomial, a
    Gaussian bump, and one doubly smoothed signed random field per seed."""
    center, radius = _reference(dom, grid)
    pts = grid.centers()
    dist = np.linalg.norm(pts - center, axis=-1).reshape(grid.res)

    def trig():
        prod = np.ones(pts.shape[0])
        for a in range(grid.n):
            prod *= np.sin(np.pi * pts[:, a])
        return prod.reshape(grid.res)

    catalogue = {
        "linear": lambda: pts[:, 0].reshape(grid.res).copy(),
        "trig": trig,
        "gauss": lambda: np.exp(-0.5 * (dist / (radius / 2.0)) ** 2),
    }
    chosen = list(members) if members is not None else list(SMOOTH_MEMBERS)
    out = []
    for name in chosen:
        if name not in catalogue:
            raise ValueError(f"unknown smooth family member: {name!r}")
        out.append((name, GridField(grid, mask, catalogue[name]())))
    for seed in seeds:
        smooth = ndimage.uniform_filter(_smoothed_noise(grid, int(seed), signed=True),
                                        size=3, mode="nearest")
        out.append((f"random-{int(seed)}", GridField(grid, mask, smooth)))
    return out
