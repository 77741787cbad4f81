"""Uniform cell-center grids, masked domains, and discrete fields.

Cells are axis-aligned boxes; values live at cell centers and integrals are
midpoint sums (value * cellvol over masked cells).  Summations run in the
flattened C order of the grid so results are reproducible bit for bit.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .orlicz import OrliczFunction, luxemburg_norm


@dataclass(frozen=True)
class Grid:
    """Uniform cell-center grid over an axis-aligned bounding box."""

    bbox: tuple
    res: tuple

    def __post_init__(self):
        bbox = tuple((float(lo), float(hi)) for lo, hi in self.bbox)
        res = tuple(int(r) for r in self.res)
        if len(bbox) != len(res):
            raise ValueError("bbox and res must agree on dimension")
        if any(hi <= lo for lo, hi in bbox):
            raise ValueError("bbox sides must have positive length")
        if any(r < 1 for r in res):
            raise ValueError("resolution must be at least 1 cell per axis")
        object.__setattr__(self, "bbox", bbox)
        object.__setattr__(self, "res", res)

    @property
    def n(self) -> int:
        return len(self.bbox)

    @property
    def spacings(self) -> tuple:
        return tuple((hi - lo) / r for (lo, hi), r in zip(self.bbox, self.res))

    @property
    def cellvol(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def diameter(self) -> float:
        return math.sqrt(sum((hi - lo) ** 2 for lo, hi in self.bbox))

    def axes(self) -> list:
        return [lo + (np.arange(r) + 0.5) * h
                for (lo, hi), r, h in zip(self.bbox, self.res, self.spacings)]

    def centers(self) -> np.ndarray:
        """All cell centers as an (N, n) array in flattened C order."""
        return _grid_centers(self)

    def cell_index(self, x) -> Optional[tuple]:
        """Index of the cell containing x, or None when x lies outside the box."""
        x = np.asarray(x, dtype=float)
        idx = []
        for a, ((lo, hi), r, h) in enumerate(zip(self.bbox, self.res, self.spacings)):
            if not (lo <= x[a] <= hi):
                return None
            i = int(min(r - 1, math.floor((x[a] - lo) / h)))
            idx.append(i)
        return tuple(idx)


@lru_cache(maxsize=16)
def _grid_centers(grid: Grid) -> np.ndarray:
    mesh = np.meshgrid(*grid.axes(), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class DomainGeometry:
    """Open region described by a vectorized membership predicate.

    `inside` takes an (..., n) array of points and returns booleans; it is
    false outside `bbox`.  `reference_ball` is (center, radius) with the
    radius equal to the distance from the center to the boundary, used by the
    representation and embedding runs.
    """

    label: str
    inside: Callable
    bbox: tuple
    reference_ball: Optional[tuple] = None


def discretize(dom: DomainGeometry, res) -> tuple:
    """Grid over dom.bbox plus the boolean mask of cell centers inside dom.

    `res` is either a per-axis tuple or a single int applied to every axis;
    at least 8 cells per axis are required, and a mask with no cells raises.
    """
    n = len(dom.bbox)
    if np.isscalar(res):
        res = (int(res),) * n
    res = tuple(int(r) for r in res)
    if any(r < 8 for r in res):
        raise ValueError("discretize needs at least 8 cells per axis")
    grid = Grid(tuple(dom.bbox), res)
    mask = np.asarray(dom.inside(grid.centers()), dtype=bool).reshape(grid.res)
    if not mask.any():
        raise ValueError(f"discretization of {dom.label!r} produced an empty mask")
    return grid, mask


@dataclass(frozen=True, eq=False)
class GridField:
    """Values sampled at cell centers, meaningful on the masked cells."""

    grid: Grid
    mask: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.mask.shape != self.grid.res or self.values.shape != self.grid.res:
            raise ValueError("mask/values shape must match the grid resolution")
        if not np.isfinite(self.values[self.mask]).all():
            raise ValueError("field values must be finite on the mask")

    @property
    def masked_values(self) -> np.ndarray:
        return self.values[self.mask]

    def zero_extended(self) -> np.ndarray:
        """Values with off-mask cells forced to zero."""
        return np.where(self.mask, self.values, 0.0)

    @classmethod
    def from_function(cls, grid: Grid, mask: np.ndarray, fn: Callable) -> "GridField":
        vals = np.asarray(fn(grid.centers()), dtype=float).reshape(grid.res)
        return cls(grid, mask, vals)

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(self.grid, self.mask, values)


# -- differential and integral operations --------------------------------------

def _axis_derivative(vals: np.ndarray, mask: np.ndarray, h: float, axis: int) -> np.ndarray:
    """One-axis derivative: central differences inside the mask, second-order
    one-sided at mask boundaries, first-order when only one neighbor exists."""
    v = np.moveaxis(vals, axis, 0)
    m = np.moveaxis(mask, axis, 0)
    out = np.zeros_like(v)

    def shifted(arr, k, fill):
        res = np.full_like(arr, fill)
        if k > 0:
            res[:-k] = arr[k:]
        elif k < 0:
            res[-k:] = arr[:k]
        else:
            res = arr.copy()
        return res

    mp1 = shifted(m, 1, False)
    mm1 = shifted(m, -1, False)
    mp2 = shifted(m, 2, False)
    mm2 = shifted(m, -2, False)
    vp1 = shifted(v, 1, 0.0)
    vm1 = shifted(v, -1, 0.0)
    vp2 = shifted(v, 2, 0.0)
    vm2 = shifted(v, -2, 0.0)

    central = m & mp1 & mm1
    fwd2 = m & ~mm1 & mp1 & mp2
    bwd2 = m & ~mp1 & mm1 & mm2
    fwd1 = m & ~mm1 & mp1 & ~mp2
    bwd1 = m & ~mp1 & mm1 & ~mm2

    out[central] = (vp1[central] - vm1[central]) / (2.0 * h)
    out[fwd2] = (-3.0 * v[fwd2] + 4.0 * vp1[fwd2] - vp2[fwd2]) / (2.0 * h)
    out[bwd2] = (3.0 * v[bwd2] - 4.0 * vm1[bwd2] + vm2[bwd2]) / (2.0 * h)
    out[fwd1] = (vp1[fwd1] - v[fwd1]) / h
    out[bwd1] = (v[bwd1] - vm1[bwd1]) / h
    return np.moveaxis(out, 0, axis)


def gradient_magnitude(u: GridField) -> GridField:
    """Euclidean norm of the finite-difference gradient, masked like u."""
    sq = np.zeros(u.grid.res)
    for axis, h in enumerate(u.grid.spacings):
        d = _axis_derivative(u.values, u.mask, h, axis)
        sq += d * d
    out = np.sqrt(sq)
    out[~u.mask] = 0.0
    return GridField(u.grid, u.mask, out)


def lp_norm(u: GridField, p: float) -> float:
    """(sum |u|**p * cellvol)**(1/p) over masked cells."""
    if p < 1.0:
        raise ValueError("lp_norm needs p >= 1")
    mv = np.abs(u.masked_values)
    return float(np.sum(mv ** p) * u.grid.cellvol) ** (1.0 / p)


def llogl_norm(u: GridField) -> float:
    """Luxemburg norm against t*log(e+t) (the p=1 normalization scale)."""
    return luxemburg_norm(u, OrliczFunction.llogl()).value


def domain_average(u: GridField) -> float:
    """Mean of the masked values (midpoint average over the domain)."""
    return float(u.masked_values.mean())


def ball_average(u: GridField, center, radius: float) -> float:
    """Average of masked cells with centers in the closed ball; raises when empty."""
    center = np.asarray(center, dtype=float)
    pts = u.grid.centers()
    within = np.linalg.norm(pts - center, axis=1) <= radius
    sel = within.reshape(u.grid.res) & u.mask
    if not sel.any():
        raise ValueError("ball_average: no masked cell center inside the ball")
    return float(u.values[sel].mean())


def field_to_csv(u: GridField, path) -> None:
    """Dump a field as rows of (flat index, per-axis indices, coordinates, mask, value)."""
    n = u.grid.n
    centers = u.grid.centers()
    mask = u.mask.ravel()
    vals = u.values.ravel()
    idx = np.stack(np.unravel_index(np.arange(mask.size), u.grid.res), axis=1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cell"] + [f"i{a}" for a in range(n)]
                   + [f"x{a}" for a in range(n)] + ["inside", "value"])
        for flat in range(mask.size):
            w.writerow([flat, *idx[flat].tolist(),
                        *(repr(float(c)) for c in centers[flat]),
                        int(mask[flat]), repr(float(vals[flat]))])
