"""Example geometries: balls, boxes, and mushroom-chain domains.

The mushroom chain attaches a sequence of shrinking cap-on-stalk boxes to the
top face of the unit cube and mirrors them across the cube's midplane.  Cap m
is a cube of side 2*r_m sitting on a stalk of height r_m whose transverse
cross-section has side phi(r_m); since phi(r_m) <= r_m the stalk is thinner
than its cap.  The stalk cross-section is what makes the oscillating test
fields below have exactly unit gradient p-norm.

Caps live strictly above the attachment face, so they may overhang the face
edges; the placement packs slots left to right along the first transverse
axis and enforces genuine pairwise disjointness (stalk strips inside the open
face, separation between every pair of boxes that overlap in height).  With
the default radii r_m = r0 * ratio**m only a prefix of the chain fits on the
unit face; infeasible requests raise with the maximal feasible count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import DomainGeometry, Grid, GridField
from .kernels import PhiKernel
from .orlicz import OrliczFunction

VERTICAL_AXIS = 1


def ball_domain(center, radius: float) -> DomainGeometry:
    center = tuple(float(c) for c in np.atleast_1d(center))
    if radius <= 0:
        raise ValueError("ball radius must be positive")
    c = np.asarray(center, dtype=float)

    def inside(pts):
        pts = np.asarray(pts, dtype=float)
        return np.linalg.norm(pts - c, axis=-1) < radius

    bbox = tuple((ci - radius, ci + radius) for ci in center)
    return DomainGeometry(f"ball(r={radius:g})", inside, bbox, (center, float(radius)))


def box_domain(bbox) -> DomainGeometry:
    bbox = tuple((float(lo), float(hi)) for lo, hi in bbox)
    if any(hi <= lo for lo, hi in bbox):
        raise ValueError("box sides must have positive length")

    def inside(pts):
        pts = np.asarray(pts, dtype=float)
        out = np.ones(pts.shape[:-1], dtype=bool)
        for a, (lo, hi) in enumerate(bbox):
            out &= (pts[..., a] > lo) & (pts[..., a] < hi)
        return out

    center = tuple(0.5 * (lo + hi) for lo, hi in bbox)
    radius = min(0.5 * (hi - lo) for lo, hi in bbox)
    return DomainGeometry("box", inside, bbox, (center, radius))


def cube_domain(n: int, lo: float = 0.0, hi: float = 1.0) -> DomainGeometry:
    return box_domain(((lo, hi),) * n)


# -- mushroom chain ---------------------------------------------------------------

@dataclass(frozen=True)
class MushroomSpec:
    """Dimension, kernel shape, and the decreasing radius sequence of the chain."""

    n: int
    phi: PhiKernel
    r_seq: tuple

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("mushroom chain needs dimension n >= 2")
        r = tuple(float(x) for x in self.r_seq)
        if not r:
            raise ValueError("mushroom chain needs at least one radius")
        if any(x <= 0 for x in r) or any(b >= a for a, b in zip(r, r[1:])):
            raise ValueError("radii must be positive and strictly decreasing")
        if r[0] > 0.5:
            raise ValueError("the largest cap may not exceed the unit face (r <= 1/2)")
        for x in r:
            if float(self.phi(x)) > x * (1 + 1e-12):
                raise ValueError(f"stalk wider than cap: phi({x!r}) > {x!r}")
        object.__setattr__(self, "r_seq", r)

    @property
    def count(self) -> int:
        return len(self.r_seq)

    @classmethod
    def from_json(cls, spec: dict) -> "MushroomSpec":
        spec = dict(spec)
        n = int(spec.pop("n"))
        phi = spec.pop("phi")
        if isinstance(phi, dict):
            phi = PhiKernel.from_json(phi)
        r0 = float(spec.pop("r0", 0.5))
        ratio = float(spec.pop("ratio", 0.5))
        count = int(spec.pop("count"))
        if not (0 < ratio < 1):
            raise ValueError("radius ratio must lie in (0, 1)")
        if spec:
            raise ValueError(f"unknown mushroom keys: {sorted(spec)}")
        return cls(n, phi, tuple(r0 * ratio ** m for m in range(count)))


@dataclass(frozen=True)
class JohnSpec:
    """Carrier for a phi-John description: kernel, distortion constant, center.

    Whether a given domain actually satisfies the curve condition is not
    certified here; this record only travels with reports so readers know
    which (phi, c_j, x0) a run assumed.
    """

    phi: PhiKernel
    c_j: float
    x0: tuple

    def __post_init__(self):
        if self.c_j <= 0:
            raise ValueError("John constant c_j must be positive")
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))


class PlacementError(ValueError):
    def __init__(self, message: str, feasible: int):
        super().__init__(message)
        self.feasible = feasible


@dataclass(frozen=True)
class Slot:
    center: tuple        # transverse coordinates (first transverse axis, then the rest)
    r: float
    neck_halfwidth: float


def _place_slots(spec: MushroomSpec, gap: float, margin: float) -> tuple:
    """Left-to-right slot centers with full pairwise disjointness.

    Boxes that overlap in height (stalks always, caps when 3*r_m >= r_j) must
    be separated along the packing axis by at least `gap`; stalk strips stay
    `margin` inside the open face.  Raises PlacementError with the feasible
    prefix length when a slot does not fit.
    """
    placed = []
    for m, r in enumerate(spec.r_seq):
        hw = 0.5 * float(spec.phi(r))
        lo = hw + margin
        hi = 1.0 - hw - margin
        c = lo
        for cj, rj, hwj in placed:
            seps = [hwj + hw + max(2.0 * r, gap),            # stalk-stalk
                    hwj + r + gap]                           # cap beside earlier stalk
            if rj <= 3.0 * r:                                # caps overlap in height
                seps.append(rj + r + gap)
            c = max(c, cj + max(seps))
        if c > hi:
            raise PlacementError(
                f"mushroom chain does not fit on the unit face: slot {m + 1} of "
                f"{spec.count} overflows (maximal feasible count is {m})", m)
        placed.append((c, r, hw))
    return tuple(Slot((c,) + (0.5,) * (spec.n - 2), r, hw) for c, r, hw in placed)


@dataclass(frozen=True, eq=False)
class MushroomGeometry(DomainGeometry):
    spec: MushroomSpec = None
    slots: tuple = ()


def _slot_membership(pts: np.ndarray, slot: Slot, n: int) -> np.ndarray:
    """Membership in one mushroom (cap, stalk, and the open interface strips)."""
    x1 = pts[..., VERTICAL_AXIS]
    tr_axes = [a for a in range(n) if a != VERTICAL_AXIS]
    trdist = np.zeros(pts.shape[:-1])
    for coord, axis in zip(slot.center, tr_axes):
        np.maximum(trdist, np.abs(pts[..., axis] - coord), out=trdist)

    def upper(height):
        stalk = (trdist < slot.neck_halfwidth) & (height >= 1.0) & (height <= 1.0 + slot.r)
        cap = (trdist < slot.r) & (height > 1.0 + slot.r) & (height < 1.0 + 3.0 * slot.r)
        return stalk | cap

    return upper(x1) | upper(1.0 - x1)


def mushroom_build(spec: MushroomSpec, gap: Optional[float] = None,
                   margin: Optional[float] = None) -> MushroomGeometry:
    """Realize the chain as an open domain with a vectorized membership test.

    The interior of the union: the open unit cube, the open caps and stalks,
    and the interface strips where a stalk meets the cube face or its cap.
    Points of the attachment face between mushrooms stay outside.
    """
    if gap is None:
        gap = spec.r_seq[0] / 2.0
    if margin is None:
        margin = gap / 2.0
    slots = _place_slots(spec, gap, margin)
    n = spec.n
    r1 = spec.r_seq[0]

    lo0 = min(0.0, min(s.center[0] - s.r for s in slots))
    hi0 = max(1.0, max(s.center[0] + s.r for s in slots))
    bbox = []
    for a in range(n):
        if a == VERTICAL_AXIS:
            bbox.append((-3.0 * r1, 1.0 + 3.0 * r1))
        elif a == 0:
            bbox.append((lo0, hi0))
        else:
            bbox.append((min(0.0, 0.5 - r1), max(1.0, 0.5 + r1)))

    def inside(pts):
        pts = np.asarray(pts, dtype=float)
        out = np.ones(pts.shape[:-1], dtype=bool)
        for a in range(n):
            out &= (pts[..., a] > 0.0) & (pts[..., a] < 1.0)
        for slot in slots:
            out |= _slot_membership(pts, slot, n)
        return out

    center = (0.5,) * n
    return MushroomGeometry(f"mushroom-chain(count={len(slots)})", inside, tuple(bbox),
                            (center, 0.5), spec, slots)


# -- oscillating test fields --------------------------------------------------------

def ramp_amplitude(phi: PhiKernel, r: float, p: float, n: int) -> float:
    """Cap plateau value making the stalk ramp have unit gradient p-norm:
    F(r) = (r**(p-1) / (2 * phi(r)**(n-1)))**(1/p)."""
    if p < 1.0:
        raise ValueError("ramp_amplitude needs p >= 1")
    return float((r ** (p - 1.0) / (2.0 * float(phi(r)) ** (n - 1))) ** (1.0 / p))


def counterexample_field(geom: MushroomGeometry, k: int, p: float,
                         grid: Grid, mask: np.ndarray) -> tuple:
    """k-th oscillating field on the chain: plateau +F on cap k, -F on its
    mirror, linear ramp through the stalks, zero elsewhere.

    Returns (u, exact gradient magnitude, F).  The gradient field is the
    closed form F/r on the stalk cells, not a finite difference.
    """
    if not (1 <= k <= len(geom.slots)):
        raise ValueError(f"mushroom index k={k} outside the realized chain")
    slot = geom.slots[k - 1]
    n = geom.spec.n
    F = ramp_amplitude(geom.spec.phi, slot.r, p, n)

    pts = grid.centers()
    x1 = pts[:, VERTICAL_AXIS]
    tr_axes = [a for a in range(n) if a != VERTICAL_AXIS]
    trdist = np.zeros(pts.shape[0])
    for coord, axis in zip(slot.center, tr_axes):
        np.maximum(trdist, np.abs(pts[:, axis] - coord), out=trdist)

    u = np.zeros(pts.shape[0])
    g = np.zeros(pts.shape[0])
    for sign, height in ((1.0, x1), (-1.0, 1.0 - x1)):
        stalk = (trdist < slot.neck_halfwidth) & (height >= 1.0) & (height <= 1.0 + slot.r)
        cap = (trdist < slot.r) & (height > 1.0 + slot.r) & (height < 1.0 + 3.0 * slot.r)
        u[stalk] = sign * F * (height[stalk] - 1.0) / slot.r
        u[cap] = sign * F
        g[stalk] = F / slot.r

    shape = grid.res
    return (GridField(grid, mask, u.reshape(shape)),
            GridField(grid, mask, g.reshape(shape)), F)


@dataclass
class DivergenceProfile:
    energies: np.ndarray
    verdict: str                 # "diverges" | "bounded"
    amplitudes: np.ndarray


def divergence_profile(spec: MushroomSpec, p: float, H: OrliczFunction,
                       k_max: Optional[int] = None) -> DivergenceProfile:
    """Closed-form lower-bound energies E_k = 2 * r_k**n * H(F(r_k)) along the chain.

    No geometry is realized: the profile is a pure function of the radius
    sequence, so it reaches arbitrarily deep indices the grid never could.
    Diverges when the energies increase monotonically over the second half
    and the total growth exceeds one order of magnitude.
    """
    k_max = spec.count if k_max is None else int(k_max)
    if not (1 <= k_max <= spec.count):
        raise ValueError("k_max must lie within the radius sequence")
    r = np.asarray(spec.r_seq[:k_max], dtype=float)
    F = np.array([ramp_amplitude(spec.phi, rk, p, spec.n) for rk in r])
    E = 2.0 * r ** spec.n * np.asarray(H(F), dtype=float)
    half = E[E.size // 2:]
    growing = half.size >= 2 and bool(np.all(np.diff(half) > 0.0))
    verdict = "diverges" if growing and E[-1] > 10.0 * E[0] else "bounded"
    return DivergenceProfile(E, verdict, F)
