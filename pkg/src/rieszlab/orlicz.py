"""Orlicz functions and Luxemburg norms on sampled fields.

An Orlicz function H maps [0, inf) to [0, inf) and weighs field magnitudes
when measuring integrability beyond the Lebesgue scale.  This module supplies
the closed-form families used throughout the package, structural checks
(N-function axioms, doubling constants, small-argument summability), and a
bracketing/bisection solver for the Luxemburg norm of a discrete field:

    ||u|| = inf { lam > 0 : sum_cells H(|u_i| / lam) * cellvol <= 1 }.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .sweeps import doubling_sup, log_grid


class OrliczFunction:
    """Scalar convex weight function with a family tag and vectorized evaluation.

    Instances are callable on scalars and numpy arrays.  `delta2_constant`
    caches the most recent doubling estimate (None until estimated).
    """

    def __init__(self, family: str, fn: Callable, params: Optional[dict] = None, label: Optional[str] = None):
        self.family = family
        self._fn = fn
        self.params = dict(params or {})
        self.label = label or family
        self.delta2_constant: Optional[float] = None

    # -- families ----------------------------------------------------------

    @classmethod
    def power(cls, p: float) -> "OrliczFunction":
        """H(t) = t**p, p >= 1."""
        if not (p >= 1.0 and math.isfinite(p)):
            raise ValueError("power family needs p >= 1")

        def fn(t):
            return np.asarray(t, dtype=float) ** p

        return cls("power", fn, {"p": p}, f"t^{p:g}")

    @classmethod
    def llogl(cls) -> "OrliczFunction":
        """H(t) = t * log(e + t)."""

        def fn(t):
            t = np.asarray(t, dtype=float)
            return t * np.log(np.e + t)

        return cls("llogl", fn, {}, "t*log(e+t)")

    @classmethod
    def power_over_log(cls, q: float, gamma: float, m: float = math.e) -> "OrliczFunction":
        """H(t) = (t / log(m + t)**gamma)**q with m >= e, q > 0, gamma >= 0."""
        if not (q > 0.0 and math.isfinite(q)):
            raise ValueError("power_over_log family needs q > 0")
        if gamma < 0.0:
            raise ValueError("power_over_log family needs gamma >= 0")
        if m < math.e - 1e-12:
            raise ValueError("power_over_log family needs m >= e")

        def fn(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(over="ignore"):
                return (t / np.log(m + t) ** gamma) ** q

        return cls("power_over_log", fn, {"q": q, "gamma": gamma, "m": m},
                   f"(t/log^{gamma:g}({m:g}+t))^{q:g}")

    @classmethod
    def exp_minus_one(cls) -> "OrliczFunction":
        """H(t) = exp(t) - 1.  Overflows to inf for very large t; callers that
        sweep wide grids treat a trailing overflow run as evidence of the
        infinity limit rather than as a defect."""

        def fn(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(over="ignore"):
                return np.expm1(t)

        return cls("exp_minus_one", fn, {}, "exp(t)-1")

    @classmethod
    def custom(cls, fn: Callable, label: str = "custom", params: Optional[dict] = None) -> "OrliczFunction":
        """Wrap a user-supplied vectorized map.  The map must accept numpy arrays."""
        return cls("custom", fn, params, label)

    @classmethod
    def from_json(cls, spec: dict) -> "OrliczFunction":
        """Build from a JSON-style descriptor, e.g. {"family": "power", "p": 2}."""
        spec = dict(spec)
        family = spec.pop("family", None)
        if family == "power":
            p = float(spec.pop("p"))
            if spec:
                raise ValueError(f"unknown power keys: {sorted(spec)}")
            return cls.power(p)
        if family == "llogl":
            if spec:
                raise ValueError(f"unknown llogl keys: {sorted(spec)}")
            return cls.llogl()
        if family == "power_over_log":
            q = float(spec.pop("q"))
            gamma = float(spec.pop("gamma"))
            m = spec.pop("m", math.e)
            m = math.e if m in ("e", None) else float(m)
            if spec:
                raise ValueError(f"unknown power_over_log keys: {sorted(spec)}")
            return cls.power_over_log(q, gamma, m)
        if family == "exp_minus_one":
            if spec:
                raise ValueError(f"unknown exp_minus_one keys: {sorted(spec)}")
            return cls.exp_minus_one()
        raise ValueError(f"unknown Orlicz family: {family!r}")

    def scaled(self, c: float) -> "OrliczFunction":
        """c * H as a custom instance (used for coefficiented power weights)."""
        if not (c > 0.0 and math.isfinite(c)):
            raise ValueError("scale must be positive and finite")
        inner = self._fn
        return OrliczFunction.custom(lambda t: c * inner(t), label=f"{c:g}*{self.label}",
                                     params={"scale": c, **self.params})

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if arr.ndim == 0:
            x = float(arr)
            if not math.isfinite(x) or x < 0.0:
                raise ValueError(f"Orlicz argument must be finite and nonnegative, got {x!r}")
            return float(self._fn(arr))
        return self._fn(arr)

    def __repr__(self):
        return f"OrliczFunction({self.label})"


# -- N-function structural check --------------------------------------------

@dataclass
class PropertyCheck:
    passed: bool
    witness: Optional[float]
    detail: str


@dataclass
class NFunctionReport:
    checks: dict
    slope_at_zero: float
    slope_at_infinity: float
    overflow_tail: int

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def summary(self) -> dict:
        out = {name: c.passed for name, c in self.checks.items()}
        out["slope_at_zero"] = self.slope_at_zero
        out["slope_at_infinity"] = self.slope_at_infinity
        return out


def _trend_slope(t: np.ndarray, r: np.ndarray) -> float:
    """Least-squares slope of log r against log t (0 when degenerate)."""
    good = np.isfinite(r) & (r > 0.0)
    if good.sum() < 2:
        return 0.0
    x = np.log(t[good])
    y = np.log(r[good])
    return float(np.polyfit(x, y, 1)[0])


def n_function_check(H: OrliczFunction, grid: Optional[np.ndarray] = None,
                     slope_tol: float = 1e-2, convexity_rel_tol: float = 1e-9) -> NFunctionReport:
    """Check the N-function axioms on a log grid and report per-axiom outcomes.

    Axioms checked: continuity with H(0)=0, strict monotonicity, convexity
    (midpoints of adjacent nodes), the ratio limits H(t)/t -> 0 at zero and
    -> inf at infinity (trend slopes at the grid extremes), and strict
    monotonicity of H(t)/t.  Failures are reported with a witness point; the
    report never raises.  The grid must cover at least [1e-8, 1e8].
    """
    if grid is None:
        grid = log_grid()
    t = np.asarray(grid, dtype=float)
    if t.min() > 1e-8 * (1 + 1e-12) or t.max() < 1e8 * (1 - 1e-12):
        raise ValueError("n_function_check grid must cover [1e-8, 1e8]")

    with np.errstate(over="ignore"):
        v = np.asarray(H(t), dtype=float)

    finite = np.isfinite(v)
    overflow_tail = 0
    continuity_witness = None
    if not finite.all():
        first_bad = int(np.argmax(~finite))
        trailing = (~finite[first_bad:]).all() and first_bad > 0
        if trailing:
            overflow_tail = int(t.size - first_bad)
        else:
            continuity_witness = float(t[first_bad])
    n_fin = t.size - overflow_tail
    tf, vf = t[:n_fin], v[:n_fin]

    checks = {}

    h0 = float(H(0.0))
    cont_ok = continuity_witness is None and h0 == 0.0
    detail = "finite on grid with H(0)=0"
    if continuity_witness is not None:
        detail = "non-finite value inside the grid"
    elif h0 != 0.0:
        detail = f"H(0) = {h0!r} != 0"
        continuity_witness = 0.0
    if overflow_tail:
        detail += f" (float overflow on the top {overflow_tail} nodes, treated as the infinity limit)"
    checks["continuous"] = PropertyCheck(cont_ok, continuity_witness, detail)

    dv = np.diff(vf)
    mono_bad = np.flatnonzero(dv <= 0.0)
    checks["strictly_increasing"] = PropertyCheck(
        mono_bad.size == 0,
        float(tf[mono_bad[0] + 1]) if mono_bad.size else None,
        "H(t_{i+1}) > H(t_i) on the finite part of the grid")

    mids = 0.5 * (tf[:-1] + tf[1:])
    with np.errstate(over="ignore"):
        vm = np.asarray(H(mids), dtype=float)
    rhs = 0.5 * (vf[:-1] + vf[1:])
    ok = np.isfinite(vm) & np.isfinite(rhs)
    conv_bad = np.flatnonzero(ok & (vm > rhs * (1.0 + convexity_rel_tol) + 1e-300))
    checks["convex"] = PropertyCheck(
        conv_bad.size == 0,
        float(mids[conv_bad[0]]) if conv_bad.size else None,
        "midpoint convexity on adjacent grid nodes")

    with np.errstate(invalid="ignore"):
        ratio = vf / tf
    lo_zone = tf <= tf.min() * 100.0
    hi_zone = tf >= tf.max() / 100.0
    slope0 = _trend_slope(tf[lo_zone], ratio[lo_zone])
    slope_inf = _trend_slope(tf[hi_zone], ratio[hi_zone])
    zero_ok = slope0 >= slope_tol
    inf_ok = slope_inf >= slope_tol or overflow_tail > 0
    witness = None if zero_ok else float(tf.min())
    if zero_ok and not inf_ok:
        witness = float(tf.max())
    checks["ratio_limits"] = PropertyCheck(
        zero_ok and inf_ok, witness,
        f"H(t)/t trend slopes: {slope0:.3g} at zero (need >= {slope_tol}), "
        f"{slope_inf:.3g} at infinity")

    dr = np.diff(ratio)
    rm_bad = np.flatnonzero(~(dr > 0.0))
    checks["ratio_strictly_increasing"] = PropertyCheck(
        rm_bad.size == 0,
        float(tf[rm_bad[0] + 1]) if rm_bad.size else None,
        "H(t)/t strictly increasing on the grid")

    return NFunctionReport(checks, slope0, slope_inf, overflow_tail)


# -- doubling (Delta-2) estimate ---------------------------------------------

@dataclass
class Delta2Estimate:
    value: float
    unbounded: bool
    witness: Optional[float]


def delta2_estimate(H: OrliczFunction, grid: Optional[np.ndarray] = None) -> Delta2Estimate:
    """Sup of H(2t)/H(t) over a log grid, with an unboundedness flag.

    The pure power family short-circuits to the exact constant 2**p.  The
    flag is raised when the per-decade sup is still growing at the top of the
    grid (factor > 1.5 between the last two decades) or when the ratio
    overflows.  On a bounded outcome the estimate is cached on the instance.
    """
    if H.family == "power":
        value = 2.0 ** H.params["p"]
        H.delta2_constant = value
        return Delta2Estimate(value, False, None)
    if grid is None:
        grid = log_grid()
    value, unbounded, witness = doubling_sup(H, np.asarray(grid, dtype=float))
    if not unbounded:
        H.delta2_constant = value
    return Delta2Estimate(value, unbounded, witness)


# -- small-argument summability ----------------------------------------------

@dataclass
class SummabilityResult:
    converged: bool
    partial_sum: float
    tail_fraction: float
    terms: int


def dyadic_summability(H: OrliczFunction, terms: int = 64, threshold: float = 0.01) -> SummabilityResult:
    """Partial sum of H(2**-j), j = 1..terms, with a convergence heuristic.

    Converged when the second half of the terms contributes less than
    `threshold` of the partial sum.  Needs terms >= 32.
    """
    if terms < 32:
        raise ValueError("dyadic_summability needs terms >= 32")
    j = np.arange(1, terms + 1)
    vals = np.asarray(H(0.5 ** j), dtype=float)
    if not np.isfinite(vals).all():
        raise ValueError("dyadic_summability: non-finite term")
    total = float(vals.sum())
    tail = float(vals[terms // 2 - 1:].sum())
    frac = tail / total if total > 0.0 else 0.0
    return SummabilityResult(frac <= threshold, total, frac, terms)


# -- Luxemburg norm ------------------------------------------------------------

@dataclass
class NormResult:
    value: float
    iterations: int
    bracket: tuple
    converged: bool


def luxemburg_norm_values(values: np.ndarray, cellvol: float, H: OrliczFunction,
                          rel_tol: float = 1e-12, max_iter: int = 200) -> NormResult:
    """Luxemburg norm of a sampled field given its cell volume.

    The modular lam -> sum H(|v|/lam) * cellvol is strictly decreasing in lam
    wherever positive, so the unit level is bracketed (doubling up from 1
    while the modular exceeds 1, halving down while it does not) and then
    bisected to relative tolerance.  The returned value is the upper bracket
    end, so its modular is guaranteed <= 1.
    """
    vals = np.abs(np.asarray(values, dtype=float).ravel())
    if vals.size == 0 or not np.any(vals > 0.0):
        return NormResult(0.0, 0, (0.0, 0.0), True)

    def modular(lam: float) -> float:
        with np.errstate(over="ignore"):
            out = float(np.sum(H(vals / lam)) * cellvol)
        return out

    hi = 1.0
    steps = 0
    if modular(hi) > 1.0:
        while modular(hi) > 1.0:
            hi *= 2.0
            steps += 1
            if steps > max_iter:
                raise ValueError("luxemburg norm bracket failed: field too large for float range")
        lo = hi / 2.0
    else:
        lo = 1.0
        while modular(lo) <= 1.0:
            hi = lo
            lo /= 2.0
            steps += 1
            if steps > max_iter:
                raise ValueError("luxemburg norm bracket failed: field too small for float range")

    iters = 0
    while (hi - lo) > rel_tol * hi and iters < max_iter:
        mid = 0.5 * (lo + hi)
        if modular(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    return NormResult(hi, iters, (lo, hi), (hi - lo) <= rel_tol * hi)


def luxemburg_norm(u, H: OrliczFunction, rel_tol: float = 1e-12, max_iter: int = 200) -> NormResult:
    """Luxemburg norm of a GridField (duck-typed: needs masked_values and grid.cellvol)."""
    return luxemburg_norm_values(u.masked_values, u.grid.cellvol, H, rel_tol, max_iter)
