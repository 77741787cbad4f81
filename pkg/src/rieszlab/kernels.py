"""Radial kernel shapes for generalized Riesz potentials, and their admissibility checks.

A kernel shape phi: [0, inf) -> [0, inf) is continuous, strictly increasing,
and vanishes at 0; the potential weighs mass at distance d by phi(d)**(1-n).
The checks in this module quantify the structural conditions used by the
pointwise and norm estimates:

  * quasi-increasing slope: phi(t1)/t1 <= C * phi(t2)/t2 for t1 <= t2,
  * a doubling constant for phi,
  * the dyadic annuli series  sum_k (t/2**k)**n / phi(t/2**k)**(n-1)  and its
    closed-form majorant for the power-over-log family,
  * the splitting-balance sup that calibrates the Orlicz weight H against the
    near/far decomposition of the potential,
  * the admissible exponent frontier p < n / (n - alpha*(n-1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .orlicz import OrliczFunction
from .sweeps import doubling_sup, log_grid


class PhiKernel:
    """Kernel shape with vectorized evaluation and an inverse."""

    def __init__(self, family: str, fn: Callable, params: Optional[dict] = None,
                 inverse: Optional[Callable] = None, label: Optional[str] = None):
        self.family = family
        self._fn = fn
        self._inv = inverse
        self.params = dict(params or {})
        self.label = label or family
        self.c_phi: Optional[float] = None

    @classmethod
    def identity(cls) -> "PhiKernel":
        """phi(t) = t (the classical kernel shape at full strength)."""
        return cls("identity", lambda t: np.asarray(t, dtype=float),
                   {}, inverse=lambda y: float(y), label="t")

    @classmethod
    def power_over_log(cls, alpha: float, beta: float) -> "PhiKernel":
        """phi(t) = t**alpha / log(e + 1/t)**beta with alpha >= 1, beta >= 0."""
        if not (alpha >= 1.0 and math.isfinite(alpha)):
            raise ValueError("power_over_log kernel needs alpha >= 1")
        if beta < 0.0:
            raise ValueError("power_over_log kernel needs beta >= 0")

        def fn(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore"):
                inv = np.divide(1.0, t, out=np.full(t.shape, np.inf), where=t > 0)
            den = np.log(np.e + inv) ** beta
            with np.errstate(invalid="ignore"):
                out = t ** alpha / den
            return np.where(t > 0, out, 0.0)

        inverse = None
        if beta == 0.0:
            inverse = lambda y: float(y) ** (1.0 / alpha)
        return cls("power_over_log", fn, {"alpha": alpha, "beta": beta},
                   inverse=inverse, label=f"t^{alpha:g}/log^{beta:g}(e+1/t)")

    @classmethod
    def custom(cls, fn: Callable, inverse: Callable, label: str = "custom") -> "PhiKernel":
        """Wrap a user-supplied strictly increasing shape; an inverse is required."""
        return cls("custom", fn, inverse=inverse, label=label)

    @classmethod
    def from_json(cls, spec: dict) -> "PhiKernel":
        spec = dict(spec)
        family = spec.pop("family", None)
        if family == "identity":
            if spec:
                raise ValueError(f"unknown identity-kernel keys: {sorted(spec)}")
            return cls.identity()
        if family == "power_over_log":
            alpha = float(spec.pop("alpha"))
            beta = float(spec.pop("beta", 0.0))
            if spec:
                raise ValueError(f"unknown power_over_log-kernel keys: {sorted(spec)}")
            return cls.power_over_log(alpha, beta)
        raise ValueError(f"unknown kernel family: {family!r}")

    @property
    def is_pure_power(self) -> bool:
        return self.family == "identity" or (
            self.family == "power_over_log" and self.params.get("beta", 0.0) == 0.0)

    def power_exponent(self) -> float:
        if self.family == "identity":
            return 1.0
        return float(self.params["alpha"])

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if arr.ndim == 0:
            x = float(arr)
            if not math.isfinite(x) or x < 0.0:
                raise ValueError(f"kernel argument must be finite and nonnegative, got {x!r}")
            return float(self._fn(arr))
        return self._fn(arr)

    def inverse(self, y: float, rel_tol: float = 1e-14, max_iter: int = 400) -> float:
        """Solve phi(t) = y by monotone bisection (closed form when available)."""
        if not (y >= 0.0 and math.isfinite(y)):
            raise ValueError("inverse argument must be finite and nonnegative")
        if y == 0.0:
            return 0.0
        if self._inv is not None:
            return float(self._inv(y))
        lo, hi = 0.0, 1.0
        steps = 0
        while self(hi) < y:
            lo = hi
            hi *= 2.0
            steps += 1
            if steps > max_iter:
                raise ValueError("kernel inverse bracket failed")
        while (hi - lo) > rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
            steps += 1
            if steps > 10 * max_iter:
                break
        return 0.5 * (lo + hi)

    def __repr__(self):
        return f"PhiKernel({self.label})"


class DeltaMap:
    """Splitting radius as a function of the maximal-function level."""

    def __init__(self, fn: Callable, label: str, params: Optional[dict] = None):
        self._fn = fn
        self.label = label
        self.params = dict(params or {})

    @classmethod
    def power(cls, p: float, n: int) -> "DeltaMap":
        """delta(t) = t**(-p/n), the scale-balancing choice."""
        if p <= 0 or n < 1:
            raise ValueError("power delta map needs p > 0 and n >= 1")
        expo = -p / float(n)
        return cls(lambda t: np.asarray(t, dtype=float) ** expo,
                   f"t^({expo:g})", {"p": p, "n": n})

    @classmethod
    def custom(cls, fn: Callable, label: str = "custom") -> "DeltaMap":
        return cls(fn, label)

    def __call__(self, t):
        return self._fn(np.asarray(t, dtype=float))

    def __repr__(self):
        return f"DeltaMap({self.label})"


# -- structural estimates -----------------------------------------------------

@dataclass
class RatioSupResult:
    value: float
    unbounded: bool
    witness: Optional[float]


def quasi_increasing_constant(phi: PhiKernel, grid: Optional[np.ndarray] = None) -> RatioSupResult:
    """Sup over grid pairs t1 <= t2 of (phi(t1)/t1) / (phi(t2)/t2).

    Computed in O(N) with a suffix minimum of the slope g(t) = phi(t)/t.  The
    unboundedness flag compares the estimate against the same estimate with
    the extreme decades dropped; a blow-up concentrated at the grid edges
    keeps growing as the grid extends and is flagged.  On a bounded outcome
    the constant is cached on the kernel.
    """
    if grid is None:
        grid = log_grid()
    t = np.asarray(grid, dtype=float)

    def sup_on(tv: np.ndarray) -> tuple:
        v = np.asarray(phi(tv), dtype=float)
        if np.any(v <= 0.0):
            raise ValueError("kernel must be positive on positive arguments")
        g = v / tv
        suffix_min = np.minimum.accumulate(g[::-1])[::-1]
        ratios = g / suffix_min
        i = int(np.argmax(ratios))
        return float(ratios[i]), float(tv[i])

    value, witness = sup_on(t)
    inner = t[(t >= t.min() * 10.0) & (t <= t.max() / 10.0)]
    unbounded = False
    if inner.size >= 2:
        inner_value, _ = sup_on(inner)
        unbounded = value > 1.5 * inner_value
    if not unbounded:
        phi.c_phi = value
    return RatioSupResult(value, unbounded, witness)


def phi_delta2_estimate(phi: PhiKernel, grid: Optional[np.ndarray] = None) -> RatioSupResult:
    """Sup of phi(2t)/phi(t) over a log grid (exact 2**alpha for pure powers)."""
    if phi.is_pure_power:
        return RatioSupResult(2.0 ** phi.power_exponent(), False, None)
    if grid is None:
        grid = log_grid()
    value, unbounded, witness = doubling_sup(phi, np.asarray(grid, dtype=float))
    return RatioSupResult(value, unbounded, witness)


# -- dyadic annuli series -------------------------------------------------------

@dataclass
class AnnuliSeries:
    partial_sum: float
    tail_bound: float
    diverges: bool
    terms: int
    last_ratio: float


def annuli_series(phi: PhiKernel, n: int, t: float, terms: int = 512,
                  ratio_window: int = 8, divergence_run: int = 16,
                  divergence_tol: float = 1e-9) -> AnnuliSeries:
    """Partial sum of sum_{k>=1} (t/2**k)**n / phi(t/2**k)**(n-1).

    The geometric tail bound extrapolates from the largest of the last
    `ratio_window` term ratios.  Divergence is flagged when the last
    `divergence_run` consecutive term ratios all sit at or above 1 - tol,
    which captures both the flat endpoint case and slowly growing terms.
    """
    if n < 2:
        raise ValueError("annuli_series needs dimension n >= 2")
    if not (t > 0.0 and math.isfinite(t)):
        raise ValueError("annuli_series needs t > 0")
    if terms < divergence_run + 1:
        raise ValueError("annuli_series needs more terms than the divergence run")

    k = np.arange(1, terms + 1)
    s = t * 0.5 ** k
    usable = s > 1e-290          # stop before float underflow fabricates zeros
    s = s[usable]
    pv = np.asarray(phi(s), dtype=float)
    if np.any(pv <= 0.0):
        bad = float(s[np.flatnonzero(pv <= 0.0)[0]])
        raise ValueError(f"kernel evaluated to 0 at positive argument {bad!r}")
    with np.errstate(over="ignore"):
        term = s ** n / pv ** (n - 1)
    if not np.isfinite(term).all():
        raise ValueError("annuli_series produced a non-finite term")

    partial = float(term.sum())
    ratios = term[1:] / term[:-1]
    last_ratio = float(ratios[-1]) if ratios.size else 0.0
    diverges = ratios.size >= divergence_run and bool(
        np.all(ratios[-divergence_run:] >= 1.0 - divergence_tol))

    window = ratios[-ratio_window:] if ratios.size else np.array([0.0])
    rho = float(window.max())
    if diverges or rho >= 1.0:
        tail = math.inf
    else:
        tail = float(term[-1]) * rho / (1.0 - rho)
    return AnnuliSeries(partial, tail, diverges, int(term.size), last_ratio)


def closed_form_annuli_bound(alpha: float, beta: float, n: int, t) -> float:
    """t**(n + (1-n)*alpha) * log(e + 1/t)**(beta*(n-1)) for the power-over-log shape.

    Valid for alpha in [1, 1 + 1/(n-1)); outside that range the series has no
    finite closed-form majorant of this shape and a ValueError is raised.
    """
    if n < 2:
        raise ValueError("closed_form_annuli_bound needs n >= 2")
    if not (1.0 <= alpha < 1.0 + 1.0 / (n - 1)):
        raise ValueError("closed_form_annuli_bound needs alpha in [1, 1 + 1/(n-1))")
    if beta < 0.0:
        raise ValueError("closed_form_annuli_bound needs beta >= 0")
    tv = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        inv = np.divide(1.0, tv, out=np.full(tv.shape, np.inf), where=tv > 0)
    out = tv ** (n + (1.0 - n) * alpha) * np.log(np.e + inv) ** (beta * (n - 1))
    if out.ndim == 0:
        return float(out)
    return out


def fit_annuli_constant(phi: PhiKernel, n: int, fit_grid: Optional[np.ndarray] = None,
                        terms: int = 512) -> float:
    """Smallest constant C with series(t) <= C * closed_form(t) on the fit grid."""
    if phi.family == "identity":
        alpha, beta = 1.0, 0.0
    elif phi.family == "power_over_log":
        alpha, beta = phi.params["alpha"], phi.params["beta"]
    else:
        raise ValueError("closed-form majorant fit is only defined for power-over-log shapes")
    if fit_grid is None:
        fit_grid = log_grid(1e-6, 1e2, points_per_decade=6)
    ratios = []
    for t in np.asarray(fit_grid, dtype=float):
        series = annuli_series(phi, n, float(t), terms=terms)
        if series.diverges:
            raise ValueError("annuli series diverges; no closed-form majorant")
        closed = closed_form_annuli_bound(alpha, beta, n, float(t))
        ratios.append(series.partial_sum / closed)
    return float(max(ratios))


# -- splitting-balance sup ------------------------------------------------------

@dataclass
class CompatibilityResult:
    sup: float
    argmax_t: float
    unbounded: bool
    extensions: int
    grid_lo: float
    grid_hi: float


def compatibility_sup(H: OrliczFunction, phi: PhiKernel, h_fn: Callable, delta: DeltaMap,
                      p: float, n: int, t_grid: Optional[np.ndarray] = None,
                      points_per_decade: int = 6, max_extensions: int = 6,
                      growth_tol: float = 5e-3,
                      saturation_decay: float = 0.7) -> CompatibilityResult:
    """Sup over t of H(h(delta(t)) * t + phi(delta(t))**(1-n) * delta(t)**(n(1-1/p))) / t**p.

    The default grid is 97 log-spaced points on [1e-8, 1e8].  When the sup
    lands on a grid endpoint the grid is extended one decade on that side (up
    to `max_extensions` times); an extension that grows the sup by less than
    `growth_tol` settles the matter as bounded.  When every extension keeps
    growing, the per-decade growth factors decide: genuine polynomial
    divergence keeps a steady factor, while a ratio that merely saturates
    logarithmically slowly (log-perturbed kernels do this) shows factors
    decaying toward 1.  Only a factor sequence whose final excess stays above
    `saturation_decay` times the first is flagged unbounded.
    """
    if t_grid is None:
        t_grid = log_grid(points_per_decade=points_per_decade)
    t = np.asarray(t_grid, dtype=float)
    if t.min() <= 0.0:
        raise ValueError("compatibility_sup needs a positive grid")
    if np.log10(t.max() / t.min()) < 12.0 - 1e-9:
        raise ValueError("compatibility_sup grid must span at least 12 decades")

    def ratio(tv: np.ndarray) -> np.ndarray:
        d = np.asarray(delta(tv), dtype=float)
        hv = np.asarray(h_fn(d), dtype=float)
        tail = np.asarray(phi(d), dtype=float) ** (1.0 - n) * d ** (n * (1.0 - 1.0 / p))
        arg = hv * tv + tail
        with np.errstate(over="ignore"):
            num = np.asarray(H(arg), dtype=float)
        out = num / tv ** p
        if not np.isfinite(out).all():
            bad = float(tv[np.flatnonzero(~np.isfinite(out))[0]])
            raise ValueError(f"compatibility_sup hit a non-finite value at t={bad!r}")
        return out

    lo, hi = float(t.min()), float(t.max())
    values = ratio(t)
    extensions = 0
    growths = []
    while True:
        idx = int(np.argmax(values))
        sup = float(values[idx])
        at_lo, at_hi = idx == 0, idx == t.size - 1
        if not (at_lo or at_hi) or extensions >= max_extensions:
            unbounded = (at_lo or at_hi) and extensions >= max_extensions and bool(
                growths and growths[-1] - 1.0 > saturation_decay * (growths[0] - 1.0))
            return CompatibilityResult(sup, float(t[idx]), unbounded, extensions, lo, hi)
        if at_hi:
            ext = log_grid(hi, hi * 10.0, points_per_decade)[1:]
            t = np.concatenate([t, ext])
            values = np.concatenate([values, ratio(ext)])
            hi = float(t.max())
        else:
            ext = log_grid(lo / 10.0, lo, points_per_decade)[:-1]
            t = np.concatenate([ext, t])
            values = np.concatenate([ratio(ext), values])
            lo = float(t.min())
        extensions += 1
        new_sup = float(values.max())
        if new_sup <= sup * (1.0 + growth_tol):
            idx = int(np.argmax(values))
            return CompatibilityResult(new_sup, float(t[idx]), False, extensions, lo, hi)
        growths.append(new_sup / sup)


def admissible_p_max(alpha: float, n: int) -> float:
    """Admissibility frontier n / (n - alpha*(n-1)) for the power-over-log shape."""
    if n < 2:
        raise ValueError("admissible_p_max needs n >= 2")
    if alpha < 1.0:
        raise ValueError("admissible_p_max needs alpha >= 1")
    denom = n - alpha * (n - 1)
    if denom <= 0.0:
        raise ValueError("no admissible exponents: alpha*(n-1) >= n")
    return n / denom
