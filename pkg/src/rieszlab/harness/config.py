"""Config loading, validation, and the named problem presets.

A config is a JSON object.  Recognized blocks are `kernel`, `orlicz`,
`domain`, `grid`, `fields`, and `sweep`; everything else is scalar run
parameters.  Unknown keys are rejected (per subcommand) so typos fail loudly
with exit code 2 instead of silently running defaults.

Defaults: seed 0, expect null (any verdict accepted), singular_rule
"exclude-self-cell", domain = unit cube, fields family per run (nonnegative
densities for potential-type runs, smooth fields for representation and
embedding), two random seeds {0, 1}.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..domains import MushroomSpec, ball_domain, box_domain, cube_domain, mushroom_build
from ..fields import DomainGeometry
from ..kernels import DeltaMap, PhiKernel, admissible_p_max, closed_form_annuli_bound, \
    fit_annuli_constant
from ..orlicz import OrliczFunction
from ..potentials import SINGULAR_CAP, SINGULAR_EXCLUDE


class ConfigError(ValueError):
    """Invalid or unknown configuration input (CLI exit code 2)."""


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def require_keys(cfg: dict, allowed, experiment: str) -> None:
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown config keys for {experiment}: {unknown}")


def singular_rule(cfg: dict) -> str:
    rule = cfg.get("singular_rule", SINGULAR_EXCLUDE)
    if rule not in (SINGULAR_EXCLUDE, SINGULAR_CAP):
        raise ConfigError(f"singular_rule must be one of "
                          f"[{SINGULAR_EXCLUDE!r}, {SINGULAR_CAP!r}], got {rule!r}")
    return rule


# -- problem presets ---------------------------------------------------------------

@dataclass
class ProblemSetup:
    """Kernel, Orlicz target, annuli majorant, and splitting map for one run."""

    n: int
    p: float
    phi: PhiKernel
    H: Optional[OrliczFunction]
    h_fn: Callable
    delta: DeltaMap
    params: dict = field(default_factory=dict)


def hedberg_setup(n: int, p: float, a: float = 1.0) -> ProblemSetup:
    """Pure-power problem: phi(t) = t**((n-a)/(n-1)), H(t) = t**(np/(n-ap)).

    The dyadic annuli sum is geometric, so h is exact:
    h(t) = t**a / (2**a - 1).  a = 1 is the classical case phi = identity.
    """
    n, p, a = int(n), float(p), float(a)
    if n < 2:
        raise ConfigError("hedberg preset needs n >= 2")
    if not (0.0 < a <= 1.0):
        raise ConfigError("hedberg preset needs smoothing order a in (0, 1]")
    if not (1.0 <= p < n / a):
        raise ConfigError(f"hedberg preset needs 1 <= p < n/a = {n / a:g}")
    alpha = (n - a) / (n - 1)
    phi = PhiKernel.identity() if alpha == 1.0 else PhiKernel.power_over_log(alpha, 0.0)
    q = n * p / (n - a * p)
    if q <= 1.0:
        raise ConfigError("hedberg preset needs an Orlicz exponent > 1")
    geom = 1.0 / (2.0 ** a - 1.0)
    return ProblemSetup(
        n, p, phi, OrliczFunction.power(q),
        lambda t: geom * t ** a, DeltaMap.power(p, n),
        {"preset": "hedberg", "n": n, "p": p, "a": a, "alpha": alpha,
         "H_exponent": q, "h_constant": geom})


def log_john_setup(n: int, p: float, alpha: float, beta: float,
                   eps: float = 0.0, delta_sharp: float = 0.0,
                   m: float = math.e) -> ProblemSetup:
    """Log-perturbed power problem: phi(t) = t**alpha / log(e + 1/t)**beta.

    The matched Orlicz target is H(t) = (t / log(m + t)**gamma)**q with
    q = np / (alpha*p*(n-1) + n*(1-p)) and gamma = beta*(n-1); `eps` inflates
    the exponent and `delta_sharp` deflates the log power, which is exactly
    the perturbation the scaling family detects.
    """
    n, p = int(n), float(p)
    alpha, beta = float(alpha), float(beta)
    eps, delta_sharp, m = float(eps), float(delta_sharp), float(m)
    if n < 2:
        raise ConfigError("log-john preset needs n >= 2")
    if not (1.0 <= alpha < 1.0 + 1.0 / (n - 1)):
        raise ConfigError(f"log-john preset needs 1 <= alpha < {1 + 1 / (n - 1):g}")
    if beta < 0 or eps < 0 or delta_sharp < 0:
        raise ConfigError("log-john preset needs beta, eps, delta_sharp >= 0")
    p_max = admissible_p_max(alpha, n)
    if not (1.0 <= p < p_max):
        raise ConfigError(f"log-john preset needs 1 <= p < n/(n-alpha(n-1)) = {p_max:g}")
    q = n * p / (alpha * p * (n - 1) + n * (1.0 - p))
    gamma = beta * (n - 1)
    if gamma - delta_sharp < 0:
        raise ConfigError("delta_sharp may not exceed beta*(n-1)")
    phi = PhiKernel.identity() if (alpha, beta) == (1.0, 0.0) \
        else PhiKernel.power_over_log(alpha, beta)
    fit = fit_annuli_constant(phi, n)
    return ProblemSetup(
        n, p, phi, OrliczFunction.power_over_log(q + eps, gamma - delta_sharp, m),
        lambda t: fit * closed_form_annuli_bound(alpha, beta, n, t),
        DeltaMap.power(p, n),
        {"preset": "log-john", "n": n, "p": p, "alpha": alpha, "beta": beta,
         "q": q, "gamma": gamma, "eps": eps, "delta_sharp": delta_sharp, "m": m,
         "h_fit_constant": fit, "p_max": p_max})


def make_setup(cfg: dict) -> ProblemSetup:
    """Build the problem data from a preset name or explicit blocks."""
    preset = cfg.get("preset")
    if preset in ("classical", "hedberg"):
        return hedberg_setup(cfg.get("n", 2), cfg.get("p", 1.5), cfg.get("a", 1.0))
    if preset == "log-john":
        return log_john_setup(cfg.get("n", 2), cfg.get("p", 1.0),
                              cfg.get("alpha", 1.0), cfg.get("beta", 0.0),
                              cfg.get("eps", 0.0), cfg.get("delta_sharp", 0.0),
                              cfg.get("m", math.e))
    if preset is not None:
        raise ConfigError(f"unknown preset {preset!r} "
                          "(choose classical, hedberg, or log-john)")

    if "kernel" not in cfg:
        raise ConfigError("config needs a preset or a kernel block")
    try:
        phi = PhiKernel.from_json(cfg["kernel"])
        H = OrliczFunction.from_json(cfg["orlicz"]) if "orlicz" in cfg else None
    except KeyError as exc:
        raise ConfigError(f"block missing required key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    n = int(cfg.get("n", 2))
    p = float(cfg.get("p", 1.0))
    if n < 2 or p < 1.0:
        raise ConfigError("explicit setup needs n >= 2 and p >= 1")
    if phi.family == "identity":
        alpha, beta = 1.0, 0.0
    elif phi.family == "power_over_log":
        alpha, beta = phi.params["alpha"], phi.params["beta"]
    else:
        raise ConfigError("explicit setup needs an identity or power-over-log kernel")
    fit = fit_annuli_constant(phi, n)
    params = {"preset": None, "n": n, "p": p, "alpha": alpha, "beta": beta,
              "kernel": phi.label, "h_fit_constant": fit}
    if H is not None:
        params["orlicz"] = H.label
    return ProblemSetup(n, p, phi, H,
                        lambda t: fit * closed_form_annuli_bound(alpha, beta, n, t),
                        DeltaMap.power(p, n), params)


# -- block builders ----------------------------------------------------------------

def build_domain(block, default_n: int = 2) -> DomainGeometry:
    if block is None:
        return cube_domain(default_n)
    block = dict(block)
    shape = block.pop("shape", "cube")
    try:
        if shape == "ball":
            out = ball_domain(block.pop("center", (0.0,) * default_n),
                              block.pop("radius", 1.0))
        elif shape == "cube":
            out = cube_domain(int(block.pop("n", default_n)),
                              float(block.pop("lo", 0.0)), float(block.pop("hi", 1.0)))
        elif shape == "box":
            out = box_domain(block.pop("bbox"))
        elif shape == "mushroom":
            gap = block.pop("gap", None)
            margin = block.pop("margin", None)
            out = mushroom_build(MushroomSpec.from_json(block), gap, margin)
            block = {}
        else:
            raise ConfigError(f"unknown domain shape {shape!r}")
    except KeyError as exc:
        raise ConfigError(f"domain block missing required key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if block:
        raise ConfigError(f"unknown domain keys: {sorted(block)}")
    return out


def grid_resolutions(cfg: dict, default) -> list:
    """Resolution ladder from the grid block (`res` for one, `resolutions` for many)."""
    block = dict(cfg.get("grid") or {})
    res = block.pop("res", None)
    ladder = block.pop("resolutions", None)
    if block:
        raise ConfigError(f"unknown grid keys: {sorted(block)}")
    if res is not None and ladder is not None:
        raise ConfigError("grid block takes either res or resolutions, not both")
    if ladder is None:
        ladder = [res] if res is not None else list(default)
    if not isinstance(ladder, (list, tuple)) or not ladder:
        raise ConfigError("grid resolutions must be a nonempty list")
    return [int(r) for r in ladder]


@dataclass
class FieldsSpec:
    family: str
    seeds: tuple
    members: Optional[tuple]
    normalize: Optional[str]


def fields_spec(cfg: dict, default_family: str) -> FieldsSpec:
    block = dict(cfg.get("fields") or {})
    family = block.pop("family", default_family)
    if family not in ("nonneg", "smooth"):
        raise ConfigError(f"fields family must be nonneg or smooth, got {family!r}")
    base = int(cfg.get("seed", 0))
    seeds = tuple(int(s) for s in block.pop("seeds", (base, base + 1)))
    members = block.pop("members", None)
    if members is not None:
        members = tuple(str(m) for m in members)
    normalize = block.pop("normalize", None)
    if normalize not in (None, "lp", "llogl", "gradient", "none"):
        raise ConfigError(f"unknown normalize mode {block.get('normalize')!r}")
    if block:
        raise ConfigError(f"unknown fields keys: {sorted(block)}")
    return FieldsSpec(family, seeds, members, normalize)


def sweep_lists(cfg: dict) -> dict:
    """Parameter lists for the conditions run, scalars promoted to lists."""
    block = dict(cfg.get("sweep") or {})
    out = {}
    for key, default in (("n", [2]), ("alpha", [1.0, 1.2, 1.5, 2.0]),
                         ("beta", [0.0, 1.0]), ("p", [1.0, 1.5, 2.0, 2.5])):
        vals = block.pop(key, default)
        if not isinstance(vals, (list, tuple)):
            vals = [vals]
        if not vals:
            raise ConfigError(f"sweep list {key!r} may not be empty")
        out[key] = [int(v) if key == "n" else float(v) for v in vals]
    if block:
        raise ConfigError(f"unknown sweep keys: {sorted(block)}")
    return out
