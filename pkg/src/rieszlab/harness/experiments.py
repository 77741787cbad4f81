"""Experiment drivers: one function per CLI subcommand.

Each driver consumes a validated config dict and returns an
ExperimentReport.  Drivers that dump whole fields attach them to
`report.field_dumps` (name -> GridField) for the CLI to serialize.

Every potential-type run embeds its hypothesis pre-checks (kernel slope
comparability, kernel and Orlicz doubling, the annuli majorant, the
splitting balance, and dyadic summability when p = 1) so a "bounded"
verdict can never silently ride on violated assumptions; a failed check
downgrades nothing by itself but is recorded in the notes.
"""
from __future__ import annotations

import math

import numpy as np

from ..domains import MushroomGeometry, MushroomSpec, box_domain, \
    counterexample_field, divergence_profile, mushroom_build
from ..fields import GridField, ball_average, discretize, domain_average, \
    gradient_magnitude, lp_norm, llogl_norm
from ..kernels import PhiKernel, admissible_p_max, annuli_series, compatibility_sup, \
    phi_delta2_estimate, quasi_increasing_constant
from ..orlicz import OrliczFunction, delta2_estimate, dyadic_summability, luxemburg_norm
from ..potentials import PotentialOptions, maximal_function, maximal_function_field, \
    riesz_potential, riesz_potential_field
from .config import ConfigError, build_domain, fields_spec, grid_resolutions, \
    log_john_setup, make_setup, require_keys, singular_rule, sweep_lists
from .families import nonneg_family, smooth_family
from .report import ExperimentReport, trend_verdict

_SETUP_KEYS = {"preset", "n", "p", "a", "alpha", "beta", "eps", "delta_sharp", "m",
               "kernel", "orlicz"}
_COMMON_KEYS = {"seed", "expect", "singular_rule"}

ALLOWED_KEYS = {
    "conditions": _COMMON_KEYS | {"sweep"},
    "pointwise": _SETUP_KEYS | _COMMON_KEYS | {"domain", "grid", "fields"},
    "bound": _SETUP_KEYS | _COMMON_KEYS | {"domain", "grid", "fields"},
    "representation": _SETUP_KEYS | _COMMON_KEYS | {"domain", "grid", "fields"},
    "embedding": _SETUP_KEYS | _COMMON_KEYS | {"domain", "grid", "fields"},
    "sharpness": _SETUP_KEYS | _COMMON_KEYS | {"grid", "ladder"},
    "mushroom": _COMMON_KEYS | {"domain", "orlicz", "p", "k_max", "validate_k", "grid"},
    "potential": _SETUP_KEYS | _COMMON_KEYS | {"domain", "grid", "fields"},
    "maximal": _COMMON_KEYS | {"domain", "grid", "fields", "seed"},
}


def _embed_checks(report: ExperimentReport, setup, include_balance: bool = True,
                  sample_ts=(0.1, 1.0, 10.0)) -> None:
    slope = quasi_increasing_constant(setup.phi)
    report.add_check("kernel-slope-comparability", not slope.unbounded, slope.value)
    kd2 = phi_delta2_estimate(setup.phi)
    report.add_check("kernel-doubling", not kd2.unbounded, kd2.value)

    worst, converged = 0.0, True
    for t in sample_ts:
        series = annuli_series(setup.phi, setup.n, float(t))
        if series.diverges:
            converged = False
            break
        worst = max(worst, series.partial_sum / float(setup.h_fn(t)))
    report.add_check("annuli-majorant", converged and worst <= 1.01, worst,
                     "series/h sampled at t in {0.1, 1, 10}")

    if setup.H is not None:
        hd2 = delta2_estimate(setup.H)
        report.add_check("orlicz-doubling", not hd2.unbounded, hd2.value)
        if include_balance:
            bal = compatibility_sup(setup.H, setup.phi, setup.h_fn, setup.delta,
                                    setup.p, setup.n)
            report.add_check("splitting-balance", not bal.unbounded, bal.sup,
                             f"argmax t = {bal.argmax_t:.4g}")
        if setup.p == 1.0:
            summ = dyadic_summability(setup.H)
            report.add_check("dyadic-summability", summ.converged, summ.partial_sum,
                             f"tail fraction {summ.tail_fraction:.3g}")


def _normalized(pairs, mode: str, p: float):
    """Scale fields to unit norm in the requested sense; zero fields pass through."""
    out = []
    for name, f in pairs:
        if mode == "none":
            out.append((name, f))
            continue
        if mode == "lp":
            s = lp_norm(f, p)
        elif mode == "llogl":
            s = llogl_norm(f)
        else:
            raise ConfigError(f"normalize mode {mode!r} not valid for density fields")
        out.append((name, f.with_values(f.values / s) if s > 0.0 else f))
    return out


def _check_dimension(setup, dom) -> None:
    if len(dom.bbox) != setup.n:
        raise ConfigError(f"domain dimension {len(dom.bbox)} does not match n={setup.n}")


def run_pointwise(cfg: dict) -> ExperimentReport:
    """Sup over points and fields of H(potential) / (maximal)**p across resolutions."""
    require_keys(cfg, ALLOWED_KEYS["pointwise"], "pointwise")
    setup = make_setup(cfg)
    if setup.H is None:
        raise ConfigError("pointwise needs an orlicz block or a preset")
    dom = build_domain(cfg.get("domain"), setup.n)
    _check_dimension(setup, dom)
    resolutions = grid_resolutions(cfg, default=(32, 48))
    if len(resolutions) < 2:
        raise ConfigError("pointwise needs at least two resolutions to judge drift")
    fs = fields_spec(cfg, "nonneg")
    opts = PotentialOptions(singular_rule(cfg))

    report = ExperimentReport("pointwise", {**setup.params, "domain": dom.label,
                                            "resolutions": resolutions,
                                            "seeds": list(fs.seeds),
                                            "singular_rule": opts.singular_rule},
                              expectation=cfg.get("expect"))
    _embed_checks(report, setup)

    per_field, overall = {}, []
    for res in resolutions:
        grid, mask = discretize(dom, res)
        pairs = _normalized(nonneg_family(dom, grid, mask, fs.seeds, fs.members),
                            fs.normalize or "lp", setup.p)
        sups = []
        for name, f in pairs:
            pot = riesz_potential_field(f, setup.phi, opts)
            mf = maximal_function_field(f, opts)
            den = mf.masked_values ** setup.p
            sel = den > 0.0
            if not sel.any():
                continue
            sup = float(np.max(np.asarray(setup.H(pot.masked_values[sel])) / den[sel]))
            per_field.setdefault(name, []).append((res, sup))
            sups.append(sup)
        overall.append(max(sups) if sups else 0.0)

    for name, samples in per_field.items():
        report.add_series("sup-ratio", [r for r, _ in samples], [v for _, v in samples],
                          field=name)
    report.add_series("sup-ratio-overall", resolutions, overall)
    report.constants["sup_ratio"] = max(overall) if overall else 0.0
    report.verdict = trend_verdict(overall)
    return report


def run_bound(cfg: dict) -> ExperimentReport:
    """Integral of H(potential) for normalized fields, plus the norm-ratio form."""
    require_keys(cfg, ALLOWED_KEYS["bound"], "bound")
    setup = make_setup(cfg)
    if setup.H is None:
        raise ConfigError("bound needs an orlicz block or a preset")
    dom = build_domain(cfg.get("domain"), setup.n)
    _check_dimension(setup, dom)
    resolutions = grid_resolutions(cfg, default=(32, 48))
    fs = fields_spec(cfg, "nonneg")
    normalize = fs.normalize or ("llogl" if setup.p == 1.0 else "lp")
    opts = PotentialOptions(singular_rule(cfg))

    report = ExperimentReport("bound", {**setup.params, "domain": dom.label,
                                        "resolutions": resolutions,
                                        "normalize": normalize,
                                        "seeds": list(fs.seeds),
                                        "singular_rule": opts.singular_rule},
                              expectation=cfg.get("expect"))
    _embed_checks(report, setup)

    per_field, per_field_ratio, overall = {}, {}, []
    for res in resolutions:
        grid, mask = discretize(dom, res)
        raw = nonneg_family(dom, grid, mask, fs.seeds, fs.members)
        totals = []
        for name, f in raw:
            fn = _normalized([(name, f)], normalize, setup.p)[0][1]
            pot = riesz_potential_field(fn, setup.phi, opts)
            total = float(np.sum(np.asarray(setup.H(pot.masked_values))) * grid.cellvol)
            per_field.setdefault(name, []).append((res, total))
            totals.append(total)

            # norm-ratio form on the unnormalized field
            den = llogl_norm(f) if setup.p == 1.0 else lp_norm(f, setup.p)
            if den > 0.0:
                pot_raw = riesz_potential_field(f, setup.phi, opts)
                num = luxemburg_norm(pot_raw, setup.H).value
                per_field_ratio.setdefault(name, []).append((res, num / den))
        overall.append(max(totals) if totals else 0.0)

    for name, samples in per_field.items():
        report.add_series("H-integral", [r for r, _ in samples],
                          [v for _, v in samples], field=name)
    for name, samples in per_field_ratio.items():
        report.add_series("norm-ratio", [r for r, _ in samples],
                          [v for _, v in samples], field=name)
    report.add_series("H-integral-overall", resolutions, overall)
    report.constants["H_integral_sup"] = max(overall) if overall else 0.0
    ratios = [v for s in per_field_ratio.values() for _, v in s]
    if ratios:
        report.constants["norm_ratio_sup"] = max(ratios)
    report.verdict = trend_verdict(overall)
    return report


def _smooth_pairs(dom, grid, mask, fs, p: float):
    """Smooth family members plus mushroom ramps; yields (name, u, exact_grad|None)."""
    members = list(fs.members) if fs.members is not None else None
    ramp_names = [m for m in (members or []) if m.startswith("ramp-")]
    std = [m for m in members if not m.startswith("ramp-")] if members is not None else None
    out = [(name, u, None) for name, u in smooth_family(dom, grid, mask, fs.seeds, std)]
    for name in ramp_names:
        if not isinstance(dom, MushroomGeometry):
            raise ConfigError("ramp-k fields need a mushroom domain")
        k = int(name.split("-", 1)[1])
        u, g, _ = counterexample_field(dom, k, p, grid, mask)
        out.append((name, u, g))
    return out


def run_representation(cfg: dict) -> ExperimentReport:
    """Sup of |u - u_B| / potential(|grad u|) across smooth fields and resolutions."""
    require_keys(cfg, ALLOWED_KEYS["representation"], "representation")
    setup = make_setup(cfg)
    dom = build_domain(cfg.get("domain"), setup.n)
    _check_dimension(setup, dom)
    if dom.reference_ball is None:
        raise ConfigError("representation needs a domain with a reference ball")
    center, radius = dom.reference_ball
    resolutions = grid_resolutions(cfg, default=(32, 48))
    fs = fields_spec(cfg, "smooth")
    opts = PotentialOptions(singular_rule(cfg))

    report = ExperimentReport("representation",
                              {**setup.params, "domain": dom.label,
                               "resolutions": resolutions, "seeds": list(fs.seeds),
                               "singular_rule": opts.singular_rule},
                              expectation=cfg.get("expect"))
    _embed_checks(report, setup, include_balance=setup.H is not None)

    per_field, overall, skipped = {}, [], 0
    for res in resolutions:
        grid, mask = discretize(dom, res)
        sups = []
        for name, u, exact_grad in _smooth_pairs(dom, grid, mask, fs, setup.p):
            gm = exact_grad if exact_grad is not None else gradient_magnitude(u)
            pot = riesz_potential_field(gm, setup.phi, opts)
            ub = ball_average(u, center, radius)
            num = np.abs(u.masked_values - ub)
            den = pot.masked_values
            ratio = np.zeros_like(num)
            live = num > 0.0
            bad = live & (den <= 0.0)
            skipped += int(bad.sum())
            ok = live & (den > 0.0)
            ratio[ok] = num[ok] / den[ok]
            sup = float(ratio.max()) if ratio.size else 0.0
            per_field.setdefault(name, []).append((res, sup))
            sups.append(sup)
        overall.append(max(sups) if sups else 0.0)

    for name, samples in per_field.items():
        report.add_series("sup-ratio", [r for r, _ in samples],
                          [v for _, v in samples], field=name)
    report.add_series("sup-ratio-overall", resolutions, overall)
    report.constants["representation_sup"] = max(overall) if overall else 0.0
    if skipped:
        report.notes.append(f"skipped {skipped} points with zero potential but "
                            "nonzero deviation")
    report.verdict = trend_verdict(overall)
    return report


def run_embedding(cfg: dict) -> ExperimentReport:
    """Integral of H(|u - u_B|) for gradient-normalized fields, plus the norm ratio."""
    require_keys(cfg, ALLOWED_KEYS["embedding"], "embedding")
    setup = make_setup(cfg)
    if setup.H is None:
        raise ConfigError("embedding needs an orlicz block or a preset")
    dom = build_domain(cfg.get("domain"), setup.n)
    _check_dimension(setup, dom)
    if dom.reference_ball is None:
        raise ConfigError("embedding needs a domain with a reference ball")
    center, radius = dom.reference_ball
    resolutions = grid_resolutions(cfg, default=(32, 48))
    fs = fields_spec(cfg, "smooth")
    if fs.normalize not in (None, "gradient", "none"):
        raise ConfigError("embedding normalizes by the gradient p-norm")

    report = ExperimentReport("embedding",
                              {**setup.params, "domain": dom.label,
                               "resolutions": resolutions, "seeds": list(fs.seeds)},
                              expectation=cfg.get("expect"))
    _embed_checks(report, setup)

    per_field, per_ratio, overall = {}, {}, []
    for res in resolutions:
        grid, mask = discretize(dom, res)
        totals = []
        for name, u, exact_grad in _smooth_pairs(dom, grid, mask, fs, setup.p):
            gm = exact_grad if exact_grad is not None else gradient_magnitude(u)
            if fs.normalize != "none":
                s = lp_norm(gm, setup.p)
                if s > 0.0:
                    u = u.with_values(u.values / s)
                    gm = gm.with_values(gm.values / s)
            ub = ball_average(u, center, radius)
            dev = np.abs(u.masked_values - ub)
            total = float(np.sum(np.asarray(setup.H(dev))) * grid.cellvol)
            per_field.setdefault(name, []).append((res, total))
            totals.append(total)

            grad_norm = lp_norm(gm, setup.p)
            dev_field = u.with_values(np.abs(u.values - domain_average(u)))
            num = luxemburg_norm(dev_field, setup.H).value
            ratio = 0.0 if num == 0.0 else (math.inf if grad_norm == 0.0
                                            else num / grad_norm)
            per_ratio.setdefault(name, []).append((res, ratio))
        overall.append(max(totals) if totals else 0.0)

    for name, samples in per_field.items():
        report.add_series("H-integral", [r for r, _ in samples],
                          [v for _, v in samples], field=name)
    for name, samples in per_ratio.items():
        report.add_series("norm-ratio", [r for r, _ in samples],
                          [v for _, v in samples], field=name)
    report.add_series("H-integral-overall", resolutions, overall)
    report.constants["embedding_integral_sup"] = max(overall) if overall else 0.0
    ratios = [v for s in per_ratio.values() for _, v in s if math.isfinite(v)]
    if ratios:
        report.constants["norm_ratio_sup"] = max(ratios)
    report.verdict = trend_verdict(overall)
    return report


def run_sharpness(cfg: dict) -> ExperimentReport:
    """Scaling ladder J(A) = integral of H(potential of A**(n/p) * indicator(B(0, 2/A))).

    The box G = [-2, 2]**n is fixed by the construction; the invariance
    constant records how far the measured p-norm of the rescaled field
    drifts from its A = 1 value (quadrature only).
    """
    require_keys(cfg, ALLOWED_KEYS["sharpness"], "sharpness")
    cfg = dict(cfg)
    cfg.setdefault("preset", "log-john")
    setup = make_setup(cfg)
    if setup.H is None:
        raise ConfigError("sharpness needs an orlicz block or a preset")
    ladder = cfg.get("ladder", [1.0, 2.0, 4.0, 8.0])
    if not isinstance(ladder, (list, tuple)) or len(ladder) < 2:
        raise ConfigError("ladder must list at least two scale factors")
    ladder = [float(a) for a in ladder]
    if any(a <= 0 for a in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError("ladder must be positive and strictly increasing")
    res = grid_resolutions(cfg, default=(256,))[-1]
    opts = PotentialOptions(singular_rule(cfg))

    dom = box_domain(((-2.0, 2.0),) * setup.n)
    grid, mask = discretize(dom, res)
    spacing = max(grid.spacings)
    for a in ladder:
        if 2.0 / a < 4.0 * spacing:
            raise ConfigError(f"scale A={a:g} leaves the support under-resolved at "
                              f"res {res} (needs >= 4 cells across the radius)")

    report = ExperimentReport("sharpness", {**setup.params, "ladder": ladder,
                                            "res": res,
                                            "singular_rule": opts.singular_rule},
                              expectation=cfg.get("expect"))
    _embed_checks(report, setup)

    dist = np.linalg.norm(grid.centers(), axis=-1).reshape(grid.res)
    js, norms = [], []
    for a in ladder:
        values = a ** (setup.n / setup.p) * (dist < 2.0 / a)
        fa = GridField(grid, mask, values.astype(float))
        pot = riesz_potential_field(fa, setup.phi, opts)
        js.append(float(np.sum(np.asarray(setup.H(pot.masked_values))) * grid.cellvol))
        norms.append(lp_norm(fa, setup.p))

    report.add_series("J", ladder, js)
    report.add_series("lp-norm", ladder, norms)
    drift = max(abs(v / norms[0] - 1.0) for v in norms)
    report.add_check("p-norm-invariance", drift <= 0.02, drift,
                     "measured p-norm drift across the ladder")
    report.constants["J_max"] = max(js)
    report.constants["J_growth"] = js[-1] / js[0] if js[0] > 0 else math.inf
    report.constants["norm_drift"] = drift
    report.verdict = trend_verdict(js)
    return report


def run_conditions(cfg: dict) -> ExperimentReport:
    """Admissibility sweep over (n, alpha, beta, p) with the analytic frontier."""
    require_keys(cfg, ALLOWED_KEYS["conditions"], "conditions")
    sweep = sweep_lists(cfg)
    report = ExperimentReport("conditions", {"sweep": sweep},
                              expectation=cfg.get("expect"))

    mismatches, cells = 0, 0
    for n in sweep["n"]:
        endpoint = 1.0 + 1.0 / (n - 1)
        for alpha in sweep["alpha"]:
            if alpha < 1.0:
                raise ConfigError("sweep alphas below 1 break slope comparability")
            for beta in sweep["beta"]:
                phi = PhiKernel.identity() if (alpha, beta) == (1.0, 0.0) \
                    else PhiKernel.power_over_log(alpha, beta)
                slope = quasi_increasing_constant(phi)
                kd2 = phi_delta2_estimate(phi)
                ann = annuli_series(phi, n, 1.0)
                try:
                    frontier = admissible_p_max(alpha, n)
                except ValueError:
                    frontier = None

                admissible, sups = [], []
                for p in sweep["p"]:
                    cells += 1
                    ok, sup = False, math.nan
                    if not ann.diverges and frontier is not None:
                        try:
                            sub = log_john_setup(n, p, alpha, beta)
                        except ConfigError:
                            ok = False
                        else:
                            bal = compatibility_sup(sub.H, phi, sub.h_fn, sub.delta,
                                                    p, n)
                            hd2 = delta2_estimate(sub.H)
                            summ = dyadic_summability(sub.H) if p == 1.0 else None
                            ok = not (slope.unbounded or kd2.unbounded or bal.unbounded
                                      or hd2.unbounded) \
                                and (summ is None or summ.converged)
                            sup = bal.sup
                    predicted = frontier is not None and p < frontier and not ann.diverges
                    if ok != predicted:
                        mismatches += 1
                    admissible.append(1.0 if ok else 0.0)
                    sups.append(sup)

                params = {"n": n, "alpha": alpha, "beta": beta,
                          "p_max": frontier if frontier is not None else math.inf,
                          "series_diverges": ann.diverges}
                report.add_series("admissible", sweep["p"], admissible, **params)
                report.add_series("balance-sup", sweep["p"], sups, **params)

    report.constants["cells"] = cells
    report.constants["frontier_mismatches"] = mismatches
    report.add_check("frontier-agreement", mismatches == 0, mismatches,
                     "empirical admissibility vs p < n/(n - alpha(n-1))")
    report.verdict = "bounded" if mismatches == 0 else "inconclusive"
    return report


def run_mushroom(cfg: dict) -> ExperimentReport:
    """Closed-form energy profile along the chain, with optional grid validation."""
    require_keys(cfg, ALLOWED_KEYS["mushroom"], "mushroom")
    block = dict(cfg.get("domain") or {})
    if block.pop("shape", "mushroom") != "mushroom":
        raise ConfigError("mushroom run needs a mushroom domain block")
    gap = block.pop("gap", None)
    margin = block.pop("margin", None)
    try:
        spec = MushroomSpec.from_json(block)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    p = float(cfg.get("p", 1.0))
    if p < 1.0:
        raise ConfigError("mushroom run needs p >= 1")
    if "orlicz" not in cfg:
        raise ConfigError("mushroom run needs an orlicz block")
    try:
        H = OrliczFunction.from_json(cfg["orlicz"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    k_max = int(cfg.get("k_max", spec.count))
    validate_k = [int(k) for k in cfg.get("validate_k", [])]
    res = grid_resolutions(cfg, default=(256,))[-1]

    report = ExperimentReport("mushroom",
                              {"n": spec.n, "p": p, "phi": spec.phi.label,
                               "orlicz": H.label, "k_max": k_max,
                               "count": spec.count, "r_seq_head": list(spec.r_seq[:4]),
                               "validate_k": validate_k, "res": res},
                              expectation=cfg.get("expect"))

    slope = quasi_increasing_constant(spec.phi)
    report.add_check("kernel-slope-comparability", not slope.unbounded, slope.value)
    kd2 = phi_delta2_estimate(spec.phi)
    report.add_check("kernel-doubling", not kd2.unbounded, kd2.value)
    hd2 = delta2_estimate(H)
    report.add_check("orlicz-doubling", not hd2.unbounded, hd2.value)

    try:
        profile = divergence_profile(spec, p, H, k_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ks = list(range(1, k_max + 1))
    report.add_series("energy-lower-bound", ks, profile.energies.tolist())
    report.add_series("ramp-amplitude", ks, profile.amplitudes.tolist())
    report.constants["energy_last_ratio"] = (
        profile.energies[-1] / profile.energies[-2] if k_max >= 2 else math.nan)

    grad_errs = []
    for k in validate_k:
        if not (1 <= k <= spec.count):
            raise ConfigError(f"validate_k entry {k} outside the radius sequence")
        single = MushroomSpec(spec.n, spec.phi, (spec.r_seq[k - 1],))
        geom = mushroom_build(single, gap, margin)
        grid, mask = discretize(geom, res)
        u, g, _ = counterexample_field(geom, 1, p, grid, mask)
        gn = lp_norm(g, p)
        grad_errs.append((k, abs(gn - 1.0)))
        center, radius = geom.reference_ball
        dev = np.abs(u.masked_values - ball_average(u, center, radius))
        numeric = float(np.sum(np.asarray(H(dev))) * grid.cellvol)
        lower = float(profile.energies[k - 1])
        report.add_series("grad-norm", [k], [gn], res=res)
        report.add_series("energy-numeric", [k], [numeric], res=res)
        report.add_check(f"energy-lower-bound-k{k}", numeric >= 0.99 * lower,
                         numeric / lower if lower > 0 else math.inf,
                         "grid energy vs closed-form lower bound")
    if grad_errs:
        report.constants["grad_norm_max_err"] = max(e for _, e in grad_errs)

    if profile.verdict == "diverges" and k_max >= 4:
        report.verdict = "unbounded-trend"
    elif profile.verdict == "bounded":
        report.verdict = "bounded"
    else:
        report.verdict = "inconclusive"
    return report


def _center_profile(field: GridField):
    """Values along the first axis through the middle of the grid (masked cells)."""
    grid = field.grid
    idx = [r // 2 for r in grid.res]
    sl = tuple([slice(None)] + idx[1:])
    line_mask = field.mask[sl]
    xs = grid.axes()[0][line_mask]
    return xs.tolist(), field.values[sl][line_mask].tolist()


def run_potential(cfg: dict) -> ExperimentReport:
    """Field-wide potential dump with a direct-summation cross-check at the center."""
    require_keys(cfg, ALLOWED_KEYS["potential"], "potential")
    setup = make_setup(cfg)
    dom = build_domain(cfg.get("domain"), setup.n)
    _check_dimension(setup, dom)
    res = grid_resolutions(cfg, default=(128,))[-1]
    fs = fields_spec(cfg, "nonneg")
    opts = PotentialOptions(singular_rule(cfg))

    report = ExperimentReport("potential", {**setup.params, "domain": dom.label,
                                            "res": res, "seeds": list(fs.seeds),
                                            "singular_rule": opts.singular_rule},
                              expectation=cfg.get("expect"))
    report.field_dumps = {}
    _embed_checks(report, setup, include_balance=setup.H is not None)

    grid, mask = discretize(dom, res)
    pairs = _normalized(nonneg_family(dom, grid, mask, fs.seeds, fs.members),
                        fs.normalize or "none", setup.p)
    center = np.array([0.5 * (lo + hi) for lo, hi in grid.bbox])
    gaps, sup = [], 0.0
    for name, f in pairs:
        pot = riesz_potential_field(f, setup.phi, opts)
        report.field_dumps[name] = pot
        xs, vals = _center_profile(pot)
        report.add_series("center-profile", xs, vals, field=name)
        direct = riesz_potential(f, setup.phi, center, opts)
        ci = grid.cell_index(center)
        gaps.append(abs(direct - float(pot.values[ci])))
        sup = max(sup, float(pot.masked_values.max()) if pot.masked_values.size else 0.0)

    report.constants["potential_sup"] = sup
    report.constants["fft_direct_gap"] = max(gaps) if gaps else 0.0
    report.add_check("route-agreement", (max(gaps) if gaps else 0.0) <= 1e-8 * max(sup, 1.0),
                     max(gaps) if gaps else 0.0,
                     "stencil route vs direct summation at the center")
    report.verdict = "vacuous" if sup == 0.0 else "bounded"
    return report


def run_maximal(cfg: dict) -> ExperimentReport:
    """Field-wide maximal-function dump with direct checks and sublinearity probes."""
    require_keys(cfg, ALLOWED_KEYS["maximal"], "maximal")
    dom = build_domain(cfg.get("domain"), 2)
    res = grid_resolutions(cfg, default=(128,))[-1]
    fs = fields_spec(cfg, "nonneg")
    opts = PotentialOptions(singular_rule(cfg))

    report = ExperimentReport("maximal", {"domain": dom.label, "res": res,
                                          "seeds": list(fs.seeds),
                                          "singular_rule": opts.singular_rule},
                              expectation=cfg.get("expect"))
    report.field_dumps = {}

    grid, mask = discretize(dom, res)
    pairs = nonneg_family(dom, grid, mask, fs.seeds, fs.members)
    center = np.array([0.5 * (lo + hi) for lo, hi in grid.bbox])
    gaps, sup = [], 0.0
    mfs = []
    for name, f in pairs:
        mf = maximal_function_field(f, opts)
        mfs.append((name, f, mf))
        report.field_dumps[name] = mf
        xs, vals = _center_profile(mf)
        report.add_series("center-profile", xs, vals, field=name)
        gaps.append(abs(maximal_function(f, center, opts)
                        - float(mf.values[grid.cell_index(center)])))
        sup = max(sup, float(mf.masked_values.max()) if mf.masked_values.size else 0.0)

    # sublinearity probe on consecutive pairs: M(f+g) <= Mf + Mg pointwise
    excess = 0.0
    for (_, f, mf), (_, g, mg) in zip(mfs, mfs[1:]):
        both = maximal_function_field(f.with_values(f.values + g.values), opts)
        excess = max(excess, float(np.max(both.masked_values
                                          - mf.masked_values - mg.masked_values)))
    report.constants["maximal_sup"] = sup
    report.constants["fft_direct_gap"] = max(gaps) if gaps else 0.0
    report.constants["sublinearity_excess"] = excess
    report.add_check("route-agreement", (max(gaps) if gaps else 0.0) <= 1e-8 * max(sup, 1.0),
                     max(gaps) if gaps else 0.0)
    report.add_check("sublinearity", excess <= 1e-9 * max(sup, 1.0), excess,
                     "max over masked cells of M(f+g) - Mf - Mg")
    report.verdict = "vacuous" if sup == 0.0 else "bounded"
    return report


RUNNERS = {
    "conditions": run_conditions,
    "pointwise": run_pointwise,
    "bound": run_bound,
    "representation": run_representation,
    "embedding": run_embedding,
    "mushroom": run_mushroom,
    "sharpness": run_sharpness,
    "potential": run_potential,
    "maximal": run_maximal,
}
