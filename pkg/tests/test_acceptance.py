"""Ten end-to-end guarantees the workbench advertises, one test and one line each.

Each test prints ``ACCEPTANCE <k> PASS`` with the measured numbers after its
assertions clear, and asserts its own wall-clock budget so regressions in
speed fail as loudly as regressions in accuracy.
"""

import json
import math
import time

import numpy as np
import pytest

from rieszlab import (
    GridField,
    MushroomSpec,
    OrliczFunction,
    PhiKernel,
    annuli_series,
    ball_domain,
    compatibility_sup,
    counterexample_field,
    cube_domain,
    discretize,
    divergence_profile,
    lp_norm,
    luxemburg_norm,
    maximal_function,
    maximal_function_field,
    mushroom_build,
    riesz_potential,
    tail_bound_check,
)
from rieszlab.harness.cli import main
from rieszlab.harness.config import log_john_setup
from rieszlab.harness.experiments import run_pointwise, run_sharpness

POWER_12 = PhiKernel.power_over_log(1.2, 0.0)


@pytest.fixture
def announce(capsys):
    def _announce(line):
        with capsys.disabled():
            print("\n" + line)

    return _announce


def series_values(report, name):
    for s in report.series:
        if s.name == name:
            return s.values
    raise KeyError(name)


def ball_indicator(n, res):
    grid, mask = discretize(ball_domain((0.0,) * n, 1.0), res)
    return GridField(grid, mask, mask.astype(float))


def test_acceptance_01_point_potential_sphere_area(announce):
    t0 = time.perf_counter()
    f2 = ball_indicator(2, 256)
    val2 = riesz_potential(f2, PhiKernel.identity(), (0.0, 0.0))
    t2 = time.perf_counter() - t0
    assert val2 == pytest.approx(2.0 * math.pi, rel=0.02)
    assert t2 < 5.0

    t0 = time.perf_counter()
    f3 = ball_indicator(3, 128)
    val3 = riesz_potential(f3, PhiKernel.identity(), (0.0, 0.0, 0.0))
    t3 = time.perf_counter() - t0
    assert val3 == pytest.approx(4.0 * math.pi, rel=0.03)
    assert t3 < 60.0
    announce(f"ACCEPTANCE 1 PASS — 2d {val2:.4f} vs {2 * math.pi:.4f} "
             f"({t2:.2f}s), 3d {val3:.4f} vs {4 * math.pi:.4f} ({t3:.2f}s)")


def test_acceptance_02_annuli_series_identity_and_endpoint(announce):
    t0 = time.perf_counter()
    K = 64
    worst = 0.0
    for t in (0.1, 1.0, 10.0):
        s = annuli_series(PhiKernel.identity(), 2, t, terms=K)
        err = abs(s.partial_sum - t)
        assert err <= 2.0 ** -K * t * (1 + 1e-9) + 1e-15 * t
        worst = max(worst, err / t)
    endpoint = annuli_series(PhiKernel.power_over_log(2.0, 0.0), 2, 1.0, terms=128)
    assert endpoint.diverges
    assert endpoint.terms <= 128
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    announce(f"ACCEPTANCE 2 PASS — identity series error {worst:.1e}, "
             f"endpoint flagged divergent in {endpoint.terms} terms ({elapsed:.2f}s)")


def test_acceptance_03_luxemburg_homogeneity_and_indicator(
        announce, unit_square, field_factory):
    grid, mask = unit_square
    families = [OrliczFunction.power(2.0), OrliczFunction.llogl(),
                OrliczFunction.power_over_log(5.0 / 3.0, 1.0),
                OrliczFunction.exp_minus_one()]
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        H = families[seed % len(families)]
        f = field_factory(grid, mask, seed=seed, signed=True)
        c = float(np.random.default_rng(1000 + seed).uniform(0.1, 10.0))
        base = luxemburg_norm(f, H).value
        scaled = luxemburg_norm(f.with_values(c * f.values), H).value
        rel = abs(scaled - c * base) / (c * base)
        worst = max(worst, rel)
        assert rel <= 1e-10

    c = 0.37
    p = 1.5
    gridb, maskb = discretize(ball_domain((0.0, 0.0), 1.0), 64)
    chi = GridField(gridb, maskb, c * maskb.astype(float))
    volume = float(maskb.sum()) * gridb.cellvol
    got = luxemburg_norm(chi, OrliczFunction.power(p)).value
    assert got == pytest.approx(c * volume ** (1.0 / p), rel=1e-10)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    announce(f"ACCEPTANCE 3 PASS — homogeneity worst {worst:.1e} over 100 fields, "
             f"indicator norm exact to 1e-10 ({elapsed:.2f}s)")


def test_acceptance_04_balance_sup_finite_then_flips(announce):
    t0 = time.perf_counter()
    setup = log_john_setup(2, 1.0, 1.2, 1.0)
    matched = compatibility_sup(setup.H, setup.phi, setup.h_fn, setup.delta, 1.0, 2)
    assert not matched.unbounded
    assert math.isfinite(matched.sup)
    assert matched.grid_lo <= 1e-8 and matched.grid_hi >= 1e8

    inflated = OrliczFunction.power_over_log(5.0 / 3.0 + 0.5, 1.0)
    flipped = compatibility_sup(inflated, setup.phi, setup.h_fn, setup.delta, 1.0, 2)
    assert flipped.unbounded
    assert flipped.extensions >= 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    announce(f"ACCEPTANCE 4 PASS — matched sup {matched.sup:.4g} finite, "
             f"q+0.5 unbounded after {flipped.extensions} extensions ({elapsed:.2f}s)")


def test_acceptance_05_pointwise_ratio_stable_under_refinement(announce):
    t0 = time.perf_counter()
    report = run_pointwise({"preset": "classical",
                            "grid": {"resolutions": [64, 128]}})
    overall = series_values(report, "sup-ratio-overall")
    drift = abs(overall[1] / overall[0] - 1.0)
    elapsed = time.perf_counter() - t0
    assert drift < 0.25
    assert report.verdict == "bounded"
    assert elapsed < 120.0
    announce(f"ACCEPTANCE 5 PASS — sup-ratio {overall[0]:.4f} -> {overall[1]:.4f}, "
             f"drift {100 * drift:.2f}% ({elapsed:.1f}s)")


def test_acceptance_06_maximal_exact_constants_and_sublinear(
        announce, unit_square, field_factory):
    grid, mask = unit_square
    t0 = time.perf_counter()
    c = 0.75
    const = GridField(grid, mask, np.full(grid.res, c))
    # counted-cell averages of a constant are exact; check every cell center
    for x in grid.centers().reshape(-1, grid.n):
        assert maximal_function(const, tuple(x)) == c
    mf = maximal_function_field(const)
    assert np.max(np.abs(mf.masked_values - c)) <= 1e-12 * c

    worst = 0.0
    for seed in range(20):
        f = field_factory(grid, mask, seed=seed)
        g = field_factory(grid, mask, seed=seed + 100)
        msum = maximal_function_field(GridField(grid, mask, f.values + g.values))
        bound = (maximal_function_field(f).masked_values
                 + maximal_function_field(g).masked_values)
        excess = float(np.max(msum.masked_values - bound))
        worst = max(worst, excess)
        assert excess <= 1e-12 * float(np.max(bound))
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    announce(f"ACCEPTANCE 6 PASS — constants exact, sublinearity excess "
             f"{worst:.1e} over 20 pairs ({elapsed:.2f}s)")


def test_acceptance_07_mushroom_energies_and_grid_validation(announce):
    t0 = time.perf_counter()
    radii = tuple(0.5 ** k for k in range(1, 32))
    spec = MushroomSpec(2, POWER_12, radii)
    profile = divergence_profile(spec, 1.0, OrliczFunction.power(2.0))
    ratios = profile.energies[1:] / profile.energies[:-1]
    ratio_err = float(np.max(np.abs(ratios - 2.0 ** 0.4)))
    assert ratio_err < 1e-9
    assert profile.verdict == "diverges"

    grad_errs = []
    for k in range(1, 5):
        geom = mushroom_build(MushroomSpec(2, POWER_12, (0.5 ** k,)))
        gridm, maskm = discretize(geom, 512)
        _, grad, _ = counterexample_field(geom, 1, 1.0, gridm, maskm)
        gn = lp_norm(grad, 1.0)
        grad_errs.append(abs(gn - 1.0))
        assert gn == pytest.approx(1.0, abs=0.05)

    flat = divergence_profile(spec, 1.0, OrliczFunction.power(1.5))
    assert flat.verdict == "bounded"
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    announce(f"ACCEPTANCE 7 PASS — energy ratio error {ratio_err:.1e} over 30 steps, "
             f"gradient-norm errors {[f'{e:.3f}' for e in grad_errs]}, "
             f"flat target bounded ({elapsed:.1f}s)")


def test_acceptance_08_scaling_ladder_separates_exponents(announce):
    t0 = time.perf_counter()
    base = {"preset": "log-john", "alpha": 1.2, "beta": 1.0, "p": 1.0,
            "grid": {"res": 512}, "ladder": [1, 2, 4, 8]}
    inflated = run_sharpness(dict(base, eps=0.5))
    js = series_values(inflated, "J")
    norms = series_values(inflated, "lp-norm")
    assert all(b > a for a, b in zip(js, js[1:]))
    norm_drift = max(norms) / min(norms) - 1.0
    assert norm_drift <= 0.02

    matched = run_sharpness(base)
    jm = series_values(matched, "J")
    assert jm[-1] / jm[0] < 2.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    announce(f"ACCEPTANCE 8 PASS — inflated J ratio {js[-1] / js[0]:.3f} increasing, "
             f"norm drift {100 * norm_drift:.2f}%, matched J ratio "
             f"{jm[-1] / jm[0]:.3f} < 2 ({elapsed:.1f}s)")


def test_acceptance_09_tail_bound_for_normalized_fields(announce, field_factory):
    grid, mask = discretize(cube_domain(2), 64)
    points = [(0.25, 0.25), (0.5, 0.5), (0.75, 0.75),
              (0.125, 0.875), (0.875, 0.125)]
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(10):
        f = field_factory(grid, mask, seed=seed)
        f = f.with_values(f.values / lp_norm(f, 1.0))
        for delta in (0.125, 0.25, 0.5):
            chk = tail_bound_check(f, PhiKernel.identity(), 1.0, delta, points)
            assert not chk.vacuous
            assert chk.sup <= 1.03
            worst = max(worst, chk.sup)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    announce(f"ACCEPTANCE 9 PASS — worst tail ratio {worst:.4f} <= 1.03 "
             f"over 10 fields x 3 radii ({elapsed:.2f}s)")


def test_acceptance_10_reports_byte_identical(announce, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "log-john", "alpha": 1.2, "beta": 1.0,
                               "p": 1.0, "grid": {"resolutions": [16, 24]},
                               "expect": "bounded"}))
    t0 = time.perf_counter()
    outs = []
    for tag in ("first", "second"):
        out = tmp_path / tag
        assert main(["embedding", "--config", str(cfg), "--out", str(out),
                     "--no-figures"]) == 0
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir()
                   if p.suffix in (".json", ".csv") and p.name != "run_meta.json")
    assert "report.json" in names and any(n.endswith(".csv") for n in names)
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    elapsed = time.perf_counter() - t0
    announce(f"ACCEPTANCE 10 PASS — {len(names)} artifacts byte-identical "
             f"across consecutive runs ({elapsed:.2f}s)")
