"""Discrete Riesz potential, maximal operator, and the two bound checkers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszlab import (
    GridField,
    PhiKernel,
    PotentialOptions,
    SINGULAR_CAP,
    SINGULAR_EXCLUDE,
    annulus_bound_check,
    ball_domain,
    box_domain,
    cube_domain,
    discretize,
    dyadic_radii,
    lp_norm,
    maximal_function,
    maximal_function_field,
    riesz_potential,
    riesz_potential_field,
    tail_bound_check,
)

IDENTITY = PhiKernel.identity()


def _indicator_ball(res=64, radius=1.0, box=1.5):
    dom = box_domain(((-box, box), (-box, box)))
    grid, mask = discretize(dom, res)
    r = np.linalg.norm(grid.centers(), axis=1).reshape(grid.res)
    return GridField(grid, mask, (r <= radius).astype(float))


# -- options and radii ---------------------------------------------------------

def test_dyadic_radii_structure(unit_square):
    grid, _ = unit_square
    radii = dyadic_radii(grid)
    h = max(grid.spacings)
    assert radii[0] == h
    assert radii[-1] == grid.diameter
    assert all(b > a for a, b in zip(radii, radii[1:]))
    assert all(radii[i + 1] == 2.0 * radii[i] for i in range(len(radii) - 2))


def test_options_validation(unit_square):
    grid, _ = unit_square
    with pytest.raises(ValueError):
        PotentialOptions("drop-everything")
    with pytest.raises(ValueError):
        PotentialOptions(radii=(0.5, 0.25, 2.0)).radii_for(grid)
    with pytest.raises(ValueError):
        PotentialOptions(radii=(1e-6, 2.0)).radii_for(grid)
    with pytest.raises(ValueError):
        PotentialOptions(radii=(0.5, 1.0)).radii_for(grid)  # never reaches the diameter


# -- Riesz potential -------------------------------------------------------------

def test_potential_zero_field(unit_square):
    grid, mask = unit_square
    pot = riesz_potential(GridField(grid, mask, np.zeros(grid.res)), IDENTITY, (0.5, 0.5))
    assert pot == 0.0


def test_potential_ball_indicator_oracle_2d():
    # f = indicator of B(0,1), phi = t, x = 0: integral of 1/|y| over the ball is 2*pi.
    f = _indicator_ball(res=96)
    pot = riesz_potential(f, IDENTITY, (0.0, 0.0))
    assert pot == pytest.approx(2.0 * math.pi, rel=0.02)


def test_potential_linear_in_field(field_factory, unit_square):
    grid, mask = unit_square
    f = field_factory(grid, mask, seed=1)
    base = riesz_potential(f, IDENTITY, (0.3, 0.6))
    assert riesz_potential(f.with_values(2.0 * f.values), IDENTITY, (0.3, 0.6)) == 2.0 * base
    got = riesz_potential(f.with_values(0.37 * f.values), IDENTITY, (0.3, 0.6))
    assert got == pytest.approx(0.37 * base, rel=1e-12)


def test_potential_monotone_in_field(field_factory, unit_square):
    grid, mask = unit_square
    f = field_factory(grid, mask, seed=2)
    g = f.with_values(f.values + 0.3)
    for x in ((0.1, 0.1), (0.5, 0.5), (0.9, 0.2)):
        assert riesz_potential(f, IDENTITY, x) <= riesz_potential(g, IDENTITY, x) + 1e-12


def test_potential_field_route_matches_direct(field_factory):
    grid, mask = discretize(ball_domain((0.0, 0.0), 1.0), 48)
    f = field_factory(grid, mask, seed=3)
    phi = PhiKernel.power_over_log(1.2, 1.0)
    pot = riesz_potential_field(f, phi)
    centers = grid.centers().reshape(*grid.res, 2)
    for idx in ((5, 24), (24, 24), (40, 10)):
        if not mask[idx]:
            continue
        direct = riesz_potential(f, phi, centers[idx])
        assert pot.values[idx] == pytest.approx(direct, rel=1e-12)


def test_singular_rules_differ_by_self_cell(field_factory, unit_square):
    grid, mask = unit_square
    f = field_factory(grid, mask, seed=4)
    x = (0.4375, 0.5625)  # a cell center
    idx = grid.cell_index(x)
    h_half = 0.5 * grid.cellvol ** 0.5
    excl = riesz_potential(f, IDENTITY, x, PotentialOptions(SINGULAR_EXCLUDE))
    cap = riesz_potential(f, IDENTITY, x, PotentialOptions(SINGULAR_CAP))
    self_term = abs(f.values[idx]) * float(IDENTITY(h_half)) ** (1 - 2) * grid.cellvol
    assert cap - excl == pytest.approx(self_term, rel=1e-12)


def test_singular_rules_agree_at_acceptance_resolution():
    f = _indicator_ball(res=256)
    excl = riesz_potential(f, IDENTITY, (0.0, 0.0), PotentialOptions(SINGULAR_EXCLUDE))
    cap = riesz_potential(f, IDENTITY, (0.0, 0.0), PotentialOptions(SINGULAR_CAP))
    assert abs(cap - excl) / excl < 0.05


def test_potential_rejects_vanishing_kernel(unit_square):
    grid, mask = unit_square
    hinge = PhiKernel.custom(lambda t: np.maximum(np.asarray(t) - 0.25, 0.0),
                             lambda y: y + 0.25, label="hinge")
    f = GridField(grid, mask, np.ones(grid.res))
    with pytest.raises(ValueError):
        riesz_potential(f, hinge, (0.5, 0.5))


# -- maximal function --------------------------------------------------------------

def test_maximal_constant_is_exact(unit_square):
    grid, mask = unit_square
    f = GridField(grid, mask, np.full(grid.res, 0.75))
    for x in ((0.015625, 0.015625), (0.5, 0.5), (0.984375, 0.515625)):
        assert maximal_function(f, x) == 0.75


def test_maximal_indicator_center_is_one():
    f = _indicator_ball(res=64)
    assert maximal_function(f, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-9)


def test_maximal_offset_point_lens_oracle():
    # x at distance 2 from a unit ball: sup over r of |B(x,r) ∩ B(0,1)| / |B(x,r)|,
    # evaluated against the exact two-circle lens area on a dense radius grid.
    # The box is large enough that near-optimal balls stay inside it, so the
    # counted-cell denominator matches the full disc area.
    dom = box_domain(((-2.0, 6.0), (-4.0, 4.0)))
    grid, mask = discretize(dom, 128)
    r = np.linalg.norm(grid.centers(), axis=1).reshape(grid.res)
    f = GridField(grid, mask, (r <= 1.0).astype(float))
    h = max(grid.spacings)
    dense = tuple(np.linspace(h, grid.diameter, 600)) + (grid.diameter,)
    got = maximal_function(f, (2.0, 0.0), PotentialOptions(radii=tuple(sorted(set(dense)))))

    def lens(d, r1, r2):
        if d >= r1 + r2:
            return 0.0
        if d <= abs(r1 - r2):
            return math.pi * min(r1, r2) ** 2
        a1 = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
        a2 = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
        return a1 + a2 - 0.5 * math.sqrt(
            (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))

    rs = np.linspace(1.0, 4.0, 4000)
    oracle = max(lens(2.0, float(r), 1.0) / (math.pi * r * r) for r in rs)
    assert got == pytest.approx(oracle, rel=0.05)


def test_maximal_dominates_domain_average(field_factory, unit_square):
    grid, mask = unit_square
    f = field_factory(grid, mask, seed=7)
    avg = float(np.mean(np.abs(f.values)))
    for x in ((0.1, 0.9), (0.5, 0.5)):
        assert maximal_function(f, x) >= avg - 1e-12


def test_maximal_field_matches_direct(field_factory):
    grid, mask = discretize(cube_domain(2), 48)
    f = field_factory(grid, mask, seed=8)
    mf = maximal_function_field(f)
    centers = grid.centers().reshape(*grid.res, 2)
    for idx in ((0, 0), (17, 31), (24, 24), (47, 3)):
        assert mf.values[idx] == pytest.approx(
            maximal_function(f, centers[idx]), rel=1e-12)


def test_maximal_scaling_exact(field_factory, unit_square):
    grid, mask = unit_square
    f = field_factory(grid, mask, seed=10)
    mf = maximal_function_field(f)
    m2f = maximal_function_field(f.with_values(2.0 * f.values))
    assert np.array_equal(m2f.values, 2.0 * mf.values)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_maximal_sublinear(seed, field_factory, unit_square):
    grid, mask = unit_square
    rng = np.random.default_rng(seed)
    f = GridField(grid, mask, rng.random(grid.res))
    g = GridField(grid, mask, rng.random(grid.res))
    fg = f.with_values(f.values + g.values)
    excess = maximal_function_field(fg).values - (
        maximal_function_field(f).values + maximal_function_field(g).values)
    assert float(excess.max()) <= 1e-12 * float(maximal_function_field(fg).values.max())


# -- near-ball (annuli) bound -------------------------------------------------------

def test_annulus_check_constant_field_oracle():
    # f = 1 on the unit square, identity kernel: near integral at the center is
    # 2*pi*delta while h(delta) * Mf = delta, so the ratio lands on 2*pi.
    grid, mask = discretize(cube_domain(2), 128)
    f = GridField(grid, mask, np.ones(grid.res))
    for delta in (0.125, 0.25):
        chk = annulus_bound_check(f, IDENTITY, lambda t: t, delta, [(0.5, 0.5)])
        assert not chk.vacuous
        assert chk.sup == pytest.approx(2.0 * math.pi, rel=0.03)


def test_annulus_check_zero_field_vacuous(unit_square):
    grid, mask = unit_square
    f = GridField(grid, mask, np.zeros(grid.res))
    chk = annulus_bound_check(f, IDENTITY, lambda t: t, 0.25, [(0.5, 0.5)])
    assert chk.vacuous
    assert chk.points_used == 0


def test_annulus_check_validation(unit_square):
    grid, mask = unit_square
    f = GridField(grid, mask, np.ones(grid.res))
    with pytest.raises(ValueError):
        annulus_bound_check(f, IDENTITY, lambda t: t, 0.0, [(0.5, 0.5)])
    with pytest.raises(ValueError):
        annulus_bound_check(f, IDENTITY, lambda t: 0.0 * t, 0.25, [(0.5, 0.5)])


def test_annulus_check_stable_under_refinement(field_factory):
    sups = []
    for res in (32, 64):
        grid, mask = discretize(cube_domain(2), res)
        f = field_factory(grid, mask, seed=12)
        chk = annulus_bound_check(f, IDENTITY, lambda t: t, 0.25,
                                  [(0.3, 0.3), (0.5, 0.5), (0.7, 0.6)])
        sups.append(chk.sup)
    assert abs(sups[1] - sups[0]) / sups[0] < 0.2


# -- far (tail) bound ----------------------------------------------------------------

def test_tail_check_p1_bounded_by_one(field_factory, unit_square):
    grid, mask = unit_square
    f = field_factory(grid, mask, seed=13)
    f = f.with_values(f.values / lp_norm(f, 1.0))
    for delta in (0.125, 0.25, 0.5):
        chk = tail_bound_check(f, IDENTITY, 1.0, delta, [(0.5, 0.5), (0.1, 0.8)])
        assert chk.sup <= 1.03


def test_tail_check_requires_normalization(unit_square):
    grid, mask = unit_square
    f = GridField(grid, mask, np.full(grid.res, 5.0))
    with pytest.raises(ValueError):
        tail_bound_check(f, IDENTITY, 1.0, 0.25, [(0.5, 0.5)])


def test_tail_check_supported_inside_ball_is_zero(unit_square):
    grid, mask = unit_square
    vals = np.zeros(grid.res)
    vals[14:18, 14:18] = 1.0
    f = GridField(grid, mask, vals)
    f = f.with_values(vals / lp_norm(f, 1.0))
    chk = tail_bound_check(f, IDENTITY, 1.0, 0.5, [(0.5, 0.5)])
    assert chk.sup == 0.0
