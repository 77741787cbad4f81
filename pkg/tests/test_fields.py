"""Grids, discretization masks, finite-difference gradients, and integral norms."""

import csv
import math

import numpy as np
import pytest

from rieszlab import (
    DomainGeometry,
    Grid,
    GridField,
    ball_average,
    ball_domain,
    cube_domain,
    discretize,
    domain_average,
    field_to_csv,
    gradient_magnitude,
    lp_norm,
)


# -- grid geometry -----------------------------------------------------------------

def test_grid_spacings_and_cellvol():
    g = Grid(((0.0, 1.0), (0.0, 2.0)), (8, 16))
    assert g.spacings == (1.0 / 8, 2.0 / 16)
    assert g.cellvol == pytest.approx((1.0 / 8) * (2.0 / 16), rel=1e-15)
    assert g.diameter == pytest.approx(math.sqrt(5.0), rel=1e-15)
    assert g.n == 2


def test_grid_axes_are_cell_centers():
    g = Grid(((0.0, 1.0),), (4,))
    assert np.allclose(g.axes()[0], [0.125, 0.375, 0.625, 0.875])
    centers = g.centers()
    assert centers.shape == (4, 1)


def test_grid_cell_index():
    g = Grid(((0.0, 1.0), (0.0, 1.0)), (10, 10))
    assert g.cell_index((0.05, 0.95)) == (0, 9)
    assert g.cell_index((1.0, 1.0)) == (9, 9)  # top corner clamps into the last cell
    assert g.cell_index((1.5, 0.5)) is None


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(((0.0, 1.0),), (8, 8))
    with pytest.raises(ValueError):
        Grid(((1.0, 0.0),), (8,))
    with pytest.raises(ValueError):
        Grid(((0.0, 1.0),), (0,))


# -- discretization ------------------------------------------------------------------

def test_discretize_unit_square_full_mask():
    grid, mask = discretize(cube_domain(2), 64)
    assert mask.shape == (64, 64)
    assert int(mask.sum()) == 64 * 64


def test_discretize_ball_area_oracle():
    grid, mask = discretize(ball_domain((0.0, 0.0), 1.0), 256)
    area = float(mask.sum()) * grid.cellvol
    assert area == pytest.approx(math.pi, rel=0.01)


def test_discretize_rejects_coarse_and_empty():
    with pytest.raises(ValueError):
        discretize(cube_domain(2), 4)
    hollow = DomainGeometry("hollow", lambda x: np.zeros(x.shape[:-1], dtype=bool),
                            ((0.0, 1.0), (0.0, 1.0)))
    with pytest.raises(ValueError):
        discretize(hollow, 16)


def test_reference_ball_inside_domain():
    for dom in (cube_domain(2), ball_domain((0.0, 0.0), 1.0)):
        center, radius = dom.reference_ball
        assert dom.inside(np.asarray(center)[None, :])[0]
        rng = np.random.default_rng(0)
        direction = rng.normal(size=(32, len(center)))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        pts = np.asarray(center) + 0.9 * radius * direction
        assert dom.inside(pts).all()


# -- field container -----------------------------------------------------------------

def test_gridfield_validation(unit_square):
    grid, mask = unit_square
    with pytest.raises(ValueError):
        GridField(grid, mask, np.zeros((8, 8)))
    vals = np.zeros(grid.res)
    vals[0, 0] = math.nan
    with pytest.raises(ValueError):
        GridField(grid, mask, vals)


def test_gridfield_allows_nonfinite_off_mask():
    grid, mask = discretize(ball_domain((0.0, 0.0), 1.0), 16)
    vals = np.where(mask, 1.0, math.inf)
    u = GridField(grid, mask, vals)
    assert np.all(u.zero_extended()[~mask] == 0.0)


# -- gradients --------------------------------------------------------------------

def test_gradient_constant_is_zero(unit_square):
    # one-sided boundary stencils cancel only to rounding, hence the tolerance
    grid, mask = unit_square
    g = gradient_magnitude(GridField(grid, mask, np.full(grid.res, 3.7)))
    assert np.max(np.abs(g.masked_values)) < 1e-12


def test_gradient_linear_exact(unit_square):
    grid, mask = unit_square
    u = GridField.from_function(grid, mask, lambda x: 2.0 * x[:, 0] - 0.5 * x[:, 1])
    g = gradient_magnitude(u)
    want = math.sqrt(2.0 ** 2 + 0.5 ** 2)
    assert np.max(np.abs(g.masked_values - want)) < 1e-12


def test_gradient_linear_exact_on_irregular_mask():
    # One-sided differences at the mask boundary stay exact for linear fields.
    grid, mask = discretize(ball_domain((0.0, 0.0), 1.0), 32)
    u = GridField.from_function(grid, mask, lambda x: x[:, 0])
    g = gradient_magnitude(u)
    assert np.max(np.abs(g.masked_values - 1.0)) < 1e-10


def test_gradient_trig_second_order():
    grid, mask = discretize(cube_domain(2), 128)
    u = GridField.from_function(grid, mask, lambda x: np.sin(math.pi * x[:, 0]))
    g = gradient_magnitude(u)
    exact = math.pi * np.abs(np.cos(math.pi * grid.centers()[:, 0])).reshape(grid.res)
    assert np.max(np.abs(g.values - exact)) < 1e-3


# -- norms and averages ---------------------------------------------------------------

def test_lp_norm_constant_closed_form():
    grid, mask = discretize(ball_domain((0.0, 0.0), 1.0), 128)
    V = float(mask.sum()) * grid.cellvol
    u = GridField(grid, mask, np.where(mask, 2.0, 0.0))
    for p in (1.0, 1.5, 3.0):
        assert lp_norm(u, p) == pytest.approx(2.0 * V ** (1.0 / p), rel=1e-12)


def test_lp_norm_quadratic_oracle(unit_square):
    grid, mask = unit_square
    u = GridField.from_function(grid, mask, lambda x: x[:, 0])
    # midpoint quadrature of x^2 on [0,1]^2; exact value 1/3
    assert lp_norm(u, 2.0) == pytest.approx(math.sqrt(1.0 / 3.0), rel=1e-3)


def test_lp_norm_refinement_stability():
    vals = []
    for res in (32, 64):
        grid, mask = discretize(cube_domain(2), res)
        u = GridField.from_function(
            grid, mask, lambda x: np.sin(math.pi * x[:, 0]) * np.sin(math.pi * x[:, 1]))
        vals.append(lp_norm(u, 1.5))
    assert abs(vals[1] - vals[0]) / vals[0] < 0.01


def test_domain_average_linear_midpoint_exact(unit_square):
    grid, mask = unit_square
    u = GridField.from_function(grid, mask, lambda x: x[:, 0])
    assert domain_average(u) == pytest.approx(0.5, abs=1e-12)


def test_domain_average_centering(unit_square, field_factory):
    grid, mask = unit_square
    u = field_factory(grid, mask, seed=9, signed=True)
    centered = u.with_values(u.values - domain_average(u))
    assert abs(domain_average(centered)) < 1e-12


def test_ball_average_constant(unit_square):
    grid, mask = unit_square
    u = GridField(grid, mask, np.full(grid.res, 1.25))
    assert ball_average(u, (0.5, 0.5), 0.25) == 1.25


def test_ball_average_empty_ball_raises(unit_square):
    grid, mask = unit_square
    u = GridField(grid, mask, np.ones(grid.res))
    with pytest.raises(ValueError):
        ball_average(u, (10.0, 10.0), 0.01)


# -- CSV dump -----------------------------------------------------------------------

def test_field_to_csv_round_trip(tmp_path):
    grid, mask = discretize(ball_domain((0.0, 0.0), 1.0), 8)
    u = GridField.from_function(grid, mask, lambda x: x[:, 0] + 2.0 * x[:, 1])
    path = tmp_path / "field.csv"
    field_to_csv(u, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["cell", "i0", "i1", "x0", "x1", "inside", "value"]
    assert len(rows) == 1 + 64
    centers = grid.centers()
    for row in rows[1:5]:
        flat = int(row[0])
        assert float(row[3]) == pytest.approx(centers[flat][0], rel=1e-15)
        got = float(row[6])
        want = centers[flat][0] + 2.0 * centers[flat][1]
        assert got == pytest.approx(want, rel=1e-15)
