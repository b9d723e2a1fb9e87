"""Tests for Schwarz symmetrization of grid fields into model spaces."""

import math

import numpy as np
import pytest

from geoball.model import make_space_form
from geoball.model import euclidean_profile
from geoball.pde import PolarGrid, field_from_function, make_grid
from geoball.surface import ball_area, builtin_example_metric, radial_metric
from geoball.symmetrize import (
    ComparisonPreconditionError,
    NegativeFieldError,
    check_equimeasurable,
    integral_identity_check,
    level_profile,
    symmetrize_field,
    symmetrized_profile_comparison,
    symmetrized_radius,
    transplant_exit_time,
)


@pytest.fixture(scope="module")
def flat():
    return radial_metric(euclidean_profile())


@pytest.fixture(scope="module")
def flat_model():
    return make_space_form(0.0, 2)


def test_symmetrized_radius_euclidean(flat_model):
    assert symmetrized_radius(math.pi, flat_model) == pytest.approx(1.0, abs=1e-10)


def test_symmetrized_radius_hyperbolic():
    model = make_space_form(-1.0, 2)
    V = 2 * math.pi * (math.cosh(1.0) - 1.0)
    assert symmetrized_radius(V, model) == pytest.approx(1.0, abs=1e-9)


def test_symmetrized_radius_example_exceeds_one(flat_model):
    ex = builtin_example_metric()
    assert symmetrized_radius(ball_area(ex, 1.0), flat_model) > 1.0


def test_level_profile_constant_field(flat, flat_model):
    grid = make_grid(flat, 1.0, 32, 32)
    f = field_from_function(grid, lambda r, t: 3.0 + 0.0 * np.asarray(r)
                            + 0.0 * np.asarray(t))
    prof = level_profile(f, grid)
    assert len(prof.values) == 1
    assert prof.values[0] == 3.0
    assert prof.volumes[0] == pytest.approx(prof.total_volume)
    assert prof.integral() == pytest.approx(3.0 * prof.total_volume)


def test_level_profile_rejects_negative(flat):
    grid = make_grid(flat, 1.0, 32, 32)
    f = field_from_function(grid, lambda r, t: np.asarray(r) - 0.5
                            + 0.0 * np.asarray(t))
    with pytest.raises(NegativeFieldError):
        level_profile(f, grid)


def test_level_profile_exit_time_mu(flat, flat_model):
    # mu(t) = pi*(1 - 4t) for the unit-disk exit time (1 - r^2)/4
    grid = make_grid(flat, 1.0, 128, 128)
    f = transplant_exit_time(flat_model, 1.0, grid)
    prof = level_profile(f, grid)
    ts = np.linspace(0.0, 0.24, 25)
    assert np.max(np.abs(prof.mu(ts) - math.pi * (1 - 4 * ts))) < 1e-2 * math.pi


def test_layer_cake_identity(flat, flat_model):
    grid = make_grid(flat, 1.0, 64, 64)
    f = transplant_exit_time(flat_model, 1.0, grid)
    prof = level_profile(f, grid)
    assert prof.integral() == pytest.approx(f.integral(), rel=1e-12)


def test_symmetrize_self_case(flat, flat_model):
    grid = make_grid(flat, 1.0, 128, 128)
    f = transplant_exit_time(flat_model, 1.0, grid)
    fstar = symmetrize_field(f, grid, flat_model)
    rho = np.linspace(0.0, 0.99, 50)
    assert np.max(np.abs(fstar(rho) - (1 - rho**2) / 4)) < 1e-3
    assert np.all(np.diff(fstar.values) <= 1e-15)


def test_symmetrize_example_structure(flat_model):
    ex = builtin_example_metric()
    grid = make_grid(ex, 1.0, 128, 128)
    f = transplant_exit_time(flat_model, 1.0, grid)
    fstar = symmetrize_field(f, grid, flat_model)
    assert np.all(np.diff(fstar.values) <= 1e-15)
    assert fstar.values[-1] == pytest.approx(0.0, abs=1e-12)
    assert fstar.radius > 1.0  # symmetrized ball is larger than the disk


def test_equimeasurability_halves_under_refinement(flat, flat_model):
    devs = []
    for n in (128, 256):
        grid = make_grid(flat, 1.0, n, n)
        f = transplant_exit_time(flat_model, 1.0, grid)
        fstar = symmetrize_field(f, grid, flat_model)
        devs.append(check_equimeasurable(f, fstar, flat_model, grid))
    assert devs[0] <= 1e-2
    assert devs[1] <= 0.6 * devs[0]


def test_transplant_oracle(flat, flat_model):
    grid = make_grid(flat, 1.0, 128, 128)
    f = transplant_exit_time(flat_model, 1.0, grid)
    i = np.argmin(np.abs(grid.radii[1:] - 0.5))
    assert f.rings[i, 0] == pytest.approx(0.1875, abs=1e-6)
    assert np.all(f.rings[-1] == 0.0)


def test_transplant_requires_matching_radius(flat, flat_model):
    grid = make_grid(flat, 1.0, 32, 32)
    with pytest.raises(ValueError):
        transplant_exit_time(flat_model, 2.0, grid)


def test_integral_identity_self_case(flat, flat_model):
    lhs, rhs = integral_identity_check(flat, flat_model, 1.0)
    assert lhs == pytest.approx(math.pi / 8, rel=1e-3)
    assert rhs == pytest.approx(math.pi / 8, rel=1e-3)


def test_integral_identity_example(flat_model):
    ex = builtin_example_metric()
    lhs, rhs = integral_identity_check(ex, flat_model, 1.0)
    assert rhs == pytest.approx(lhs, rel=1e-2)


def test_profile_comparison_self_case(flat, flat_model):
    rep = symmetrized_profile_comparison(flat, flat_model, 1.0)
    assert rep.direction == "equal"
    assert rep.s_R == pytest.approx(1.0, abs=1e-6)
    assert abs(rep.min_margin) <= 1e-3


def test_profile_comparison_example(flat_model):
    ex = builtin_example_metric()
    rep = symmetrized_profile_comparison(ex, flat_model, 1.0)
    assert rep.direction == "model<=M"
    assert rep.s_R > 1.0
    assert rep.min_margin >= -1e-5  # endpoint grid noise only
    rep_half = symmetrized_profile_comparison(ex, flat_model, 0.5)
    assert rep_half.min_margin >= -1e-5


def test_profile_comparison_rejects_mixed_hypothesis():
    from geoball.surface import perturbed_flat_metric

    m = perturbed_flat_metric(0.2, 2)
    model = make_space_form(-1.0, 2)
    with pytest.raises(ComparisonPreconditionError):
        symmetrized_profile_comparison(m, model, 2.0)


def test_symmetrization_idempotent(flat, flat_model):
    grid = make_grid(flat, 1.0, 128, 128)
    f = transplant_exit_time(flat_model, 1.0, grid)
    fstar = symmetrize_field(f, grid, flat_model)
    # wrap f* back onto a radial grid field and symmetrize again
    grid2 = PolarGrid(metric=flat, R=fstar.radius, n_r=128, n_theta=128)
    f2 = field_from_function(
        grid2, lambda r, t: np.maximum(fstar(np.asarray(r)), 0.0)
        + 0.0 * np.asarray(t)
    )
    fstar2 = symmetrize_field(f2, grid2, flat_model)
    rho = np.linspace(0.0, fstar.radius * 0.98, 64)
    assert np.max(np.abs(fstar2(rho) - fstar(rho))) < 2e-3
