"""Tests for the comparison-theorem harness."""

import math

import pytest

from geoball.model import euclidean_profile, make_space_form
from geoball.surface import builtin_example_metric, radial_metric, sphere_length
from geoball.symmetrize import ComparisonPreconditionError
from geoball.verify import (
    run_verification,
    verify_eigenvalue,
    verify_isoperimetric_volumes,
    verify_mean_exit,
    verify_moment_spectrum,
    verify_torsional,
)


@pytest.fixture(scope="module")
def example():
    return builtin_example_metric()


@pytest.fixture(scope="module")
def flat_model():
    return make_space_form(0.0, 2)


@pytest.fixture(scope="module")
def flat_wrapper():
    return radial_metric(euclidean_profile())


@pytest.fixture(scope="module")
def example_report(example, flat_model):
    return run_verification(example, flat_model, 1.0)


def test_example_report_all_pass(example_report):
    assert example_report.all_passed
    assert example_report.direction == "model<=M"
    assert example_report.hypothesis_min_margin > 0


def test_example_report_positive_margins(example_report):
    for e in example_report.entries:
        assert e.margin > 0, e.name


def test_mean_exit_example(example, flat_model):
    e = verify_mean_exit(example, flat_model, 1.0)
    assert e.passed
    assert e.margin > 0


def test_isoperimetric_example(example, flat_model):
    entries = verify_isoperimetric_volumes(example, flat_model, 1.0)
    assert len(entries) == 9
    assert all(e.passed for e in entries)
    assert sphere_length(example, 1.0) == pytest.approx(
        2 * math.pi * (1 + 1 / math.sqrt(2)), rel=1e-6
    )


def test_moment_spectrum_example(example, flat_model):
    entries = verify_moment_spectrum(example, flat_model, 1.0, k_max=5)
    assert len(entries) == 10
    assert all(e.passed for e in entries)


def test_torsional_example(example, flat_model):
    entries = verify_torsional(example, flat_model, 1.0)
    assert all(e.passed for e in entries)
    rigidity = entries[0]
    assert rigidity.lhs >= rigidity.rhs  # A_1 of the symmetrized ball wins


def test_eigenvalue_example(example, flat_model):
    e = verify_eigenvalue(example, flat_model, 1.0)
    assert e.passed
    # the model eigenvalue is the Bessel value; the disk's must exceed it
    assert e.rhs == pytest.approx(5.783185962946785, rel=1e-6)
    assert e.lhs > e.rhs


def test_eigenvalue_scaling(example, flat_model):
    e1 = verify_eigenvalue(example, flat_model, 1.0)
    e2 = verify_eigenvalue(example, flat_model, 0.5)
    assert e2.rhs == pytest.approx(4 * e1.rhs, rel=1e-6)
    # the metric is not scale invariant, so only flat-like scaling holds
    assert e2.lhs == pytest.approx(4 * e1.lhs, rel=0.2)


def test_self_case_equality_margins(flat_wrapper, flat_model):
    rep = run_verification(flat_wrapper, flat_model, 1.0)
    assert rep.all_passed
    assert rep.direction == "equal"
    for e in rep.entries:
        if e.name == "torsional_coarse_bound":
            continue  # deliberately slack bound, not an equality clause
        assert abs(e.margin) <= 1e-3, e.name


def test_negative_control_fails(example, flat_model):
    rep = run_verification(example, flat_model, 1.0, direction_override="model>=M")
    assert not rep.all_passed
    failed = [e for e in rep.entries if not e.passed]
    assert len(failed) == len(rep.entries)
    assert all(e.margin < 0 for e in failed)


def test_margin_refinement_stability(example, flat_model):
    coarse = run_verification(example, flat_model, 1.0, n_r=64, n_theta=64)
    fine = run_verification(example, flat_model, 1.0, n_r=128, n_theta=128)
    by_name = {e.name: e for e in fine.entries}
    for e in coarse.entries:
        f = by_name[e.name]
        assert f.passed
        assert abs(f.margin - e.margin) < max(abs(e.margin), 1e-3)


def test_mixed_hypothesis_rejected(flat_model):
    from geoball.surface import perturbed_flat_metric

    m = perturbed_flat_metric(0.2, 2)
    model = make_space_form(-1.0, 2)
    with pytest.raises(ComparisonPreconditionError):
        verify_mean_exit(m, model, 2.0)


def test_report_serialization(example_report):
    doc = example_report.to_dict()
    assert set(doc) == {"hypothesis", "entries", "provenance"}
    assert doc["hypothesis"]["direction"] == "model<=M"
    assert all(
        set(e) == {"name", "inequality", "lhs", "rhs", "margin", "passed"}
        for e in doc["entries"]
    )


def test_reports_reproducible(example, flat_model):
    a = run_verification(example, flat_model, 0.5)
    b = run_verification(example, flat_model, 0.5)
    assert a == b
