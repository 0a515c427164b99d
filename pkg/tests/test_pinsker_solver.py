"""Tests for the `pinskerbounds.pinsker_solver` module."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pinskerbounds.closed_forms import corollary_bound
from pinskerbounds.distributions import f_divergence
from pinskerbounds.pinsker_solver import (
    ConstraintSet,
    GapProfile,
    GapSegment,
    chord_profile,
    gap_segments,
    minimize_bound,
    objective,
    objective_closed_form,
    objective_quadrature,
    psi_from_constraints,
    risk_from_lines,
    risk_from_slopes,
    slope_box,
)
from pinskerbounds.testing import random_boundary_constraint_set, random_constraint_set
from pinskerbounds.utils import DomainError, InfeasibleConstraintsError, SlopeError


def test_constraint_set_sorts():
    constraints = ConstraintSet([0.75, 0.25], [0.1, 0.2])

    np.testing.assert_array_equal(constraints.priors, [0.25, 0.75])
    np.testing.assert_array_equal(constraints.values, [0.2, 0.1])
    np.testing.assert_allclose(constraints.psi, [0.05, 0.15])
    assert list(constraints) == [(0.25, 0.2), (0.75, 0.1)]
    assert len(constraints) == 2


@pytest.mark.parametrize(
    "priors,values",
    [([], []), ([0.0], [0.0]), ([1.0], [0.0]), ([0.3, 0.3], [0.1, 0.1]), ([0.3], [0.1, 0.2])],
)
def test_constraint_set_domain(priors, values):
    with pytest.raises(DomainError):
        ConstraintSet(priors, values)


@pytest.mark.parametrize("priors,values", [([0.3], [0.31]), ([0.5], [-0.01])])
def test_constraint_set_infeasible_values(priors, values):
    with pytest.raises(InfeasibleConstraintsError):
        ConstraintSet(priors, values)


def test_constraint_set_json():
    document = {"constraints": [{"pi": 0.25, "v": 0.15}, {"pi": 0.75, "v": 0.15}]}
    constraints = ConstraintSet.from_json(document)

    assert constraints.to_json() == document


@pytest.mark.parametrize("priors", [[0.75, 0.25], [0.5, 0.5]])
def test_constraint_set_json_needs_increasing_priors(priors):
    document = {"constraints": [{"pi": pi, "v": 0.1} for pi in priors]}

    with pytest.raises(DomainError, match="strictly increasing"):
        ConstraintSet.from_json(document)


def test_constraint_set_snaps_rounding():
    constraints = ConstraintSet([0.0847, 0.1406], [1.39e-17, 2.78e-17])
    np.testing.assert_array_equal(constraints.values, [0.0, 0.0])
    np.testing.assert_array_equal(constraints.psi, constraints.priors)

    assert ConstraintSet([0.3], [0.3 - 1e-14]).values[0] == 0.3


@pytest.mark.parametrize(
    "document",
    [
        {},
        {"constraints": []},
        {"constraints": [{"pi": 0.0, "v": 0.1}]},
        {"constraints": [{"pi": 0.5}]},
        {"constraints": [{"pi": 0.5, "v": "0.1"}]},
        {"constraints": [{"pi": 0.5, "v": 0.1, "w": 1}]},
    ],
)
def test_constraint_set_json_malformed(document):
    with pytest.raises(DomainError):
        ConstraintSet.from_json(document)


def test_symmetric_constraint():
    constraints = ConstraintSet.symmetric(1.0)

    assert list(constraints) == [(0.5, 0.25)]
    np.testing.assert_allclose(psi_from_constraints(constraints), [0.0, 0.25, 0.0])


def test_slope_box_symmetric():
    box = slope_box(ConstraintSet.symmetric(1.0))

    np.testing.assert_allclose(box.lower, [-0.5])
    np.testing.assert_allclose(box.upper, [0.5])
    assert box.contains([0.0])
    assert not box.contains([0.6])
    np.testing.assert_allclose(box.center(), [0.0])


def test_slope_box_infeasible():
    # psi = (0.05, 0.2): the chord after 0.25 rises faster than the one
    # before it.
    constraints = ConstraintSet.from_points([(0.25, 0.2), (0.75, 0.05)])

    with pytest.raises(InfeasibleConstraintsError):
        slope_box(constraints)


def test_gap_segments_symmetric_example():
    profile = gap_segments(ConstraintSet.symmetric(1.0), [0.0])

    assert isinstance(profile, GapProfile)
    assert list(profile) == [
        GapSegment(0.0, 0.25, 0.0, 0.0),
        GapSegment(0.25, 0.5, 1.0, -0.25),
        GapSegment(0.5, 0.75, -1.0, 0.75),
        GapSegment(0.75, 1.0, 0.0, 0.0),
    ]
    assert profile(0.5) == pytest.approx(0.25)
    assert profile(0.1) == 0.0


def test_gap_segments_reject_slopes():
    constraints = ConstraintSet.symmetric(1.0)

    with pytest.raises(SlopeError):
        gap_segments(constraints, [0.75])

    with pytest.raises(SlopeError):
        gap_segments(constraints, [0.0, 0.0])


def test_gap_profile_must_cover_interval():
    risk = risk_from_slopes(ConstraintSet.symmetric(1.0), [0.0])

    with pytest.raises(DomainError):
        GapProfile([GapSegment(0.0, 0.5, 1.0, 0.0)], risk)

    with pytest.raises(DomainError):
        GapProfile([GapSegment(0.0, 0.4, 1.0, 0.0), GapSegment(0.5, 1.0, -1.0, 1.0)], risk)


def test_risk_from_slopes_passes_through_constraints(rng):
    for n in (1, 2, 3, 4):
        constraints, _ = random_constraint_set(n, rng)
        box = slope_box(constraints)
        slopes = rng.uniform(box.lower, box.upper)
        risk = risk_from_slopes(constraints, slopes)

        np.testing.assert_allclose(risk(constraints.priors), constraints.psi, atol=1e-12)


def test_risk_from_lines_and_chord_profile():
    risk = risk_from_lines([1.0, 0.0, -1.0], [0.0, 0.25, 1.0])

    np.testing.assert_allclose(risk.breakpoints, [0.0, 0.25, 0.75, 1.0])

    chord = chord_profile(ConstraintSet.symmetric(1.0))
    np.testing.assert_allclose(chord.slopes, [0.5, -0.5])


def test_triangular_objective_is_area():
    profile = gap_segments(ConstraintSet.symmetric(1.0), [0.0])

    # Weight 8 times a triangle of base 1/2 and height 1/4.
    assert objective(profile, "triangular") == pytest.approx(0.5, rel=1e-12)


def test_objective_routes_agree(rng):
    for name in ("kl", "jensen_shannon", "hellinger", "chi2", "jeffreys", "agm_t"):
        constraints, _ = random_constraint_set(2, rng)
        box = slope_box(constraints)
        profile = gap_segments(constraints, box.center())

        closed = objective_closed_form(profile, name)
        numeric = objective_quadrature(profile, name)
        if math.isinf(closed):
            assert math.isinf(numeric)
        else:
            assert numeric == pytest.approx(closed, rel=1e-7)


def test_objective_divergent_edge():
    # The chord through (1/2, psi) and (0, 0) leaves a gap at 0.
    constraints = ConstraintSet.symmetric(1.0)
    profile = gap_segments(constraints, [0.5])

    assert objective_closed_form(profile, "kl") == math.inf
    assert math.isfinite(objective_closed_form(profile, "hellinger"))


@pytest.mark.parametrize(
    "name", ["variational", "kl", "triangular", "jensen_shannon", "hellinger", "chi2"]
)
@pytest.mark.parametrize("v", [0.4, 1.0, 1.6])
def test_minimize_bound_matches_explicit(name, v):
    result = minimize_bound(ConstraintSet.symmetric(v), name)

    assert result.bound == pytest.approx(corollary_bound(name, v), rel=1e-6)
    assert slope_box(ConstraintSet.symmetric(v)).contains(result.slopes)


def test_minimize_bound_two_constraints_is_finite():
    constraints = ConstraintSet.from_points([(0.25, 0.15), (0.75, 0.15)])
    result = minimize_bound(constraints, "kl")

    assert math.isfinite(result.bound)
    assert result.bound > 0.0
    assert len(result.slopes) == 2


@given(n=st.integers(min_value=1, max_value=3), seed=st.integers(min_value=0, max_value=2**16))
@settings(max_examples=15, deadline=None)
def test_bound_never_exceeds_inducing_pair(n, seed):
    rng = np.random.default_rng(seed)
    constraints, pair = random_constraint_set(n, rng)

    for name in ("kl", "hellinger", "triangular"):
        bound = minimize_bound(constraints, name, grid_points=9, starts=2).bound
        assert bound <= f_divergence(pair, name) * (1 + 1e-7) + 1e-10


def test_minimize_bound_infeasible():
    with pytest.raises(InfeasibleConstraintsError):
        minimize_bound(ConstraintSet.from_points([(0.25, 0.2), (0.75, 0.05)]), "kl")


def test_gap_segments_pointwise(rng):
    grid = np.linspace(0.0, 1.0, 1000)

    for n in (1, 2, 3):
        constraints, _ = random_constraint_set(n, rng)
        box = slope_box(constraints)
        slopes = rng.uniform(box.lower, box.upper)
        profile = gap_segments(constraints, slopes)

        lines = slopes * grid[:, None] + (constraints.psi - slopes * constraints.priors)
        expected = np.maximum(np.minimum(grid, 1 - grid) - lines.min(axis=1), 0.0)

        segments = list(profile)
        lefts = np.array([seg.left for seg in segments])
        index = np.clip(np.searchsorted(lefts, grid, side="right") - 1, 0, len(segments) - 1)
        actual = np.array([segments[k](x) for k, x in zip(index, grid)])

        np.testing.assert_allclose(actual, expected, atol=1e-12)


def test_zero_constraint_gives_zero():
    for name in ("kl", "chi2", "hellinger"):
        assert minimize_bound(ConstraintSet.symmetric(0.0), name).bound == 0.0


def test_adding_constraints_never_lowers_bound(rng):
    for _ in range(5):
        constraints, pair = random_constraint_set(1, rng)
        extra = 0.5 * (constraints.priors[0] + (0.9 if constraints.priors[0] < 0.5 else 0.1))
        nested = ConstraintSet.induced(pair, [constraints.priors[0], extra])

        for name in ("kl", "hellinger"):
            coarse = minimize_bound(constraints, name).bound
            fine = minimize_bound(nested, name).bound
            assert fine >= coarse * (1 - 1e-7) - 1e-12


def _assert_contiguous(profile):
    segments = list(profile)
    assert segments[0].left == 0.0
    assert segments[-1].right == 1.0
    for prev, cur in zip(segments[:-1], segments[1:]):
        assert prev.right == cur.left


@pytest.mark.parametrize("name", ["kl", "hellinger", "triangular"])
def test_minimize_bound_with_zero_first_constraint(name):
    # The line through the first point, the line pi and the chord to the
    # second point all meet at the first prior.
    constraints = ConstraintSet(
        [0.14632943493919665, 0.5287294094822218], [0.0, 0.14801748231469913]
    )
    result = minimize_bound(constraints, name)

    assert math.isfinite(result.bound)
    assert result.bound >= 0.0
    _assert_contiguous(result.profile)

    center = gap_segments(constraints, slope_box(constraints).center())
    assert result.bound <= objective_closed_form(center, name) + 1e-12


def test_gap_segments_on_full_grid_with_zero_constraint(rng):
    for _ in range(20):
        constraints = random_boundary_constraint_set(rng)
        box = slope_box(constraints)

        for first in np.linspace(box.lower[0], box.upper[0], 17):
            for second in np.linspace(box.lower[1], box.upper[1], 17):
                _assert_contiguous(gap_segments(constraints, [first, second]))

        assert math.isfinite(minimize_bound(constraints, "kl").bound)
