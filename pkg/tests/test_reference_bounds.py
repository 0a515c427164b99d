"""Tests for the `pinskerbounds.reference_bounds` module."""

import math

import numpy as np
import pytest

from pinskerbounds.closed_forms import corollary_bound, symmetric_bound
from pinskerbounds.reference_bounds import (
    arnold_chi2_bound,
    classical_pinsker,
    fedotov_bound,
    fedotov_curve,
    gilardoni_quadratic_bound,
    gilardoni_symmetric,
    gilardoni_vajda_bound,
    lecam_variational_bound,
    polynomial_bound,
    vajda_bound,
)
from pinskerbounds.testing import assert_bound_ordering
from pinskerbounds.utils import AtomError, DomainError, HypothesisError


GRID = np.linspace(0.0, 2.0, 102)[1:-1]


def test_values_at_one():
    assert classical_pinsker(1.0) == 0.5
    assert polynomial_bound("kullback", 1.0) == pytest.approx(0.527778, abs=1e-6)
    assert polynomial_bound("topsoe", 1.0) == pytest.approx(0.531481, abs=1e-6)
    assert polynomial_bound("toussaint", 1.0) == pytest.approx(0.53125, abs=1e-12)
    assert vajda_bound(1.0) == pytest.approx(math.log(3) - 2 / 3, rel=1e-12)
    assert gilardoni_vajda_bound(1.0) == pytest.approx(math.log(2) - 0.5 * math.log(1.5), rel=1e-12)


def test_polynomial_unknown_variant():
    with pytest.raises(DomainError):
        polynomial_bound("taylor", 1.0)


def test_toussaint_at_two():
    assert polynomial_bound("toussaint", 2.0) == math.inf
    assert polynomial_bound("topsoe", 2.0) == pytest.approx(2 + 16 / 36 + 64 / 270)


@pytest.mark.parametrize("func", [vajda_bound, gilardoni_vajda_bound, fedotov_bound])
def test_open_interval(func):
    with pytest.raises(DomainError):
        func(2.0)


def test_ladder_below_tight_kl():
    kl = [corollary_bound("kl", v) for v in GRID]
    classical = [classical_pinsker(v) for v in GRID]
    kullback = [polynomial_bound("kullback", v) for v in GRID]
    topsoe = [polynomial_bound("topsoe", v) for v in GRID]
    toussaint = [polynomial_bound("toussaint", v) for v in GRID]
    vajda = [vajda_bound(v) for v in GRID]
    improved = [gilardoni_vajda_bound(v) for v in GRID]

    assert_bound_ordering(classical, kullback)
    assert_bound_ordering(kullback, topsoe)
    assert_bound_ordering(topsoe, kl)
    assert_bound_ordering(toussaint, kl)
    assert_bound_ordering(vajda, improved)
    assert_bound_ordering(improved, kl)


def test_fedotov_curve_point():
    v, l = fedotov_curve(1.5)

    assert v == pytest.approx(1.2121, abs=1e-4)
    assert l == pytest.approx(corollary_bound("kl", v), rel=1e-7)


def test_fedotov_curve_small_parameter_is_continuous():
    below = fedotov_curve(0.99e-4)
    above = fedotov_curve(1.01e-4)

    assert below[0] == pytest.approx(0.99e-4, rel=1e-6)
    assert above[0] == pytest.approx(1.01e-4, rel=1e-6)
    assert above[1] == pytest.approx(above[0] ** 2 / 2, rel=1e-6)
    assert below[1] == pytest.approx(below[0] ** 2 / 2, rel=1e-6)


@pytest.mark.parametrize("t", [0.0, -1.0, 701.0])
def test_fedotov_curve_domain(t):
    with pytest.raises(DomainError):
        fedotov_curve(t)


def test_fedotov_matches_tight_kl():
    for v in GRID:
        assert fedotov_bound(v) == pytest.approx(corollary_bound("kl", v), rel=1e-6, abs=1e-12)


def test_fedotov_near_two():
    assert math.isfinite(fedotov_bound(1.9999))
    assert fedotov_bound(1.9999) > fedotov_bound(1.99)


def test_arnold_below_chi2():
    assert_bound_ordering([arnold_chi2_bound(v) for v in GRID], [corollary_bound("chi2", v) for v in GRID], slack=1e-12)


@pytest.mark.parametrize("name", ["triangular", "jensen_shannon", "hellinger", "jeffreys", "sym_chi2"])
def test_gilardoni_symmetric_matches(name):
    for v in (0.5, 1.0, 1.5):
        assert gilardoni_symmetric(name, v) == pytest.approx(symmetric_bound(name, v), rel=1e-8)


def test_gilardoni_symmetric_needs_symmetry():
    with pytest.raises(HypothesisError):
        gilardoni_symmetric("kl", 1.0)


def test_quadratic_bound():
    assert gilardoni_quadratic_bound("kl", 1.0) == pytest.approx(0.5)
    assert gilardoni_quadratic_bound("chi2", 1.5) == pytest.approx(2.25)

    for name in ("kl", "hellinger", "jensen_shannon", "jeffreys", "sym_chi2", "agm_t"):
        assert_bound_ordering(
            [gilardoni_quadratic_bound(name, v) for v in GRID],
            [corollary_bound(name, v) for v in GRID],
        )

    with pytest.raises(AtomError):
        gilardoni_quadratic_bound("variational", 1.0)


def test_lecam_inverts_hellinger_bound():
    for v in GRID:
        assert lecam_variational_bound(corollary_bound("hellinger", v)) == pytest.approx(v, rel=1e-9)

    with pytest.raises(DomainError):
        lecam_variational_bound(2.5)
