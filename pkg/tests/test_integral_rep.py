"""Tests for the `pinskerbounds.integral_rep` module."""

import math

import pytest

from pinskerbounds.distributions import DistributionPair, f_divergence, variational_divergence
from pinskerbounds.fdiv_catalog import WeightFunction, catalog, get_divergence
from pinskerbounds.integral_rep import (
    divergence_via_representation,
    representation_residual,
    segment_quadrature,
)
from pinskerbounds.testing import random_pair


@pytest.mark.parametrize("name", catalog.names)
def test_representation_matches_direct(rng, name):
    for k in range(12):
        pair = random_pair(rng, 2, 5, full_support=bool(k % 3))
        assert representation_residual(pair, name) <= 1e-6


def test_representation_examples():
    pair = DistributionPair([0.9, 0.1], [0.1, 0.9])

    assert divergence_via_representation(pair, "hellinger") == pytest.approx(0.8, rel=1e-8)
    assert divergence_via_representation(pair, "variational") == pytest.approx(1.6, rel=1e-12)
    assert divergence_via_representation(pair, "kl") == pytest.approx(
        f_divergence(pair, "kl"), rel=1e-8
    )


def test_representation_infinite():
    pair = DistributionPair([0.5, 0.5], [1.0, 0.0])

    assert divergence_via_representation(pair, "kl") == math.inf
    assert f_divergence(pair, "kl") == math.inf
    assert representation_residual(pair, "kl") == 0.0

    # Jensen-Shannon stays finite on the same pair.
    assert representation_residual(pair, "jensen_shannon") <= 1e-6


def test_identical_pair_gives_zero():
    pair = DistributionPair([0.2, 0.3, 0.5], [0.2, 0.3, 0.5])

    for name in catalog.names:
        assert divergence_via_representation(pair, name) == pytest.approx(0.0, abs=1e-12)


def test_heavier_atom_overshoots(rng):
    # Mass 4 at 1/2 reproduces V; mass 16 gives four times as much.
    heavy = WeightFunction(lambda pi: 0.0 * pi, atoms=[(0.5, 16.0)], atomic=True)

    for _ in range(10):
        pair = random_pair(rng)
        v = variational_divergence(pair)
        assert divergence_via_representation(pair, heavy) == pytest.approx(4.0 * v, abs=1e-12)


@pytest.mark.parametrize("name", ["kl", "jensen_shannon", "hellinger", "chi2", "triangular"])
def test_segment_quadrature_matches_closed_form(name):
    entry = get_divergence(name)

    for seg in [(0.1, 0.4, 0.6, -0.05), (0.5, 0.8, -1.2, 0.95), (0.3, 0.7, 0.0, 0.2)]:
        assert segment_quadrature(entry, *seg) == pytest.approx(
            entry.segment_integral(*seg), rel=1e-8
        )


def test_segment_quadrature_divergent_edge():
    assert segment_quadrature("kl", 0.0, 0.2, 1.0, 0.0) == math.inf
    assert segment_quadrature("chi2", 0.0, 0.2, 1.0, 0.0) == math.inf
    assert math.isfinite(segment_quadrature("hellinger", 0.0, 0.2, 1.0, 0.0))
    assert segment_quadrature("variational", 0.2, 0.7, 1.0, 0.0) == 0.0
