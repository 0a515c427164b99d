"""Random inputs and assertions shared by the test suite and the
verification suites.
"""

import logging

import numpy as np

from .distributions import DistributionPair, FiniteDistribution
from .pinsker_solver import ConstraintSet

# numpy random number generator for consistency.
_RANDOM_NUMBER_GEN = np.random.default_rng(42)

log = logging.getLogger(__name__)

# Smallest probability drawn for full-support distributions; keeps kinks
# away from 0 and 1.
MIN_PROBABILITY = 1e-3

__all__ = [
    "assert_bound_ordering",
    "assert_most_close",
    "random_boundary_constraint_set",
    "random_constraint_set",
    "random_distribution",
    "random_pair",
    "random_priors",
]


def _rng(rng):
    return _RANDOM_NUMBER_GEN if rng is None else rng


def random_distribution(size, rng=None, full_support=True):
    """Draw a distribution on ``size`` symbols from a flat Dirichlet.

    With ``full_support=False`` each symbol is zeroed with probability 1/4,
    keeping at least one symbol.
    """
    rng = _rng(rng)
    weights = rng.dirichlet(np.ones(size))

    if full_support:
        weights = np.maximum(weights, MIN_PROBABILITY)

    else:
        keep = rng.random(size) > 0.25
        keep[rng.integers(size)] = True
        weights = np.where(keep, weights, 0.0)

    return FiniteDistribution.normalized(weights)


def random_pair(rng=None, min_size=2, max_size=6, full_support=True):
    """Draw a `DistributionPair` on a random alphabet size in
    ``[min_size, max_size]``.
    """
    rng = _rng(rng)
    size = int(rng.integers(min_size, max_size + 1))
    return DistributionPair(
        random_distribution(size, rng, full_support),
        random_distribution(size, rng, full_support),
    )


def random_priors(n, rng=None, low=0.05, high=0.95):
    """Draw ``n`` distinct sorted priors in ``[low, high]``."""
    rng = _rng(rng)

    while True:
        priors = np.sort(rng.uniform(low, high, n))
        if n == 1 or np.min(np.diff(priors)) > 1e-3:
            return priors


def random_constraint_set(n, rng=None, pair=None):
    """Constraints at ``n`` random priors, induced by ``pair`` or by a
    random full-support pair.

    Returns
    -------
    tuple
        ``(constraints, pair)``.
    """
    rng = _rng(rng)
    pair = random_pair(rng) if pair is None else pair
    return ConstraintSet.induced(pair, random_priors(n, rng)), pair


def random_boundary_constraint_set(rng=None):
    """Two constraints, the first with ``v = 0`` so that the risk curve
    runs along ``pi`` up to the first prior.

    The second risk value is uniform between the chord from the first point
    to ``(1, 0)`` and ``min(pi, 1 - pi)``.
    """
    rng = _rng(rng)
    first = rng.uniform(0.05, 0.45)
    second = rng.uniform(first + 0.05, 0.95)

    upper = min(second, 1.0 - second)
    psi = rng.uniform(first * (1.0 - second) / (1.0 - first), upper)
    return ConstraintSet([first, second], [0.0, upper - psi])


def assert_most_close(actual, desired, max_miss=0, rtol=1e-7, atol=0.0):
    """Raises an AssertionError if more than ``max_miss`` elements of
    ``actual`` and ``desired`` differ beyond the given tolerance.

    Infinite values compare equal to infinities of the same sign.

    Raises
    ------
    AssertionError
        If too many elements differ.
    """
    actual = np.asarray(actual, dtype=float)
    desired = np.asarray(desired, dtype=float)

    close = np.isclose(actual, desired, rtol=rtol, atol=atol, equal_nan=True)
    n_miss = int(np.count_nonzero(~close))

    if n_miss > max_miss:
        worst = np.unravel_index(
            np.argmax(np.where(close, 0.0, np.abs(actual - desired))), actual.shape
        )
        raise AssertionError(
            f"{n_miss} mismatching elements are more than the expected "
            f"{max_miss}; worst at {worst}: {actual[worst]!r} != "
            f"{desired[worst]!r}"
        )


def assert_bound_ordering(lower, upper, slack=1e-9):
    """Raises an AssertionError unless ``lower <= upper + slack``
    elementwise.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    excess = lower - upper

    if np.any(excess > slack):
        worst = int(np.argmax(excess))
        raise AssertionError(
            f"Bound ordering violated at index {worst}: "
            f"{lower.flat[worst]!r} > {upper.flat[worst]!r} + {slack:g}"
        )
