"""Utility functions, exceptions and shared numerical helpers for the
pinskerbounds package.
"""

import logging
import math
import os

import numpy as np

LOGGER = logging.getLogger(__name__)

QUAD_TOL_ENV_VAR = "PINSKER_QUAD_TOL"
DEFAULT_QUAD_TOL = 1e-10

# 1 / phi and 1 / phi**2
INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2

__all__ = (
    "AtomError",
    "CatalogLookupError",
    "DimensionError",
    "DomainError",
    "HypothesisError",
    "InfeasibleConstraintsError",
    "NotRealizableError",
    "PinskerError",
    "SlopeError",
    "bracketed_minimize",
    "golden_section",
    "quad_tolerance",
    "tent",
)


class PinskerError(Exception):
    """Base exception for problems raised by the pinskerbounds package."""


class DimensionError(PinskerError, ValueError):
    """Raised when probability vectors are malformed or have mismatched
    alphabet sizes.
    """


class DomainError(PinskerError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class CatalogLookupError(PinskerError, KeyError):
    """Raised when a divergence name is not in the catalog."""

    def __str__(self):
        # KeyError quotes its argument, which garbles the message.
        return str(self.args[0]) if self.args else ""


class AtomError(PinskerError, ValueError):
    """Raised when a point-mass weight is evaluated as if it had a density."""


class InfeasibleConstraintsError(PinskerError, ValueError):
    """Raised when no concave risk curve interpolates a set of constraints."""


class SlopeError(PinskerError, ValueError):
    """Raised when a slope vector lies outside its slope box."""


class HypothesisError(PinskerError, ValueError):
    """Raised when the preconditions of a closed-form bound do not hold."""


class NotRealizableError(PinskerError, ValueError):
    """Raised when a risk profile is not the Bayes risk of any pair."""


def quad_tolerance():
    """Return the quadrature tolerance.

    The value is read from the ``PINSKER_QUAD_TOL`` environment variable each
    time this is called, falling back to ``1e-10`` when unset or invalid.
    """
    raw = os.getenv(QUAD_TOL_ENV_VAR)

    if raw is None:
        return DEFAULT_QUAD_TOL

    try:
        value = float(raw)

    except ValueError:
        LOGGER.warning(
            "Ignoring %s=%r: not a number, using %g",
            QUAD_TOL_ENV_VAR,
            raw,
            DEFAULT_QUAD_TOL,
        )
        return DEFAULT_QUAD_TOL

    if not math.isfinite(value) or value <= 0:
        LOGGER.warning(
            "Ignoring %s=%r: must be positive, using %g",
            QUAD_TOL_ENV_VAR,
            raw,
            DEFAULT_QUAD_TOL,
        )
        return DEFAULT_QUAD_TOL

    return value


def tent(pi):
    """Return ``min(pi, 1 - pi)``, the Bayes risk of an uninformative
    experiment. Works elementwise on arrays.
    """
    return np.minimum(pi, 1.0 - pi)


def _finite_or_inf(value):
    value = float(value)
    return math.inf if math.isnan(value) else value


def golden_section(func, lo, hi, tol=1e-10):
    """Golden-section search for the minimum of ``func`` on ``[lo, hi]``.

    ``func`` is assumed unimodal on the interval. NaN values are treated as
    ``+inf`` so that the search moves away from undefined regions.

    Parameters
    ----------
    func : callable
        Scalar function of one variable.

    lo, hi : float
        Interval end points.

    tol : float
        Absolute tolerance on the abscissa.

    Returns
    -------
    tuple of float
        ``(x, func(x))`` at the best point found, end points included.
    """
    lo, hi = min(lo, hi), max(lo, hi)
    h = hi - lo

    candidates = [(lo, _finite_or_inf(func(lo))), (hi, _finite_or_inf(func(hi)))]

    if h > tol:
        n_steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

        c = lo + INV_PHI_SQUARE * h
        d = lo + INV_PHI * h
        yc = _finite_or_inf(func(c))
        yd = _finite_or_inf(func(d))

        for _ in range(max(n_steps - 1, 0)):
            if yc < yd:
                hi = d
                d, yd = c, yc
                h = INV_PHI * h
                c = lo + INV_PHI_SQUARE * h
                yc = _finite_or_inf(func(c))

            else:
                lo = c
                c, yc = d, yd
                h = INV_PHI * h
                d = lo + INV_PHI * h
                yd = _finite_or_inf(func(d))

        candidates.extend([(c, yc), (d, yd)])

    return min(candidates, key=lambda item: item[1])


def bracketed_minimize(func, lo, hi, points=64, tol=1e-10):
    """Minimize a scalar function on ``[lo, hi]`` by a uniform bracketing scan
    followed by golden-section refinement around the best scan point.

    The scan guards against minima on the boundary and against the few
    non-unimodal objectives that show up near the ends of the interval.

    Returns
    -------
    tuple of float
        ``(x, func(x))``.
    """
    if hi < lo:
        raise DomainError(f"Empty search interval [{lo}, {hi}]")

    if hi == lo:
        return lo, _finite_or_inf(func(lo))

    grid = np.linspace(lo, hi, points)
    values = np.array([_finite_or_inf(func(x)) for x in grid])
    best = int(np.argmin(values))

    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, points - 1)]

    x, fx = golden_section(func, left, right, tol=tol)

    if values[best] < fx:
        return float(grid[best]), float(values[best])

    LOGGER.debug(
        "bracketed_minimize: scan best %g at %g, refined %g at %g",
        values[best],
        grid[best],
        fx,
        x,
    )
    return float(x), float(fx)
