"""Finite discrete probability distributions and direct evaluation of
f-divergences, 0-1 Bayes risk and generalized variational divergence.

All divergences are in nats. Values are immutable once constructed; every
function in this module is pure.
"""

import logging
import math
from collections import namedtuple

import numpy as np

from .utils import DimensionError, DomainError, NotRealizableError, tent

LOGGER = logging.getLogger(__name__)

SUM_TOL = 1e-12

# Tolerances used when checking risk profiles built from floating point
# envelopes.
PROFILE_TOL = 1e-12
SLOPE_MERGE_TOL = 1e-12

__all__ = [
    "DistributionPair",
    "FiniteDistribution",
    "RiskProfile",
    "bayes_risk",
    "f_divergence",
    "generalized_variational",
    "risk_profile",
    "variational_divergence",
]


class FiniteDistribution:
    """A probability vector on a finite alphabet.

    Parameters
    ----------
    probs : array_like
        One non-negative probability per alphabet symbol. The entries must
        sum to one within ``1e-12``; use :meth:`normalized` to rescale
        arbitrary non-negative weights explicitly.

    Raises
    ------
    DimensionError
        If ``probs`` is empty, not one-dimensional, has negative or
        non-finite entries, or does not sum to one.
    """

    __slots__ = ("_probs",)

    def __init__(self, probs):
        if isinstance(probs, FiniteDistribution):
            probs = probs.probs

        arr = np.array(probs, dtype=float)

        if arr.ndim != 1 or arr.size == 0:
            raise DimensionError(
                f"Probabilities must be a non-empty 1-d vector, got shape "
                f"{arr.shape}"
            )

        if not np.all(np.isfinite(arr)):
            raise DimensionError(f"Probabilities must be finite: {arr}")

        if np.any(arr < 0):
            raise DimensionError(f"Probabilities must be non-negative: {arr}")

        total = math.fsum(arr)
        if abs(total - 1.0) > SUM_TOL:
            raise DimensionError(
                f"Probabilities must sum to 1 (within {SUM_TOL:g}), "
                f"got {total!r}"
            )

        arr.setflags(write=False)
        self._probs = arr

    @classmethod
    def normalized(cls, weights):
        """Build a distribution by explicitly rescaling non-negative
        ``weights`` to unit mass.
        """
        arr = np.array(weights, dtype=float)

        if arr.ndim != 1 or arr.size == 0 or np.any(arr < 0):
            raise DimensionError(
                f"Weights must be a non-empty non-negative vector: {arr}"
            )

        total = arr.sum()
        if not np.isfinite(total) or total <= 0:
            raise DimensionError("Weights must have finite positive mass")

        return cls(arr / total)

    @property
    def probs(self):
        """Read-only array of probabilities."""
        return self._probs

    def __len__(self):
        return self._probs.size

    def __iter__(self):
        return iter(self._probs.tolist())

    def __eq__(self, other):
        if not isinstance(other, FiniteDistribution):
            return NotImplemented

        return np.array_equal(self._probs, other._probs)

    def __hash__(self):
        return hash(self._probs.tobytes())

    def __repr__(self):
        return f"FiniteDistribution({self._probs.tolist()})"


class DistributionPair(namedtuple("DistributionPair", "p q")):
    """The pair ``(P, Q)`` of distributions on a common finite alphabet.

    Either element may be given as a :class:`FiniteDistribution` or as
    anything :class:`FiniteDistribution` accepts.

    Raises
    ------
    DimensionError
        If the two alphabets differ in size.
    """

    __slots__ = ()

    def __new__(cls, p, q):
        p = FiniteDistribution(p)
        q = FiniteDistribution(q)

        if len(p) != len(q):
            raise DimensionError(
                f"Alphabet sizes differ: len(P)={len(p)}, len(Q)={len(q)}"
            )

        return super().__new__(cls, p, q)

    @property
    def kinks(self):
        """Priors ``q(x) / (p(x) + q(x))`` at which the Bayes risk curve
        changes slope, one per symbol with positive total mass.
        """
        p, q = self.p.probs, self.q.probs
        mass = p + q
        keep = mass > 0
        return q[keep] / mass[keep]

    def swapped(self):
        """Return ``(Q, P)``."""
        return DistributionPair(self.q, self.p)


def _as_pair(pair):
    if isinstance(pair, DistributionPair):
        return pair

    try:
        p, q = pair

    except (TypeError, ValueError) as err:
        raise DimensionError(
            f"Expected a (P, Q) pair of distributions, got {pair!r}"
        ) from err

    return DistributionPair(p, q)


def _as_spec(spec):
    # Deferred so that the catalog can be imported on its own.
    from .fdiv_catalog import get_divergence

    if isinstance(spec, str):
        return get_divergence(spec).spec

    return getattr(spec, "spec", spec)


def f_divergence(pair, spec):
    """Evaluate the f-divergence ``I_f(P, Q) = sum_x q(x) f(p(x)/q(x))``.

    Cells with ``q = 0 < p`` contribute ``p * f_slope_at_inf`` and cells with
    ``p = 0 < q`` contribute ``q * f_at_zero``; empty cells contribute
    nothing.

    Parameters
    ----------
    pair : `DistributionPair` or (P, Q)
        The distributions.

    spec : `~pinskerbounds.fdiv_catalog.DivergenceSpec` or str
        The divergence, or its catalog name.

    Returns
    -------
    float
        A non-negative value, ``math.inf`` when the divergence is infinite.
    """
    pair = _as_pair(pair)
    spec = _as_spec(spec)

    p, q = pair.p.probs, pair.q.probs
    terms = []

    both = (p > 0) & (q > 0)
    if np.any(both):
        ratio = p[both] / q[both]
        terms.extend((q[both] * spec.f(ratio)).tolist())

    only_p = (p > 0) & (q == 0)
    if np.any(only_p):
        if math.isinf(spec.f_slope_at_inf):
            return math.inf

        terms.append(spec.f_slope_at_inf * math.fsum(p[only_p]))

    only_q = (q > 0) & (p == 0)
    if np.any(only_q):
        if math.isinf(spec.f_at_zero):
            return math.inf

        terms.append(spec.f_at_zero * math.fsum(q[only_q]))

    total = math.fsum(terms)

    if math.isnan(total):
        return math.inf

    return max(total, 0.0)


def variational_divergence(pair):
    """Return ``V(P, Q) = sum_x |p(x) - q(x)|``, a value in ``[0, 2]``."""
    pair = _as_pair(pair)
    return math.fsum(np.abs(pair.p.probs - pair.q.probs))


def _check_prior(prior):
    arr = np.asarray(prior, dtype=float)

    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise DomainError(f"Prior must lie in [0, 1], got {prior!r}")

    return arr


def bayes_risk(prior, pair):
    """0-1 Bayes risk ``sum_x min(prior * p(x), (1 - prior) * q(x))``.

    ``prior`` may be a scalar or an array of priors; the result has the
    same shape.

    Raises
    ------
    DomainError
        If any prior lies outside ``[0, 1]``.
    """
    pair = _as_pair(pair)
    pis = _check_prior(prior)
    p, q = pair.p.probs, pair.q.probs

    if pis.ndim == 0:
        pi = float(pis)
        return math.fsum(np.minimum(pi * p, (1.0 - pi) * q))

    flat = pis.ravel()
    risk = np.minimum(np.multiply.outer(flat, p), np.multiply.outer(1.0 - flat, q))
    return risk.sum(axis=1).reshape(pis.shape)


def generalized_variational(prior, pair):
    """Generalized variational divergence
    ``V_prior(P, Q) = min(prior, 1 - prior) - bayes_risk(prior, P, Q)``.

    At ``prior = 1/2`` this is a quarter of :func:`variational_divergence`.
    """
    risk = bayes_risk(prior, pair)
    pis = np.asarray(prior, dtype=float)

    if pis.ndim == 0:
        return max(min(float(pis), 1.0 - float(pis)) - risk, 0.0)

    return np.maximum(tent(pis) - risk, 0.0)


class RiskProfile:
    """A concave piecewise-linear Bayes risk curve ``psi`` on ``[0, 1]``.

    Parameters
    ----------
    breakpoints : array_like
        Increasing abscissae, starting at 0 and ending at 1.

    values : array_like
        ``psi`` at each breakpoint.

    slopes : array_like, optional
        Slope on each segment. Computed from ``values`` when omitted; pass
        them explicitly when they are known exactly, since differences of
        nearly coincident breakpoints lose precision.

    Raises
    ------
    NotRealizableError
        If the curve is not concave, does not vanish at 0 and 1, or leaves
        the band ``0 <= psi <= min(pi, 1 - pi)``.
    """

    def __init__(self, breakpoints, values, slopes=None):
        x = np.array(breakpoints, dtype=float)
        y = np.array(values, dtype=float)

        if x.ndim != 1 or x.size < 2 or x.shape != y.shape:
            raise NotRealizableError(
                "Breakpoints and values must be matching 1-d arrays with at "
                "least two entries"
            )

        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) < 0):
            raise NotRealizableError(
                f"Breakpoints must increase from 0 to 1: {x.tolist()}"
            )

        if slopes is None:
            with np.errstate(divide="ignore", invalid="ignore"):
                s = np.diff(y) / np.diff(x)
        else:
            s = np.array(slopes, dtype=float)
            if s.shape != (x.size - 1,):
                raise NotRealizableError(
                    "Need exactly one slope per segment between breakpoints"
                )

        # Drop zero-length segments, then merge segments with equal slopes.
        keep = np.diff(x) > 0
        s = s[keep]
        x = np.concatenate(([x[0]], x[1:][keep]))
        y = np.concatenate(([y[0]], y[1:][keep]))

        interior = np.abs(np.diff(s)) > SLOPE_MERGE_TOL
        mask = np.concatenate(([True], interior, [True]))
        x, y = x[mask], y[mask]
        s = s[np.concatenate(([True], interior))]

        self._breakpoints = x
        self._values = y
        self._slopes = s

        for arr in (self._breakpoints, self._values, self._slopes):
            arr.setflags(write=False)

        self._validate()

    def _validate(self):
        x, y, s = self._breakpoints, self._values, self._slopes

        if abs(y[0]) > PROFILE_TOL or abs(y[-1]) > PROFILE_TOL:
            raise NotRealizableError(
                f"Risk profile must vanish at 0 and 1, got {y[0]!r}, {y[-1]!r}"
            )

        if np.any(np.diff(s) > PROFILE_TOL):
            raise NotRealizableError(
                f"Risk profile is not concave: slopes {s.tolist()}"
            )

        checked = np.concatenate((x, [0.5]))
        psi = self(checked)
        if np.any(psi < -PROFILE_TOL) or np.any(psi > tent(checked) + PROFILE_TOL):
            raise NotRealizableError(
                "Risk profile leaves the band 0 <= psi <= min(pi, 1 - pi)"
            )

    @property
    def breakpoints(self):
        return self._breakpoints

    @property
    def values(self):
        return self._values

    @property
    def slopes(self):
        return self._slopes

    def __call__(self, pi):
        """Evaluate ``psi`` at ``pi`` (scalar or array)."""
        out = np.interp(pi, self._breakpoints, self._values)
        return float(out) if np.ndim(out) == 0 else out

    def kinks(self):
        """Return ``(locations, drops)`` of the interior slope changes."""
        return self._breakpoints[1:-1].copy(), -np.diff(self._slopes)

    def __repr__(self):
        return (
            f"RiskProfile(breakpoints={self._breakpoints.tolist()}, "
            f"slopes={self._slopes.tolist()})"
        )


def risk_profile(pair):
    """Return the exact Bayes risk curve of ``pair`` as a `RiskProfile`.

    Each symbol contributes ``min(pi p, (1 - pi) q)``, a tent with its kink
    at ``q / (p + q)`` and slope drop ``p + q``.
    """
    pair = _as_pair(pair)
    p, q = pair.p.probs, pair.q.probs
    mass = p + q
    live = mass > 0
    kink = np.zeros_like(mass)
    kink[live] = q[live] / mass[live]

    interior = live & (kink > 0) & (kink < 1)
    knots = np.unique(kink[interior])
    breakpoints = np.concatenate(([0.0], knots, [1.0]))

    # On (b_k, b_k+1) symbols kinking to the right rise with slope p, those
    # kinking to the left fall with slope -q.
    slopes = []
    for left, right in zip(breakpoints[:-1], breakpoints[1:]):
        rising = live & (kink >= right)
        falling = live & (kink <= left)
        slopes.append(math.fsum(p[rising]) - math.fsum(q[falling]))

    values = bayes_risk(breakpoints, pair)
    values[0] = 0.0
    values[-1] = 0.0

    return RiskProfile(breakpoints, values, slopes)
