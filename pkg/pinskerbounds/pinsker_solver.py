"""Tight lower bounds on f-divergences from generalized variational
constraints.

Given constraints ``V_{pi_i}(P, Q) = v_i``, the Bayes risk curve of any
admissible pair passes through the points ``(pi_i, psi_i)`` with
``psi_i = min(pi_i, 1 - pi_i) - v_i``. The smallest f-divergence compatible
with the constraints is attained by a risk curve made of one line through
each constraint point, cut off by the lines ``pi`` and ``1 - pi``. The
slopes of those lines live in a box fixed by the chords of the constraint
polygon, and the objective over that box has a closed form on every linear
piece of the gap ``min(pi, 1 - pi) - psi(pi)``.
"""

import itertools
import logging
import math
from collections import namedtuple

import jsonschema
import numpy as np

from .distributions import RiskProfile, generalized_variational
from .fdiv_catalog import Divergence, get_divergence
from .integral_rep import segment_quadrature
from .utils import DomainError, InfeasibleConstraintsError, SlopeError, tent

LOGGER = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-12
SLOPE_TOL = 1e-12

# Segment coefficients this small come from rounding in lines that coincide
# with the boundary lines.
COEFFICIENT_SNAP = 1e-13

CROSS_CHECK_TOL = 1e-8

MAX_GRID_EVALUATIONS = 20000
MAX_SEARCH_EVALUATIONS = 20000

CONSTRAINT_SCHEMA = {
    "type": "object",
    "properties": {
        "constraints": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "pi": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                    "v": {"type": "number"},
                },
                "required": ["pi", "v"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["constraints"],
}

__all__ = [
    "BoundResult",
    "ConstraintSet",
    "GapProfile",
    "GapSegment",
    "RiskProfile",
    "SlopeBox",
    "chord_profile",
    "gap_segments",
    "minimize_bound",
    "objective",
    "objective_closed_form",
    "objective_quadrature",
    "psi_from_constraints",
    "risk_from_lines",
    "risk_from_slopes",
    "slope_box",
]


class ConstraintSet:
    """Constraints ``V_{pi_i}(P, Q) = v_i`` at ``n >= 1`` distinct priors.

    Parameters
    ----------
    priors : array_like
        Priors in ``(0, 1)``. They are sorted on construction.

    values : array_like
        Generalized variational divergences, one per prior, each in
        ``[0, min(pi_i, 1 - pi_i)]``.

    Raises
    ------
    DomainError
        If there are no constraints, the arrays differ in length, a prior
        lies outside ``(0, 1)`` or two priors coincide.

    InfeasibleConstraintsError
        If a value lies outside ``[0, min(pi_i, 1 - pi_i)]``.
    """

    def __init__(self, priors, values):
        pis = np.array(priors, dtype=float).ravel()
        vs = np.array(values, dtype=float).ravel()

        if pis.size == 0 or pis.shape != vs.shape:
            raise DomainError(
                "Need at least one constraint and one value per prior"
            )

        if not np.all(np.isfinite(pis)) or np.any(pis <= 0) or np.any(pis >= 1):
            raise DomainError(f"Priors must lie in (0, 1): {pis.tolist()}")

        order = np.argsort(pis, kind="stable")
        pis, vs = pis[order], vs[order]

        if np.any(np.diff(pis) <= 0):
            raise DomainError(f"Priors must be distinct: {pis.tolist()}")

        upper = tent(pis)
        if (
            not np.all(np.isfinite(vs))
            or np.any(vs < -FEASIBILITY_TOL)
            or np.any(vs > upper + FEASIBILITY_TOL)
        ):
            raise InfeasibleConstraintsError(
                "Each v_i must lie in [0, min(pi_i, 1 - pi_i)]: "
                + ", ".join(f"(pi={p!r}, v={v!r})" for p, v in zip(pis, vs))
            )

        # Values within rounding of either end of their range sit exactly on it.
        vs = np.where(np.abs(vs) <= FEASIBILITY_TOL, 0.0, vs)
        vs = np.where(np.abs(vs - upper) <= FEASIBILITY_TOL, upper, vs)
        vs = np.clip(vs, 0.0, upper)

        for arr in (pis, vs):
            arr.setflags(write=False)

        self._priors = pis
        self._values = vs

    @classmethod
    def from_points(cls, points):
        """Build from an iterable of ``(pi, v)`` pairs."""
        points = list(points)
        if not points:
            raise DomainError("Need at least one constraint")

        priors, values = zip(*points)
        return cls(priors, values)

    @classmethod
    def from_json(cls, document):
        """Build from a ``{"constraints": [{"pi": ..., "v": ...}, ...]}``
        document.

        Raises
        ------
        DomainError
            If the document does not follow that layout or the priors are
            not strictly increasing.
        """
        try:
            jsonschema.validate(document, CONSTRAINT_SCHEMA)

        except jsonschema.exceptions.ValidationError as err:
            raise DomainError(f"Malformed constraints: {err.message}") from err

        points = [(item["pi"], item["v"]) for item in document["constraints"]]
        priors = [pi for pi, _ in points]
        if any(b <= a for a, b in zip(priors[:-1], priors[1:])):
            raise DomainError(
                f"Constraint priors must be strictly increasing, got {priors}"
            )

        return cls.from_points(points)

    @classmethod
    def induced(cls, pair, priors):
        """Constraints satisfied by ``pair`` at the given ``priors``."""
        priors = np.array(priors, dtype=float)
        values = [generalized_variational(float(pi), pair) for pi in priors]
        return cls(priors, values)

    @classmethod
    def symmetric(cls, v):
        """The single constraint at ``pi = 1/2`` for variational divergence
        ``v``, i.e. ``V_{1/2} = v / 4``.
        """
        return cls([0.5], [v / 4.0])

    @property
    def priors(self):
        return self._priors

    @property
    def values(self):
        return self._values

    @property
    def psi(self):
        """Bayes risks ``min(pi_i, 1 - pi_i) - v_i`` at the constraint
        priors.
        """
        return tent(self._priors) - self._values

    def to_json(self):
        return {
            "constraints": [
                {"pi": float(p), "v": float(v)}
                for p, v in zip(self._priors, self._values)
            ]
        }

    def __len__(self):
        return self._priors.size

    def __iter__(self):
        return zip(self._priors.tolist(), self._values.tolist())

    def __repr__(self):
        return f"ConstraintSet({list(self)})"


class SlopeBox(namedtuple("SlopeBox", "lower upper")):
    """Per-constraint intervals ``[lower_i, upper_i]`` of admissible slopes."""

    __slots__ = ()

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, slopes, tol=SLOPE_TOL):
        slopes = np.asarray(slopes, dtype=float)
        return bool(
            slopes.shape == self.lower.shape
            and np.all(slopes >= self.lower - tol)
            and np.all(slopes <= self.upper + tol)
        )

    def clip(self, slopes):
        return np.clip(np.asarray(slopes, dtype=float), self.lower, self.upper)

    def center(self):
        return 0.5 * (self.lower + self.upper)


class GapSegment(namedtuple("GapSegment", "left right alpha beta")):
    """A piece ``[left, right]`` on which the gap equals
    ``alpha * pi + beta``.
    """

    __slots__ = ()

    def __call__(self, pi):
        return self.alpha * pi + self.beta


class GapProfile:
    """The gap ``phi(pi) = min(pi, 1 - pi) - psi(pi)`` of a risk profile,
    as a list of linear segments covering ``[0, 1]``.

    Parameters
    ----------
    segments : sequence of `GapSegment`
        Contiguous segments from 0 to 1, split at 1/2.

    risk : `RiskProfile`
        The underlying risk curve ``psi``.

    slopes : array_like, optional
        The slope vector that generated ``risk``, when there is one.
    """

    def __init__(self, segments, risk, slopes=None):
        self.segments = tuple(GapSegment(*seg) for seg in segments)
        self.risk = risk
        self.slopes = None if slopes is None else np.asarray(slopes, dtype=float)

        if not self.segments or self.segments[0].left != 0.0 or self.segments[-1].right != 1.0:
            raise DomainError("Gap segments must cover [0, 1]")

        for prev, cur in zip(self.segments[:-1], self.segments[1:]):
            if prev.right != cur.left:
                raise DomainError(
                    f"Gap segments are not contiguous at {prev.right!r}"
                )

    def __call__(self, pi):
        gap = np.maximum(tent(np.asarray(pi, dtype=float)) - self.risk(pi), 0.0)
        return float(gap) if np.ndim(gap) == 0 else gap

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)

    def __repr__(self):
        return f"GapProfile({list(self.segments)})"


BoundResult = namedtuple("BoundResult", "bound slopes profile")
BoundResult.__doc__ = """Minimum of the objective, the minimizing slope vector
and its gap profile."""


def psi_from_constraints(constraints):
    """Return the Bayes risks at ``0, pi_1, ..., pi_n, 1``.

    The end values are always zero.
    """
    return np.concatenate(([0.0], constraints.psi, [0.0]))


def _knots(constraints):
    return np.concatenate(([0.0], constraints.priors, [1.0]))


def slope_box(constraints):
    """Return the `SlopeBox` of admissible slopes.

    The slope through ``(pi_i, psi_i)`` must lie between the chord to the
    next constraint point and the chord from the previous one.

    Raises
    ------
    InfeasibleConstraintsError
        If a box is empty, i.e. no concave curve interpolates the points.
    """
    chords = np.diff(psi_from_constraints(constraints)) / np.diff(_knots(constraints))
    upper = chords[:-1].copy()
    lower = chords[1:].copy()

    excess = lower - upper
    if np.any(excess > FEASIBILITY_TOL):
        i = int(np.argmax(excess))
        raise InfeasibleConstraintsError(
            f"No concave risk curve interpolates the constraints: the chord "
            f"slope after pi={constraints.priors[i]!r} ({lower[i]!r}) exceeds "
            f"the chord slope before it ({upper[i]!r})"
        )

    # Collapse boxes that are empty only through rounding.
    tight = excess > 0
    mid = 0.5 * (lower + upper)
    lower[tight] = mid[tight]
    upper[tight] = mid[tight]

    return SlopeBox(lower, upper)


def _lines(constraints, slopes):
    slopes = np.asarray(slopes, dtype=float)
    line_slopes = np.concatenate(([1.0], slopes, [-1.0]))
    intercepts = np.concatenate(
        ([0.0], constraints.psi - slopes * constraints.priors, [1.0])
    )
    return line_slopes, intercepts


def _crossing(slopes, intercepts, i, j):
    return (intercepts[j] - intercepts[i]) / (slopes[i] - slopes[j])


def _lower_envelope(slopes, intercepts):
    """Pieces ``(line, left, right)`` of ``min_k (slopes[k] pi + intercepts[k])``
    on ``[0, 1]``, left to right.
    """
    order = sorted(range(len(slopes)), key=lambda k: (-slopes[k], intercepts[k]))

    distinct = []
    for k in order:
        if distinct and slopes[distinct[-1]] == slopes[k]:
            continue

        distinct.append(k)

    hull = []
    for k in distinct:
        while len(hull) >= 2 and _crossing(slopes, intercepts, hull[-2], k) <= _crossing(
            slopes, intercepts, hull[-2], hull[-1]
        ):
            hull.pop()

        hull.append(k)

    # Lines meeting in one point can give crossings out of order by an ulp;
    # a running maximum keeps neighbouring pieces sharing their end points.
    cuts = np.clip(
        [_crossing(slopes, intercepts, a, b) for a, b in zip(hull[:-1], hull[1:])],
        0.0,
        1.0,
    )
    bounds = [0.0, *np.maximum.accumulate(cuts).tolist(), 1.0]

    pieces = []
    for k, left, right in zip(hull, bounds[:-1], bounds[1:]):
        if right > left:
            pieces.append((k, left, right))

    return pieces


def _check_slopes(constraints, slopes, box=None):
    box = slope_box(constraints) if box is None else box
    slopes = np.asarray(slopes, dtype=float)

    if slopes.shape != box.lower.shape:
        raise SlopeError(
            f"Expected {box.lower.size} slopes, got shape {slopes.shape}"
        )

    if not box.contains(slopes):
        raise SlopeError(
            f"Slopes {slopes.tolist()} lie outside the slope box "
            f"[{box.lower.tolist()}, {box.upper.tolist()}]"
        )

    return box.clip(slopes)


def _risk_from_pieces(pieces, slopes, intercepts):
    breakpoints = [0.0] + [right for _, _, right in pieces]
    values = [slopes[k] * left + intercepts[k] for k, left, _ in pieces]
    k_last = pieces[-1][0]
    values.append(slopes[k_last] + intercepts[k_last])
    return RiskProfile(breakpoints, values, [slopes[k] for k, _, _ in pieces])


def risk_from_slopes(constraints, slopes):
    """Return the risk curve ``min(pi, 1 - pi, L_1, ..., L_n)`` where
    ``L_i`` passes through ``(pi_i, psi_i)`` with slope ``slopes[i]``.

    Raises
    ------
    SlopeError
        If ``slopes`` lies outside the slope box.
    """
    slopes = _check_slopes(constraints, slopes)
    line_slopes, intercepts = _lines(constraints, slopes)
    return _risk_from_pieces(_lower_envelope(line_slopes, intercepts), line_slopes, intercepts)


def risk_from_lines(slopes, intercepts):
    """Risk curve ``min_k (slopes[k] pi + intercepts[k])`` on ``[0, 1]``.

    The lines must include ``pi`` and ``1 - pi`` or lie above them at the
    ends, so that the curve vanishes at 0 and 1.
    """
    slopes = np.asarray(slopes, dtype=float)
    intercepts = np.asarray(intercepts, dtype=float)
    return _risk_from_pieces(_lower_envelope(slopes, intercepts), slopes, intercepts)


def chord_profile(constraints):
    """The smallest concave risk curve through the constraint points: the
    polygon joining ``(0, 0)``, the points ``(pi_i, psi_i)`` and ``(1, 0)``.
    """
    slope_box(constraints)
    return RiskProfile(_knots(constraints), psi_from_constraints(constraints))


def _snap(value):
    return 0.0 if abs(value) <= COEFFICIENT_SNAP else value


def gap_segments(constraints, slopes, check=True):
    """Split the gap of the risk curve for ``slopes`` into linear pieces.

    Left of 1/2 the gap on a piece of line ``s pi + b`` is
    ``(1 - s) pi - b``; right of 1/2 it is ``(-1 - s) pi + 1 - b``.

    Parameters
    ----------
    constraints : `ConstraintSet`
        The constraints.

    slopes : array_like
        One slope per constraint, inside the slope box.

    check : bool
        Validate ``slopes`` against the slope box. Callers that already
        clip to the box may skip the check.

    Returns
    -------
    `GapProfile`

    Raises
    ------
    SlopeError
        If ``check`` is set and ``slopes`` lies outside the slope box.
    """
    if check:
        slopes = _check_slopes(constraints, slopes)
    else:
        slopes = np.asarray(slopes, dtype=float)

    line_slopes, intercepts = _lines(constraints, slopes)
    pieces = _lower_envelope(line_slopes, intercepts)

    segments = []
    for k, left, right in pieces:
        s, b = line_slopes[k], intercepts[k]

        if left < 0.5:
            end = min(right, 0.5)
            segments.append(GapSegment(left, end, _snap(1.0 - s), _snap(-b)))

        if right > 0.5:
            start = max(left, 0.5)
            segments.append(GapSegment(start, right, _snap(-1.0 - s), _snap(1.0 - b)))

    risk = _risk_from_pieces(pieces, line_slopes, intercepts)
    return GapProfile(segments, risk, slopes)


def _as_entry(name):
    return name if isinstance(name, Divergence) else get_divergence(name)


def objective_closed_form(profile, name):
    """``int phi gamma`` from the antiderivatives of ``gamma``, plus atoms."""
    entry = _as_entry(name)
    terms = []

    for seg in profile:
        value = entry.segment_integral(*seg)
        if math.isinf(value):
            return math.inf

        terms.append(value)

    terms.append(entry.weight.atom_contribution(profile))
    return max(math.fsum(terms), 0.0)


def objective_quadrature(profile, name):
    """``int phi gamma`` by adaptive quadrature on each segment, plus atoms."""
    entry = _as_entry(name)
    terms = []

    for seg in profile:
        value = segment_quadrature(entry.weight, *seg)
        if math.isinf(value):
            return math.inf

        terms.append(value)

    terms.append(entry.weight.atom_contribution(profile))
    return max(math.fsum(terms), 0.0)


def objective(profile, name, cross_check=True):
    """Return ``int_0^1 phi(pi) gamma(pi) dpi`` for a gap profile.

    The closed form is returned. With ``cross_check`` the integral is also
    computed by quadrature and a warning is logged when the two disagree by
    more than ``1e-8`` relative.
    """
    entry = _as_entry(name)
    closed = objective_closed_form(profile, entry)

    if cross_check:
        numeric = objective_quadrature(profile, entry)
        if math.isinf(closed) != math.isinf(numeric) or (
            math.isfinite(closed)
            and abs(closed - numeric) > CROSS_CHECK_TOL * max(1.0, abs(closed))
        ):
            LOGGER.warning(
                "%s: closed-form objective %r disagrees with quadrature %r",
                entry.name,
                closed,
                numeric,
            )

    return closed


def _grid_axes(box, grid_points):
    n = box.lower.size
    per_axis = grid_points
    while per_axis > 2 and per_axis**n > MAX_GRID_EVALUATIONS:
        per_axis -= 1

    axes = []
    for lo, hi in zip(box.lower, box.upper):
        axes.append(np.array([lo]) if hi == lo else np.linspace(lo, hi, per_axis))

    return axes, per_axis


def _pattern_search(func, x, fx, lower, upper, step, tol, budget):
    """Box-constrained coordinate search with pattern moves and step
    halving. Returns ``(x, fx, evaluations)``.
    """
    evaluations = 0

    def explore(base, fbase):
        nonlocal evaluations
        best, fbest = base.copy(), fbase

        for i in np.flatnonzero(step > 0):
            for sign in (-1.0, 1.0):
                trial = best.copy()
                trial[i] = min(max(trial[i] + sign * step[i], lower[i]), upper[i])
                if trial[i] == best[i]:
                    continue

                ftrial = func(trial)
                evaluations += 1
                if ftrial < fbest:
                    best, fbest = trial, ftrial
                    break

        return best, fbest

    while np.any(step > tol) and evaluations < budget:
        y, fy = explore(x, fx)

        if fy < fx:
            direction = y - x
            x, fx = y, fy

            z = np.clip(x + direction, lower, upper)
            fz = func(z)
            evaluations += 1
            if fz < fx:
                x, fx = z, fz

        else:
            step = step / 2

    return x, fx, evaluations


def minimize_bound(constraints, name, grid_points=17, starts=3, tol=1e-10):
    """Minimize the objective over the slope box.

    A uniform multi-start grid over the box is followed by a coordinate
    pattern search from the best few grid points.

    Parameters
    ----------
    constraints : `ConstraintSet`
        The constraints.

    name : str
        Catalog name of the divergence.

    grid_points : int
        Grid points per slope axis; reduced for many constraints.

    starts : int
        Number of grid points refined by the pattern search.

    tol : float
        Final step size on the slopes.

    Returns
    -------
    `BoundResult`
        ``bound`` is ``math.inf`` when every admissible curve gives an
        infinite divergence.

    Raises
    ------
    InfeasibleConstraintsError
        If the constraints admit no concave risk curve.
    """
    entry = _as_entry(name)
    box = slope_box(constraints)

    def evaluate(slopes):
        return objective_closed_form(gap_segments(constraints, slopes, check=False), entry)

    axes, per_axis = _grid_axes(box, grid_points)
    candidates = []
    for point in itertools.product(*axes):
        slopes = np.array(point)
        candidates.append((evaluate(slopes), slopes))

    candidates.sort(key=lambda item: item[0])

    step = np.where(box.width > 0, box.width / max(per_axis - 1, 1), 0.0)
    best_value, best_slopes = candidates[0]
    total_evaluations = len(candidates)

    for value, slopes in candidates[:starts]:
        if math.isinf(value):
            break

        x, fx, used = _pattern_search(
            evaluate,
            slopes,
            value,
            box.lower,
            box.upper,
            step.copy(),
            tol,
            MAX_SEARCH_EVALUATIONS,
        )
        total_evaluations += used

        if fx < best_value:
            best_value, best_slopes = fx, x

    LOGGER.debug(
        "minimize_bound(%s, n=%d): %r at %s after %d evaluations",
        entry.name,
        len(constraints),
        best_value,
        best_slopes.tolist(),
        total_evaluations,
    )

    profile = gap_segments(constraints, best_slopes, check=False)
    return BoundResult(float(best_value), best_slopes, profile)
