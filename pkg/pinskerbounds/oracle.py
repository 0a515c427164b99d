"""Independent checks on the solver: a brute-force slope-grid bound, the
construction of distributions that attain a risk profile, and a random
search over such distributions.
"""

import logging
import math
from collections import namedtuple

import numpy as np
from scipy.special import expit, logit

from .distributions import DistributionPair, RiskProfile, f_divergence
from .fdiv_catalog import get_divergence
from .pinsker_solver import minimize_bound, slope_box
from .utils import DomainError, NotRealizableError, tent

LOGGER = logging.getLogger(__name__)

RESIDUAL_DROP = 1e-15
REALIZABLE_TOL = 1e-12

GAUSS_LEGENDRE_NODES = 32
GRID_CHUNK = 1024
MAX_GRID_DIMENSION = 3

# Pieces that reach 0 or 1 are integrated over this many units of
# log-odds; the neglected tail is below 1e-8 relative for every entry whose
# integral converges there.
LOGIT_TAIL_SPAN = 40.0

# Gap values below this count as zero, both in the integrand and at the
# midpoint of an end piece.
ZERO_GAP = 1e-13

MAX_KINKS = 6
TIED_SLOPE_PROBABILITY = 0.5
BOUNDARY_SLOPE_PROBABILITY = 0.75

__all__ = [
    "SearchResult",
    "achieving_pair",
    "distribution_search",
    "random_profile",
    "slope_grid_bound",
]

SearchResult = namedtuple("SearchResult", "best gap")


def achieving_pair(profile):
    """Build a pair of distributions whose Bayes risk curve is ``profile``.

    Each kink ``c`` with slope drop ``d`` becomes a symbol with
    ``p = (1 - c) d`` and ``q = c d``; two extra symbols carry the leftover
    mass of ``P`` and of ``Q``. Leftovers below ``1e-15`` are dropped.

    Parameters
    ----------
    profile : `RiskProfile` or `~pinskerbounds.pinsker_solver.GapProfile`
        A concave piecewise-linear risk curve.

    Returns
    -------
    `DistributionPair`

    Raises
    ------
    NotRealizableError
        If a slope lies outside ``[-1, 1]`` or the leftover mass is
        negative.
    """
    risk = getattr(profile, "risk", profile)
    if not isinstance(risk, RiskProfile):
        raise NotRealizableError(f"Expected a risk profile, got {type(profile).__name__}")

    slopes = risk.slopes
    if slopes[0] > 1.0 + REALIZABLE_TOL or slopes[-1] < -1.0 - REALIZABLE_TOL:
        raise NotRealizableError(
            f"Risk profile slopes must lie in [-1, 1], got {slopes[0]!r} "
            f"and {slopes[-1]!r} at the ends"
        )

    kinks, drops = risk.kinks()
    p = ((1.0 - kinks) * drops).tolist()
    q = (kinks * drops).tolist()

    p_rest = 1.0 - math.fsum(p)
    q_rest = 1.0 - math.fsum(q)

    if p_rest < -REALIZABLE_TOL or q_rest < -REALIZABLE_TOL:
        raise NotRealizableError(
            f"Risk profile needs more than unit mass: leftover P {p_rest!r}, "
            f"leftover Q {q_rest!r}"
        )

    if p_rest > RESIDUAL_DROP:
        p.append(p_rest)
        q.append(0.0)

    if q_rest > RESIDUAL_DROP:
        p.append(0.0)
        q.append(q_rest)

    return DistributionPair(p, q)


def _grid_objective(constraints, slopes, entry, nodes, weights):
    """Objective for each row of ``slopes`` by Gauss-Legendre quadrature in
    log-odds on every piece between pairwise line crossings.
    """
    size = slopes.shape[0]
    ones = np.ones((size, 1))

    line_slopes = np.concatenate((ones, slopes, -ones), axis=1)
    intercepts = np.concatenate(
        (0.0 * ones, constraints.psi - slopes * constraints.priors, ones), axis=1
    )

    def gap(x):
        lines = x[..., None] * line_slopes[:, None, None, :] + intercepts[:, None, None, :]
        return np.maximum(tent(x) - lines.min(axis=-1), 0.0)

    i, j = np.triu_indices(line_slopes.shape[1], 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        crossings = (intercepts[:, j] - intercepts[:, i]) / (
            line_slopes[:, i] - line_slopes[:, j]
        )

    crossings = np.where(np.isfinite(crossings), np.clip(crossings, 0.0, 1.0), 0.0)
    fixed = np.broadcast_to([0.0, 0.5, 1.0], (size, 3))
    edges = np.sort(np.concatenate((crossings, fixed), axis=1), axis=1)
    left, right = edges[:, :-1], edges[:, 1:]
    live = right > left

    with np.errstate(divide="ignore"):
        u_left = logit(left)
        u_right = logit(right)

    u_left = np.where(left <= 0.0, u_right - LOGIT_TAIL_SPAN, u_left)
    u_right = np.where(right >= 1.0, u_left + LOGIT_TAIL_SPAN, u_right)
    u_left = np.where(live, u_left, 0.0)
    u_right = np.where(live, u_right, 0.0)

    mid = 0.5 * (u_left + u_right)
    half = 0.5 * (u_right - u_left)
    u = mid[..., None] + half[..., None] * nodes
    x = expit(u)
    jacobian = x * expit(-u)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        density = entry.weight.density(x)
        gaps = gap(x)
        inside = (x > 0.0) & (x < 1.0) & (gaps > ZERO_GAP)
        integrand = np.where(inside, gaps * density * jacobian, 0.0)

    integrand = np.nan_to_num(integrand, nan=0.0, posinf=0.0, neginf=0.0)
    values = (half[..., None] * weights * integrand).sum(axis=(1, 2))

    midpoint_gap = gap(0.5 * (left + right)[..., None])[..., 0]
    open_piece = live & (midpoint_gap > ZERO_GAP)
    divergent = np.zeros(size, dtype=bool)
    if entry.weight.diverges_at(0):
        divergent |= np.any(open_piece & (left <= 0.0), axis=1)

    if entry.weight.diverges_at(1):
        divergent |= np.any(open_piece & (right >= 1.0), axis=1)

    for c, w in entry.weight.atoms:
        values = values + w * gap(np.full((size, 1, 1), c))[:, 0, 0]

    return np.where(divergent, np.inf, values)


def slope_grid_bound(constraints, name, resolution=101, chunk=GRID_CHUNK):
    """Minimum of the objective over a uniform grid on the slope box.

    The objective is integrated directly by quadrature, without the
    closed-form antiderivatives the solver uses.

    Parameters
    ----------
    constraints : `~pinskerbounds.pinsker_solver.ConstraintSet`
        At most three constraints.

    name : str
        Catalog name of the divergence.

    resolution : int
        Grid points per slope axis.

    Raises
    ------
    DomainError
        If there are more than three constraints or ``resolution < 1``.

    InfeasibleConstraintsError
        If the constraints admit no concave risk curve.
    """
    if len(constraints) > MAX_GRID_DIMENSION:
        raise DomainError(
            f"Slope grid limited to {MAX_GRID_DIMENSION} constraints, "
            f"got {len(constraints)}"
        )

    if resolution < 1:
        raise DomainError(f"Resolution must be positive, got {resolution!r}")

    entry = get_divergence(name)
    box = slope_box(constraints)

    axes = [
        np.array([lo]) if hi == lo or resolution == 1 else np.linspace(lo, hi, resolution)
        for lo, hi in zip(box.lower, box.upper)
    ]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))

    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_LEGENDRE_NODES)

    best = math.inf
    for start in range(0, grid.shape[0], chunk):
        values = _grid_objective(constraints, grid[start : start + chunk], entry, nodes, weights)
        best = min(best, float(values.min()))

    LOGGER.debug(
        "slope_grid_bound(%s, resolution=%d): %r over %d grid points",
        entry.name,
        resolution,
        best,
        grid.shape[0],
    )
    return max(best, 0.0)


def _interval_kinks(left, right, drop, target, count, rng):
    """Kink positions and the slope drop at each for one stretch of the
    curve between two knots.

    The drop is split by a flat Dirichlet; the positions are drawn uniformly
    and then shifted so that the stretch ends on the right knot, which holds
    when the drop-weighted mean distance from the right knot, as a fraction
    of the width, equals ``target``.
    """
    fractions = rng.dirichlet(np.ones(count))
    t = np.sort(rng.uniform(0.0, 1.0, count))[::-1]
    mean = float(fractions @ t)

    if mean < target:
        t = 1.0 - (1.0 - t) * (1.0 - target) / (1.0 - mean)
    elif mean > target:
        t = t * target / mean

    x = np.clip(right - t * (right - left), left, right)
    return np.maximum.accumulate(x), drop * fractions


def random_profile(constraints, rng):
    """Draw a random concave risk curve through the constraint points.

    The curve has a random number of kinks in ``{1, ..., 6}``, spread over
    the stretches between consecutive knots ``0, pi_1, ..., pi_n, 1``. At
    each constraint point the slopes on either side are drawn from the
    slope box, tied together half of the time. The end slopes are ``1`` and
    ``-1`` three times out of four, and otherwise drawn up to the first and
    last chords. Every stretch whose end slopes differ gets at least one
    kink; the slope drop across it is shared out among its kinks by a flat
    Dirichlet.
    """
    box = slope_box(constraints)
    knots = np.concatenate(([0.0], constraints.priors, [1.0]))
    values = np.concatenate(([0.0], constraints.psi, [0.0]))
    chords = np.diff(values) / np.diff(knots)

    inner = np.sort(rng.uniform(box.lower, box.upper, (2, box.lower.size)), axis=0)
    tied = rng.random(box.lower.size) < TIED_SLOPE_PROBABILITY
    inner[0, tied] = inner[1, tied]

    start = 1.0 if rng.random() < BOUNDARY_SLOPE_PROBABILITY else rng.uniform(chords[0], 1.0)
    end = -1.0 if rng.random() < BOUNDARY_SLOPE_PROBABILITY else rng.uniform(-1.0, chords[-1])

    # Slope leaving and slope entering each stretch.
    leaving = np.concatenate(([start], inner[0]))
    entering = np.concatenate((inner[1], [end]))

    kinks = int(rng.integers(1, MAX_KINKS + 1))
    counts = rng.multinomial(kinks, np.full(knots.size - 1, 1.0 / (knots.size - 1)))

    breakpoints, heights, slopes = [0.0], [0.0], []
    for k in range(knots.size - 1):
        slope = leaving[k]
        drop = leaving[k] - entering[k]

        if drop > 0.0:
            target = min(max((leaving[k] - chords[k]) / drop, 0.0), 1.0)
            xs, drops = _interval_kinks(
                knots[k], knots[k + 1], drop, target, max(int(counts[k]), 1), rng
            )

            for x, d in zip(xs, drops):
                slopes.append(slope)
                heights.append(heights[-1] + slope * (x - breakpoints[-1]))
                breakpoints.append(float(x))
                slope = slope - d

            slope = entering[k]

        slopes.append(slope)
        breakpoints.append(float(knots[k + 1]))
        heights.append(float(values[k + 1]))

    return RiskProfile(breakpoints, heights, slopes)


def distribution_search(constraints, name, trials, seed=0):
    """Randomly search for pairs that satisfy the constraints and have
    small divergence.

    Every trial draws a random risk profile (see `random_profile`) and
    evaluates the divergence of the pair that attains it. Trials use
    independent generators spawned from ``seed``.

    Returns
    -------
    `SearchResult`
        The smallest divergence found and its excess over
        :func:`~pinskerbounds.pinsker_solver.minimize_bound`. Both are
        ``inf`` when every trial gave an infinite divergence.
    """
    if trials < 1:
        raise DomainError(f"Need at least one trial, got {trials!r}")

    entry = get_divergence(name)
    bound = minimize_bound(constraints, entry).bound

    best = math.inf
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        pair = achieving_pair(random_profile(constraints, rng))
        best = min(best, f_divergence(pair, entry.spec))

    if math.isinf(best):
        LOGGER.warning(
            "distribution_search(%s): no finite divergence in %d trials",
            entry.name,
            trials,
        )
        return SearchResult(math.inf, math.inf)

    gap = best - bound
    LOGGER.debug(
        "distribution_search(%s): best %r, bound %r, gap %r",
        entry.name,
        best,
        bound,
        gap,
    )
    return SearchResult(best, gap)
