"""Executable invariant suites.

Each suite evaluates a set of numerical invariants and reports, for every
invariant, the largest residual observed against its threshold.
"""

import logging
import math
from collections import namedtuple

import numpy as np
from astropy.table import Table

from . import closed_forms, reference_bounds
from .distributions import (
    DistributionPair,
    bayes_risk,
    f_divergence,
    generalized_variational,
    risk_profile,
    variational_divergence,
)
from .fdiv_catalog import WeightFunction, catalog, weight_from_generator
from .integral_rep import divergence_via_representation, representation_residual
from .oracle import achieving_pair, distribution_search, random_profile, slope_grid_bound
from .pinsker_solver import ConstraintSet, minimize_bound
from .testing import random_boundary_constraint_set, random_constraint_set, random_pair
from .utils import DomainError, tent

LOGGER = logging.getLogger(__name__)

SUITES = ("representation", "tightness", "oracle", "ladder", "duality")

WITNESS_VALUES = (0.4, 1.0, 1.6)
SEARCH_TRIALS = 50

__all__ = [
    "SUITES",
    "InvariantResult",
    "format_report",
    "run_suite",
]


class InvariantResult(
    namedtuple("InvariantResult", "suite name residual threshold")
):
    """Largest residual of one invariant and the threshold it must meet."""

    __slots__ = ()

    @property
    def passed(self):
        return bool(self.residual <= self.threshold)


def _result(suite, name, residuals, threshold):
    residuals = [float(r) for r in np.atleast_1d(residuals)]
    worst = math.inf if any(math.isnan(r) for r in residuals) else max(residuals, default=0.0)
    result = InvariantResult(suite, name, worst, threshold)
    LOGGER.info(
        "%s/%s: residual %g (threshold %g) %s",
        suite,
        name,
        worst,
        threshold,
        "PASS" if result.passed else "FAIL",
    )
    return result


def _relative(a, b):
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else math.inf

    return abs(a - b) / max(1.0, abs(b))


def representation_suite(rng, trials, atoms):
    """Direct and integral forms of every divergence agree."""
    suite = "representation"
    pairs = [random_pair(rng, 2, atoms) for _ in range(trials)]
    pairs += [random_pair(rng, 2, atoms, full_support=False) for _ in range(trials)]

    results = []
    for entry in catalog:
        residuals = [representation_residual(pair, entry.name) for pair in pairs]
        results.append(_result(suite, f"direct-vs-integral[{entry.name}]", residuals, 1e-6))

    grid = np.linspace(1e-3, 1.0 - 1e-3, 1000)
    for entry in catalog:
        if entry.weight.atomic:
            continue

        density = entry.weight(grid)
        generator = np.array([weight_from_generator(entry.spec, pi) for pi in grid])
        residuals = np.abs(density - generator) / np.maximum(1.0, np.abs(generator))
        results.append(_result(suite, f"weight-from-generator[{entry.name}]", residuals, 1e-9))

    # A point mass of 16 at 1/2 overshoots the variational divergence.
    heavy = WeightFunction(lambda pi: 0.0 * pi, atoms=[(0.5, 16.0)], atomic=True)
    misses = []
    for pair in pairs:
        v = variational_divergence(pair)
        if v > 1e-3:
            misses.append(abs(divergence_via_representation(pair, heavy) - v))

    results.append(
        _result(suite, "variational-atom-mass-16-rejected", -min(misses, default=1.0), -1e-3)
    )
    return results


def tightness_suite(rng, trials, atoms):
    """The solver's optimal profiles are attained by real distributions, and
    no distribution beats the bound.
    """
    suite = "tightness"
    results = []

    for entry in catalog:
        residuals = []
        for v in WITNESS_VALUES:
            solution = minimize_bound(ConstraintSet.symmetric(v), entry)
            pair = achieving_pair(solution.profile)
            residuals.append(
                _relative(f_divergence(pair, entry.spec), closed_forms.corollary_bound(entry.name, v))
            )

        results.append(_result(suite, f"witness[{entry.name}]", residuals, 1e-6))

    equality = DistributionPair([0.9, 0.1], [0.1, 0.9])
    results.append(
        _result(
            suite,
            "hellinger-equality-case",
            abs(f_divergence(equality, "hellinger") - closed_forms.corollary_bound("hellinger", 1.6)),
            1e-12,
        )
    )

    replay = []
    for _ in range(trials):
        constraints, _ = random_constraint_set(int(rng.integers(1, 4)), rng)
        profile = random_profile(constraints, rng)
        pair = achieving_pair(profile)
        grid = np.linspace(0.0, 1.0, 500)
        replay.append(np.max(np.abs(bayes_risk(grid, pair) - profile(grid))))

    results.append(_result(suite, "achieving-pair-replay", replay, 1e-12))

    gaps = []
    names = ("kl", "hellinger", "chi2", "jensen_shannon")
    for k in range(trials):
        constraints, _ = random_constraint_set(int(rng.integers(1, 3)), rng)
        found = distribution_search(
            constraints, names[k % len(names)], SEARCH_TRIALS, seed=int(rng.integers(2**32))
        )
        if math.isfinite(found.gap):
            gaps.append(-found.gap)

    results.append(_result(suite, "never-below-bound", gaps, 1e-9))
    return results


def oracle_suite(rng, trials, atoms):
    """The solver agrees with exhaustive search over the slope box."""
    suite = "oracle"
    results = []

    single = ConstraintSet.symmetric(1.0)
    results.append(
        _result(
            suite,
            "grid-vs-explicit[kl, n=1]",
            abs(slope_grid_bound(single, "kl", 2001) - closed_forms.corollary_bound("kl", 1.0)),
            1e-4,
        )
    )

    fixed = ConstraintSet.from_points([(0.25, 0.15), (0.75, 0.15)])
    results.append(
        _result(
            suite,
            "grid-vs-solver[kl, symmetric pair]",
            abs(slope_grid_bound(fixed, "kl", 401) - minimize_bound(fixed, "kl").bound),
            1e-4,
        )
    )

    agreement, below = [], []
    names = ("kl", "hellinger", "triangular", "chi2")
    for k in range(max(1, trials // 4)):
        if k % 2:
            constraints = random_boundary_constraint_set(rng)
        else:
            constraints, _ = random_constraint_set(2, rng)

        name = names[k % len(names)]
        solved = minimize_bound(constraints, name).bound
        grid = slope_grid_bound(constraints, name, 101)
        agreement.append(_relative(grid, solved))
        below.append(solved - grid)

    results.append(_result(suite, "grid-vs-solver[random, n=2]", agreement, 1e-3))
    results.append(_result(suite, "solver-not-above-grid", below, 1e-7))
    return results


def ladder_suite(rng, trials, atoms):
    """Ordering of the classical bounds below the tight KL bound, and
    agreement between the routes to the tight bounds.
    """
    suite = "ladder"
    grid = np.linspace(0.0, 2.0, 102)[1:-1]
    kl = np.array([closed_forms.corollary_bound("kl", v) for v in grid])

    def column(func):
        return np.array([func(v) for v in grid])

    classical = column(reference_bounds.classical_pinsker)
    kullback = column(lambda v: reference_bounds.polynomial_bound("kullback", v))
    topsoe = column(lambda v: reference_bounds.polynomial_bound("topsoe", v))
    toussaint = column(lambda v: reference_bounds.polynomial_bound("toussaint", v))
    vajda = column(reference_bounds.vajda_bound)
    improved = column(reference_bounds.gilardoni_vajda_bound)

    results = [
        _result(suite, "classical<=kullback", classical - kullback, 1e-9),
        _result(suite, "kullback<=topsoe", kullback - topsoe, 1e-9),
        _result(suite, "topsoe<=kl", topsoe - kl, 1e-9),
        _result(suite, "vajda<=kl", vajda - kl, 1e-9),
        _result(suite, "toussaint<=kl", toussaint - kl, 1e-9),
        _result(suite, "vajda<=improved-vajda", vajda - improved, 1e-9),
        _result(suite, "improved-vajda<=kl", improved - kl, 1e-9),
        _result(suite, "fedotov==kl", np.abs(column(reference_bounds.fedotov_bound) - kl), 1e-6),
        _result(
            suite,
            "kl-beats-pinsker-at-1",
            1e-4 - (closed_forms.corollary_bound("kl", 1.0) - 0.5),
            0.0,
        ),
        _result(
            suite,
            "chi2-branch-continuity",
            abs(closed_forms.corollary_bound("chi2", 1.0) - 1.0)
            + abs(closed_forms.corollary_bound("chi2", 1.0 - 1e-12) - 1.0),
            1e-11,
        ),
        _result(
            suite,
            "jeffreys>=v^2",
            column(lambda v: v**2 - closed_forms.corollary_bound("jeffreys", v)),
            1e-12,
        ),
        _result(
            suite,
            "lecam-inversion",
            np.abs(
                column(
                    lambda v: reference_bounds.lecam_variational_bound(
                        closed_forms.corollary_bound("hellinger", v)
                    )
                    - v
                )
            ),
            1e-9,
        ),
        _result(
            suite,
            "arnold<=chi2",
            column(lambda v: reference_bounds.arnold_chi2_bound(v) - closed_forms.corollary_bound("chi2", v)),
            1e-12,
        ),
    ]

    routes = np.linspace(0.0, 1.9, 50)
    for entry in catalog:
        residuals = []
        for v in routes:
            explicit = closed_forms.corollary_bound(entry.name, v)
            others = [
                closed_forms.asymmetric_n1_bound(entry.name, v),
                minimize_bound(ConstraintSet.symmetric(v), entry).bound,
            ]
            if entry.spec.symmetric_gamma and entry.spec.convex_gamma:
                others.append(closed_forms.symmetric_bound(entry.name, v))

            residuals.extend(_relative(other, explicit) for other in others)

        results.append(_result(suite, f"route-agreement[{entry.name}]", residuals, 1e-6))

        if entry.spec.symmetric_gamma and entry.spec.convex_gamma:
            residuals = [
                abs(
                    reference_bounds.gilardoni_symmetric(entry.name, v)
                    - closed_forms.symmetric_bound(entry.name, v)
                )
                for v in routes
            ]
            results.append(_result(suite, f"gilardoni-symmetric[{entry.name}]", residuals, 1e-9))

        if not entry.weight.atomic:
            residuals = column(
                lambda v: reference_bounds.gilardoni_quadratic_bound(entry.name, v)
                - closed_forms.corollary_bound(entry.name, v)
            )
            results.append(_result(suite, f"quadratic<=tight[{entry.name}]", residuals, 1e-9))

    return results


def duality_suite(rng, trials, atoms):
    """Identities between Bayes risk and generalized variational
    divergence.
    """
    suite = "duality"
    grid = np.linspace(0.0, 1.0, 201)
    pairs = [random_pair(rng, 2, atoms, full_support=bool(k % 2)) for k in range(trials)]

    identity, concavity, half, metric, generator, profile = [], [], [], [], [], []
    for pair in pairs:
        risk = bayes_risk(grid, pair)
        identity.append(np.max(np.abs(generalized_variational(grid, pair) + risk - tent(grid))))
        concavity.append(np.max(np.diff(risk, 2)))
        v = variational_divergence(pair)
        half.append(abs(generalized_variational(0.5, pair) - v / 4.0))
        generator.append(abs(f_divergence(pair, "variational") - v))
        profile.append(np.max(np.abs(risk_profile(pair)(grid) - risk)))

    for first, second, third in zip(pairs, pairs[1:], pairs[2:]):
        if len({len(first.p), len(second.p), len(third.p)}) != 1:
            continue

        ab = variational_divergence((first.p, second.p))
        bc = variational_divergence((second.p, third.p))
        ac = variational_divergence((first.p, third.p))
        ba = variational_divergence((second.p, first.p))
        metric.extend([ac - ab - bc, abs(ab - ba), variational_divergence((first.p, first.p))])

    return [
        _result(suite, "variational+risk==tent", identity, 1e-12),
        _result(suite, "risk-concave", concavity, 1e-12),
        _result(suite, "half-prior==V/4", half, 1e-12),
        _result(suite, "metric-axioms", metric, 1e-12),
        _result(suite, "generator-|t-1|==V", generator, 1e-12),
        _result(suite, "risk-profile-replay", profile, 1e-12),
    ]


_SUITE_FUNCTIONS = {
    "representation": representation_suite,
    "tightness": tightness_suite,
    "oracle": oracle_suite,
    "ladder": ladder_suite,
    "duality": duality_suite,
}


def run_suite(name, seed=0, trials=20, atoms=6):
    """Run the invariant suite ``name``.

    Parameters
    ----------
    name : str
        One of ``representation``, ``tightness``, ``oracle``, ``ladder``
        and ``duality``.

    seed : int
        Seed for the random inputs.

    trials : int
        Number of random inputs per invariant.

    atoms : int
        Largest alphabet size of random distributions.

    Returns
    -------
    list of `InvariantResult`
    """
    if name not in _SUITE_FUNCTIONS:
        raise DomainError(f"Unknown suite {name!r}; expected one of {', '.join(SUITES)}")

    if trials < 1 or atoms < 2:
        raise DomainError("Need trials >= 1 and atoms >= 2")

    rng = np.random.default_rng(seed)
    return _SUITE_FUNCTIONS[name](rng, trials, atoms)


def format_report(results):
    """Render results as an aligned table followed by a summary line."""
    table = Table(
        rows=[
            (r.suite, r.name, r.residual, r.threshold, "PASS" if r.passed else "FAIL")
            for r in results
        ],
        names=("suite", "invariant", "max_residual", "threshold", "status"),
        dtype=(str, str, float, float, str),
    )
    table["max_residual"].format = ".3e"
    table["threshold"].format = ".1e"

    failed = sum(not r.passed for r in results)
    lines = table.pformat(max_lines=-1, max_width=-1)
    lines.append(f"{len(results) - failed} passed, {failed} failed")
    return "\n".join(lines)
