"""Catalog of f-divergences and their weight functions.

Every f-divergence can be written as an integral of generalized variational
divergences against a weight function ``gamma`` on ``[0, 1]``, with

    gamma(pi) = f''((1 - pi) / pi) / pi**3.

Each catalog entry carries the generator ``f``, a closed form for ``gamma``
(possibly with point masses), the antiderivatives ``Gamma`` and
``GammaBar`` of ``gamma`` and the order of the poles of ``gamma`` at the two
ends of the interval. The pole orders decide whether integrals against
``gamma`` that do not vanish at an end point converge there.
"""

import dataclasses
import logging
import math
from collections import namedtuple
from typing import Callable

import numpy as np
from scipy.special import xlogy

from .utils import AtomError, CatalogLookupError, DomainError

LOGGER = logging.getLogger(__name__)

LN2 = math.log(2.0)

# A line that vanishes at an end point makes the integral converge there as
# long as gamma grows more slowly than pi**-2.
DIVERGENT_POLE_ORDER = 2.0

__all__ = [
    "AntiderivativePair",
    "Divergence",
    "DivergenceCatalog",
    "DivergenceSpec",
    "WeightFunction",
    "antiderivatives",
    "catalog",
    "catalog_lookup",
    "get_divergence",
    "weight_from_generator",
]


@dataclasses.dataclass(frozen=True)
class DivergenceSpec:
    """The generator of an f-divergence.

    Attributes
    ----------
    name : str
        Catalog key.

    label : str
        Human readable name.

    f : callable
        Convex generator with ``f(1) = 0``, vectorized over ``t > 0``.

    f_at_zero : float
        ``lim_{t -> 0+} f(t)``, possibly ``inf``.

    f_slope_at_inf : float
        ``lim_{t -> inf} f(t) / t``, possibly ``inf``.

    second_derivative : callable or None
        ``f''`` on ``t > 0``. None when ``f`` is only piecewise linear.

    generator_kinks : tuple of (float, float)
        ``(t, jump)`` for every point where ``f'`` jumps by ``jump``.

    symmetric_gamma : bool
        Whether ``gamma(pi) = gamma(1 - pi)``.

    convex_gamma : bool
        Whether ``gamma`` is a convex density on ``(0, 1)``.
    """

    name: str
    label: str
    f: Callable
    f_at_zero: float
    f_slope_at_inf: float
    second_derivative: Callable | None = None
    generator_kinks: tuple = ()
    symmetric_gamma: bool = False
    convex_gamma: bool = False


class AntiderivativePair(namedtuple("AntiderivativePair", "Gamma GammaBar")):
    """``Gamma' = gamma`` and ``GammaBar' = Gamma``."""

    __slots__ = ()


class WeightFunction:
    """A weight ``gamma`` on ``[0, 1]``: a density plus point masses.

    Parameters
    ----------
    density : callable
        Vectorized density on ``(0, 1)``.

    atoms : sequence of (float, float)
        ``(location, mass)`` pairs.

    pole_orders : (float, float)
        ``(a0, a1)`` such that the density grows like ``pi**-a0`` at 0 and
        ``(1 - pi)**-a1`` at 1; 0 when it stays bounded.

    atomic : bool
        True when the density is identically zero.
    """

    def __init__(self, density, atoms=(), pole_orders=(0.0, 0.0), atomic=False):
        self.density = density
        self.atoms = tuple((float(c), float(w)) for c, w in atoms)
        self.pole_orders = tuple(float(a) for a in pole_orders)
        self.atomic = atomic

    def __call__(self, pi):
        """Evaluate the density part at ``pi``.

        Raises
        ------
        AtomError
            When the weight is purely atomic and ``pi`` is an atom location.
        """
        if self.atomic and any(np.any(np.asarray(pi) == c) for c, _ in self.atoms):
            raise AtomError(
                f"Weight is a point mass at {pi!r} and has no density there"
            )

        with np.errstate(divide="ignore", invalid="ignore"):
            return self.density(pi)

    def diverges_at(self, end):
        """Whether a non-vanishing line integrated against this weight
        diverges at ``end`` (0 or 1).
        """
        return self.pole_orders[int(end)] >= DIVERGENT_POLE_ORDER

    def atom_contribution(self, phi):
        """Return ``sum_k w_k phi(c_k)`` over the point masses."""
        return math.fsum(w * float(phi(c)) for c, w in self.atoms)

    def __repr__(self):
        return (
            f"WeightFunction(atoms={self.atoms}, "
            f"pole_orders={self.pole_orders})"
        )


class Divergence:
    """A catalog entry: generator, weight and antiderivatives together."""

    def __init__(self, spec, weight, antiderivs):
        self.spec = spec
        self.weight = weight
        self.antiderivatives = antiderivs

    @property
    def name(self):
        return self.spec.name

    def segment_integral(self, left, right, alpha, beta):
        """Closed form of ``int_left^right (alpha pi + beta) gamma(pi) dpi``
        for the density part of the weight.

        Uses ``[(alpha pi + beta) Gamma(pi) - alpha GammaBar(pi)]``. At an end
        point of ``[0, 1]`` the line must vanish; the integral is then
        ``inf`` when the pole of ``gamma`` there is of order 2 or more, and
        the ``Gamma`` term drops out otherwise.
        """
        if right <= left or (alpha == 0 and beta == 0):
            return 0.0

        at_zero = left <= 0.0
        at_one = right >= 1.0

        if (at_zero and self.weight.diverges_at(0)) or (
            at_one and self.weight.diverges_at(1)
        ):
            return math.inf

        upper = self._boundary_term(right, alpha, beta, at_one)
        lower = self._boundary_term(left, alpha, beta, at_zero)
        return upper - lower

    def _boundary_term(self, x, alpha, beta, at_edge):
        gamma_bar = float(self.antiderivatives.GammaBar(x))

        if at_edge:
            return -alpha * gamma_bar

        return (alpha * x + beta) * float(self.antiderivatives.Gamma(x)) - (
            alpha * gamma_bar
        )

    def __repr__(self):
        return f"Divergence({self.name!r})"


class DivergenceCatalog:
    """Registry of :class:`Divergence` entries keyed by name."""

    def __init__(self):
        self._registry = {}

    @property
    def registry(self):
        """Return a copy of the name to entry mapping."""
        return dict(self._registry)

    @property
    def names(self):
        return tuple(self._registry)

    def add(self, entry):
        """Register ``entry``, replacing any entry with the same name."""
        if not isinstance(entry, Divergence):
            raise TypeError(f"Expected a Divergence, got {type(entry).__name__}")

        if entry.name in self._registry:
            LOGGER.debug("Replacing catalog entry %r", entry.name)

        self._registry[entry.name] = entry

    def remove(self, name):
        """Remove the entry called ``name``."""
        self.get(name)
        del self._registry[name]

    def get(self, name):
        """Return the entry called ``name``.

        Raises
        ------
        CatalogLookupError
            If there is no such entry.
        """
        try:
            return self._registry[name]

        except (KeyError, TypeError) as err:
            raise CatalogLookupError(
                f"Unknown divergence {name!r}; known divergences are "
                f"{', '.join(self._registry)}"
            ) from err

    def __contains__(self, name):
        return name in self._registry

    def __iter__(self):
        return iter(self._registry.values())

    def __len__(self):
        return len(self._registry)


def _binary_entropy_term(pi):
    # pi ln pi + (1 - pi) ln(1 - pi), finite on [0, 1]
    pi = np.asarray(pi, dtype=float)
    return xlogy(pi, pi) + xlogy(1.0 - pi, 1.0 - pi)


def _logit(pi):
    with np.errstate(divide="ignore"):
        return np.log(pi) - np.log1p(-np.asarray(pi, dtype=float))


def _kl_gamma(pi):
    return _logit(pi) - 1.0 / pi


def _kl_gamma_bar(pi):
    with np.errstate(divide="ignore"):
        return _binary_entropy_term(pi) - np.log(pi)


def _js_gamma(pi):
    return 0.5 * _logit(pi)


def _js_gamma_bar(pi):
    return 0.5 * _binary_entropy_term(pi)


def _jeffreys_density(pi):
    return 1.0 / (pi * (1.0 - pi)) ** 2


def _jeffreys_gamma(pi):
    return -1.0 / pi + 1.0 / (1.0 - pi) + 2.0 * _logit(pi)


def _jeffreys_gamma_bar(pi):
    with np.errstate(divide="ignore"):
        return (
            -np.log(pi) - np.log1p(-np.asarray(pi, dtype=float))
            + 2.0 * _binary_entropy_term(pi)
        )


def _agm_density(pi):
    return (2.0 * pi**2 - 2.0 * pi + 1.0) / (4.0 * (pi * (1.0 - pi)) ** 2)


def _agm_gamma(pi):
    return 0.25 * _jeffreys_gamma(pi) - 0.5 * _logit(pi)


def _agm_gamma_bar(pi):
    return 0.25 * _jeffreys_gamma_bar(pi) - 0.5 * _binary_entropy_term(pi)


def _jensen_shannon_f(t):
    t = np.asarray(t, dtype=float)
    return 0.5 * xlogy(t, t) - 0.5 * xlogy(t + 1.0, t + 1.0) + LN2


def _agm_f(t):
    t = np.asarray(t, dtype=float)
    return 0.5 * (t + 1.0) * (np.log1p(t) - LN2 - 0.5 * np.log(t))


def _zeros(pi):
    return np.zeros_like(np.asarray(pi, dtype=float))


def _build_catalog():
    cat = DivergenceCatalog()

    def register(spec, density, gamma, gamma_bar, pole_orders):
        atoms = [(1.0 / (1.0 + t), jump * (1.0 + t)) for t, jump in spec.generator_kinks]
        weight = WeightFunction(
            density,
            atoms=atoms,
            pole_orders=pole_orders,
            atomic=spec.second_derivative is None,
        )
        cat.add(Divergence(spec, weight, AntiderivativePair(gamma, gamma_bar)))

    register(
        DivergenceSpec(
            name="variational",
            label="Variational divergence",
            f=lambda t: np.abs(np.asarray(t, dtype=float) - 1.0),
            f_at_zero=1.0,
            f_slope_at_inf=1.0,
            generator_kinks=((1.0, 2.0),),
            symmetric_gamma=True,
        ),
        _zeros,
        _zeros,
        _zeros,
        (0.0, 0.0),
    )

    register(
        DivergenceSpec(
            name="kl",
            label="Kullback-Leibler divergence",
            f=lambda t: xlogy(t, t),
            f_at_zero=0.0,
            f_slope_at_inf=math.inf,
            second_derivative=lambda t: 1.0 / np.asarray(t, dtype=float),
            convex_gamma=True,
        ),
        lambda pi: 1.0 / (pi**2 * (1.0 - pi)),
        _kl_gamma,
        _kl_gamma_bar,
        (2.0, 1.0),
    )

    register(
        DivergenceSpec(
            name="triangular",
            label="Triangular discrimination",
            f=lambda t: (np.asarray(t, dtype=float) - 1.0) ** 2 / (t + 1.0),
            f_at_zero=1.0,
            f_slope_at_inf=1.0,
            second_derivative=lambda t: 8.0 / (np.asarray(t, dtype=float) + 1.0) ** 3,
            symmetric_gamma=True,
            convex_gamma=True,
        ),
        lambda pi: np.full_like(np.asarray(pi, dtype=float), 8.0),
        lambda pi: 8.0 * np.asarray(pi, dtype=float),
        lambda pi: 4.0 * np.asarray(pi, dtype=float) ** 2,
        (0.0, 0.0),
    )

    register(
        DivergenceSpec(
            name="jensen_shannon",
            label="Jensen-Shannon divergence",
            f=_jensen_shannon_f,
            f_at_zero=LN2,
            f_slope_at_inf=0.0,
            second_derivative=lambda t: 1.0 / (2.0 * t * (np.asarray(t, dtype=float) + 1.0)),
            symmetric_gamma=True,
            convex_gamma=True,
        ),
        lambda pi: 1.0 / (2.0 * pi * (1.0 - pi)),
        _js_gamma,
        _js_gamma_bar,
        (1.0, 1.0),
    )

    register(
        DivergenceSpec(
            name="agm_t",
            label="Arithmetic-geometric mean divergence",
            f=_agm_f,
            f_at_zero=math.inf,
            f_slope_at_inf=math.inf,
            second_derivative=lambda t: (np.asarray(t, dtype=float) ** 2 + 1.0)
            / (4.0 * t**2 * (t + 1.0)),
            symmetric_gamma=True,
            convex_gamma=True,
        ),
        _agm_density,
        _agm_gamma,
        _agm_gamma_bar,
        (2.0, 2.0),
    )

    register(
        DivergenceSpec(
            name="jeffreys",
            label="Jeffreys divergence",
            f=lambda t: (np.asarray(t, dtype=float) - 1.0) * np.log(t),
            f_at_zero=math.inf,
            f_slope_at_inf=math.inf,
            second_derivative=lambda t: (np.asarray(t, dtype=float) + 1.0) / t**2,
            symmetric_gamma=True,
            convex_gamma=True,
        ),
        _jeffreys_density,
        _jeffreys_gamma,
        _jeffreys_gamma_bar,
        (2.0, 2.0),
    )

    register(
        DivergenceSpec(
            name="hellinger",
            label="Squared Hellinger distance",
            f=lambda t: (np.sqrt(np.asarray(t, dtype=float)) - 1.0) ** 2,
            f_at_zero=1.0,
            f_slope_at_inf=1.0,
            second_derivative=lambda t: 0.5 * np.asarray(t, dtype=float) ** -1.5,
            symmetric_gamma=True,
            convex_gamma=True,
        ),
        lambda pi: 0.5 * (pi * (1.0 - pi)) ** -1.5,
        lambda pi: (2.0 * pi - 1.0) / np.sqrt(pi * (1.0 - pi)),
        lambda pi: -2.0 * np.sqrt(np.asarray(pi, dtype=float) * (1.0 - pi)),
        (1.5, 1.5),
    )

    register(
        DivergenceSpec(
            name="chi2",
            label="Pearson chi-squared divergence",
            f=lambda t: (np.asarray(t, dtype=float) - 1.0) ** 2,
            f_at_zero=1.0,
            f_slope_at_inf=math.inf,
            second_derivative=lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
            convex_gamma=True,
        ),
        lambda pi: 2.0 / np.asarray(pi, dtype=float) ** 3,
        lambda pi: -1.0 / np.asarray(pi, dtype=float) ** 2,
        lambda pi: 1.0 / np.asarray(pi, dtype=float),
        (3.0, 0.0),
    )

    register(
        DivergenceSpec(
            name="sym_chi2",
            label="Symmetric chi-squared divergence",
            f=lambda t: (np.asarray(t, dtype=float) - 1.0) ** 2 * (t + 1.0) / t,
            f_at_zero=math.inf,
            f_slope_at_inf=math.inf,
            second_derivative=lambda t: 2.0 + 2.0 / np.asarray(t, dtype=float) ** 3,
            symmetric_gamma=True,
            convex_gamma=True,
        ),
        lambda pi: 2.0 / pi**3 + 2.0 / (1.0 - pi) ** 3,
        lambda pi: -1.0 / pi**2 + 1.0 / (1.0 - pi) ** 2,
        lambda pi: 1.0 / pi + 1.0 / (1.0 - pi),
        (3.0, 3.0),
    )

    return cat


catalog = _build_catalog()


def get_divergence(name):
    """Return the :class:`Divergence` entry called ``name``."""
    return catalog.get(name)


def catalog_lookup(name):
    """Return ``(spec, weight, antiderivatives)`` for ``name``.

    Raises
    ------
    CatalogLookupError
        If ``name`` is not in the catalog.
    """
    entry = catalog.get(name)
    return entry.spec, entry.weight, entry.antiderivatives


def weight_from_generator(spec, pi):
    """Evaluate ``gamma(pi) = f''((1 - pi) / pi) / pi**3`` from the generator.

    Parameters
    ----------
    spec : `DivergenceSpec` or str
        The generator, or a catalog name.

    pi : float
        A prior in ``(0, 1)``.

    Raises
    ------
    DomainError
        If ``pi`` is not in ``(0, 1)``.

    AtomError
        If the generator has no second derivative at the matching ``t``.
    """
    if isinstance(spec, str):
        spec = catalog.get(spec).spec

    if not 0.0 < pi < 1.0:
        raise DomainError(f"Prior must lie in (0, 1), got {pi!r}")

    t = (1.0 - pi) / pi

    for kink, _ in spec.generator_kinks:
        if math.isclose(t, kink, rel_tol=1e-14, abs_tol=0.0):
            raise AtomError(
                f"{spec.name}: weight has a point mass at pi={pi!r}"
            )

    if spec.second_derivative is None:
        return 0.0

    return float(spec.second_derivative(t)) / pi**3


def antiderivatives(name, pi):
    """Return ``(Gamma(pi), GammaBar(pi))`` for the catalog entry ``name``.

    Raises
    ------
    DomainError
        If ``pi`` is outside ``[0, 1]``, or is an end point at which
        ``gamma`` is not integrable.
    """
    entry = catalog.get(name)

    if not 0.0 <= pi <= 1.0:
        raise DomainError(f"Prior must lie in [0, 1], got {pi!r}")

    if pi in (0.0, 1.0) and entry.weight.pole_orders[int(pi)] >= 1.0:
        raise DomainError(
            f"{name}: weight is not integrable at pi={pi!r}"
        )

    pair = entry.antiderivatives
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(pair.Gamma(pi)), float(pair.GammaBar(pi))
