"""Earlier lower bounds on f-divergences in terms of the variational
divergence ``V``, kept for comparison with the tight bounds.
"""

import logging
import math

from scipy import optimize

from .fdiv_catalog import get_divergence
from .utils import AtomError, DomainError, HypothesisError

LOGGER = logging.getLogger(__name__)

POLYNOMIAL_VARIANTS = ("kullback", "topsoe", "toussaint")

# Below this the parametric curve is evaluated by its Taylor series.
SERIES_THRESHOLD = 1e-4

# Beyond this sinh and coth overflow their naive forms.
MAX_CURVE_PARAMETER = 700.0

DERIVATIVE_STEP = 1e-5

__all__ = [
    "arnold_chi2_bound",
    "classical_pinsker",
    "fedotov_bound",
    "fedotov_curve",
    "gilardoni_quadratic_bound",
    "gilardoni_symmetric",
    "gilardoni_vajda_bound",
    "lecam_variational_bound",
    "polynomial_bound",
    "vajda_bound",
]


def _check_v(v, closed=True):
    v = float(v)
    inside = 0.0 <= v <= 2.0 if closed else 0.0 <= v < 2.0

    if not inside:
        interval = "[0, 2]" if closed else "[0, 2)"
        raise DomainError(f"Variational divergence must lie in {interval}, got {v!r}")

    return v


def classical_pinsker(v):
    """Pinsker's inequality, ``KL >= V**2 / 2``."""
    v = _check_v(v)
    return v**2 / 2.0


def polynomial_bound(variant, v):
    """Polynomial refinements of Pinsker's inequality.

    Parameters
    ----------
    variant : {"kullback", "topsoe", "toussaint"}
        ``V**2/2 + V**4/36``, that plus ``V**6/270``, or the larger of
        :func:`vajda_bound` and ``V**2/2 + V**4/36 + V**8/288``.

    v : float
        Variational divergence in ``[0, 2]``.
    """
    v = _check_v(v)

    if variant == "kullback":
        return v**2 / 2.0 + v**4 / 36.0

    if variant == "topsoe":
        return v**2 / 2.0 + v**4 / 36.0 + v**6 / 270.0

    if variant == "toussaint":
        if v == 2.0:
            return math.inf

        return max(vajda_bound(v), v**2 / 2.0 + v**4 / 36.0 + v**8 / 288.0)

    raise DomainError(
        f"Unknown polynomial bound {variant!r}; expected one of "
        f"{', '.join(POLYNOMIAL_VARIANTS)}"
    )


def vajda_bound(v):
    """``KL >= ln((2 + V)/(2 - V)) - 2V/(2 + V)``."""
    v = _check_v(v, closed=False)
    return max(math.log((2.0 + v) / (2.0 - v)) - 2.0 * v / (2.0 + v), 0.0)


def gilardoni_vajda_bound(v):
    """Improvement of :func:`vajda_bound`,
    ``KL >= ln(2/(2 - V)) - ((2 - V)/2) ln((2 + V)/2)``.
    """
    v = _check_v(v, closed=False)
    return max(
        math.log(2.0 / (2.0 - v)) - (2.0 - v) / 2.0 * math.log((2.0 + v) / 2.0),
        0.0,
    )


def arnold_chi2_bound(v):
    """``chi2 >= V**2``."""
    v = _check_v(v)
    return v**2


def _slope_at_one(f):
    h = DERIVATIVE_STEP
    return float((f(1.0 + h) - f(1.0 - h)) / (2.0 * h))


def gilardoni_symmetric(name, v):
    """Tight bound for symmetric f-divergences,
    ``((2 - V)/2) f((2 + V)/(2 - V)) - f'(1) V``, with ``f'(1)`` from a
    central difference.

    Raises
    ------
    HypothesisError
        If the divergence is not symmetric.
    """
    spec = get_divergence(name).spec

    if not spec.symmetric_gamma:
        raise HypothesisError(f"{name} is not a symmetric f-divergence")

    v = _check_v(v, closed=False)
    if v == 0.0:
        return 0.0

    slope = _slope_at_one(spec.f)
    value = (2.0 - v) / 2.0 * float(spec.f((2.0 + v) / (2.0 - v))) - slope * v
    return max(value, 0.0)


def gilardoni_quadratic_bound(name, v):
    """Second-order bound ``f''(1) V**2 / 2``.

    Raises
    ------
    AtomError
        If ``f`` has no second derivative at 1.
    """
    spec = get_divergence(name).spec

    if spec.second_derivative is None or any(t == 1.0 for t, _ in spec.generator_kinks):
        raise AtomError(f"{name}: f has no second derivative at 1")

    v = _check_v(v)
    return float(spec.second_derivative(1.0)) * v**2 / 2.0


def lecam_variational_bound(h2):
    """Largest variational divergence compatible with squared Hellinger
    distance ``h2``: ``V <= h sqrt(4 - h**2)``.
    """
    h2 = float(h2)
    if not 0.0 <= h2 <= 2.0:
        raise DomainError(f"Squared Hellinger distance must lie in [0, 2], got {h2!r}")

    return math.sqrt(h2 * (4.0 - h2))


def _curve_point(t):
    """``(V(t), L(t))`` without overflow for any ``t > 0``."""
    if t <= SERIES_THRESHOLD:
        x = t / 3.0 - t**3 / 45.0 + 2.0 * t**5 / 945.0
        return t * (1.0 - x * x), t**2 / 2.0 - t**4 / 12.0

    coth = 1.0 / math.tanh(t)
    x = coth - 1.0 / t
    log_sinh = t + math.log(-math.expm1(-2.0 * t)) - math.log(2.0)
    t_over_sinh = 2.0 * t * math.exp(-t) / -math.expm1(-2.0 * t)

    v = t * (1.0 - x * x)
    l = math.log(t) - log_sinh + t * coth - t_over_sinh**2
    return v, l


def fedotov_curve(t):
    """Point ``(V(t), L(t))`` of the parametric tight Pinsker curve for KL:

        V(t) = t (1 - (coth t - 1/t)**2)
        L(t) = ln(t / sinh t) + t coth t - t**2 / sinh(t)**2

    Raises
    ------
    DomainError
        If ``t <= 0`` or ``t > 700``.
    """
    t = float(t)

    if not t > 0.0:
        raise DomainError(f"Curve parameter must be positive, got {t!r}")

    if t > MAX_CURVE_PARAMETER:
        raise DomainError(
            f"Curve parameter {t!r} exceeds {MAX_CURVE_PARAMETER:g}, where "
            f"V(t) ~ 2 - 1/t"
        )

    return _curve_point(t)


def fedotov_bound(v):
    """KL bound from the parametric curve: solve ``V(t) = v`` by bisection
    and return ``L(t)``.
    """
    v = _check_v(v, closed=False)
    if v == 0.0:
        return 0.0

    lo = min(1e-6, v / 2.0)
    hi = MAX_CURVE_PARAMETER
    if _curve_point(hi)[0] < v:
        # V(t) ~ 2 - 1/t
        hi = max(hi, 4.0 / (2.0 - v))

    t = optimize.bisect(
        lambda s: _curve_point(s)[0] - v,
        lo,
        hi,
        xtol=1e-14,
        rtol=4 * 2.0**-52,
        maxiter=500,
    )
    LOGGER.debug("fedotov_bound(%r): t=%r", v, t)
    return _curve_point(t)[1]
