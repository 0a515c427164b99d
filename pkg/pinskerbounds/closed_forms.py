"""Closed-form tight lower bounds in terms of the variational divergence
``V = sum_x |p(x) - q(x)|``.

With the single constraint ``V_{1/2} = V / 4`` the slope box is one
interval and the bound reduces to a one-dimensional problem. When ``gamma``
is symmetric and convex the optimal curve is symmetric and the bound is
explicit.
"""

import logging
import math

import numpy as np

from .fdiv_catalog import get_divergence
from .utils import DomainError, HypothesisError, bracketed_minimize

LOGGER = logging.getLogger(__name__)

SCAN_POINTS = 64
KL_SCAN_POINTS = 128

# At V = 2 these are finite limits; the remaining entries blow up.
LIMITS_AT_TWO = {
    "variational": 2.0,
    "triangular": 2.0,
    "hellinger": 2.0,
    "jensen_shannon": math.log(2.0),
    "agm_t": math.inf,
    "sym_chi2": math.inf,
}

__all__ = [
    "asymmetric_n1_bound",
    "corollary_bound",
    "symmetric_bound",
]


def _check_v(v, allow_two=False):
    v = float(v)
    upper_ok = v <= 2.0 if allow_two else v < 2.0

    if not (v >= 0.0 and upper_ok):
        interval = "[0, 2]" if allow_two else "[0, 2)"
        raise DomainError(f"Variational divergence must lie in {interval}, got {v!r}")

    return v


def symmetric_bound(name, v):
    """Tight bound for a symmetric convex ``gamma``:

        2 [GammaBar(1/2 - V/4) + (V/4) Gamma(1/2) - GammaBar(1/2)]

    Raises
    ------
    HypothesisError
        If the weight of ``name`` is not both symmetric and convex.

    DomainError
        If ``v`` is outside ``[0, 2)``.
    """
    entry = get_divergence(name)

    if not (entry.spec.symmetric_gamma and entry.spec.convex_gamma):
        raise HypothesisError(
            f"{name}: the symmetric closed form needs a symmetric convex weight"
        )

    v = _check_v(v)
    if v == 0.0:
        return 0.0

    gamma, gamma_bar = entry.antiderivatives
    quarter = v / 4.0

    with np.errstate(divide="ignore", invalid="ignore"):
        value = 2.0 * (
            float(gamma_bar(0.5 - quarter))
            + quarter * float(gamma(0.5))
            - float(gamma_bar(0.5))
        )

    return max(value, 0.0)


def _n1_objective(entry, psi, a):
    # The line through (1/2, psi) with slope a meets pi at L and 1 - pi at U.
    lower = (0.5 * a - psi) / (a - 1.0)
    upper = (1.0 - psi + 0.5 * a) / (a + 1.0)

    first = entry.segment_integral(lower, 0.5, 1.0 - a, 0.5 * a - psi)
    second = entry.segment_integral(0.5, upper, -a - 1.0, 1.0 - psi + 0.5 * a)

    if math.isinf(first) or math.isinf(second):
        return math.inf

    def gap(pi):
        if pi <= lower or pi >= upper:
            return 0.0

        if pi <= 0.5:
            return (1.0 - a) * pi + 0.5 * a - psi

        return (-a - 1.0) * pi + 1.0 - psi + 0.5 * a

    return first + second + entry.weight.atom_contribution(gap)


def asymmetric_n1_bound(name, v):
    """Tight bound for one constraint at ``pi = 1/2`` and any ``gamma``.

    Minimizes, over slopes ``a`` in ``[-2 psi, 2 psi]`` with
    ``psi = 1/2 - V/4``, the integral of the gap of the curve
    ``min(pi, 1 - pi, psi + a (pi - 1/2))``.

    Raises
    ------
    DomainError
        If ``v`` is outside ``[0, 2)``.
    """
    entry = get_divergence(name)
    v = _check_v(v)

    if v == 0.0:
        return 0.0

    psi = 0.5 - v / 4.0
    _, value = bracketed_minimize(
        lambda a: _n1_objective(entry, psi, a),
        -2.0 * psi,
        2.0 * psi,
        points=SCAN_POINTS,
    )

    return max(value, 0.0)


def _kl_beta_objective(beta, v):
    if beta - 2.0 + v >= 0.0:
        return math.inf

    value = (v + 2.0 - beta) / 4.0 * math.log((beta - 2.0 - v) / (beta - 2.0 + v))

    # The second term vanishes as beta -> V - 2.
    if beta + 2.0 - v > 0.0:
        value += (beta + 2.0 - v) / 4.0 * math.log(
            (beta + 2.0 - v) / (beta + 2.0 + v)
        )

    return value if math.isfinite(value) else math.inf


def kl_bound(v):
    """Tight lower bound on KL divergence by its variational divergence:
    the minimum over ``beta`` in ``[V - 2, 2 - V]`` of

        (V + 2 - beta)/4 ln((beta - 2 - V)/(beta - 2 + V))
        + (beta + 2 - V)/4 ln((beta + 2 - V)/(beta + 2 + V)).
    """
    v = _check_v(v)

    if v == 0.0:
        return 0.0

    _, value = bracketed_minimize(
        lambda beta: _kl_beta_objective(beta, v),
        v - 2.0,
        2.0 - v,
        points=KL_SCAN_POINTS,
    )

    return max(value, 0.0)


def corollary_bound(name, v):
    """Explicit tight bound on divergence ``name`` in terms of ``V``.

    ====================  =====================================
    ``variational``       ``V``
    ``kl``                one-dimensional minimum, see `kl_bound`
    ``triangular``        ``V**2 / 2``
    ``jensen_shannon``    ``(1/2 - V/4) ln(2 - V) + (1/2 + V/4) ln(2 + V) - ln 2``
    ``agm_t``             ``ln(4/sqrt(4 - V**2)) - ln 2``
    ``jeffreys``          ``V ln((2 + V)/(2 - V))``
    ``hellinger``         ``2 - sqrt(4 - V**2)``
    ``chi2``              ``V**2`` for ``V < 1``, ``V/(2 - V)`` otherwise
    ``sym_chi2``          ``8 V**2 / (4 - V**2)``
    ====================  =====================================

    ``V = 2`` is accepted where the bound has a limit there.

    Raises
    ------
    DomainError
        If ``v`` is outside ``[0, 2]``, or equals 2 for ``kl``, ``chi2`` or
        ``jeffreys``.
    """
    get_divergence(name)
    v = _check_v(v, allow_two=True)

    if v == 2.0:
        if name not in LIMITS_AT_TWO:
            raise DomainError(f"{name}: no finite bound at V = 2")

        return LIMITS_AT_TWO[name]

    if name == "variational":
        return v

    if name == "kl":
        return kl_bound(v)

    if name == "triangular":
        return v**2 / 2.0

    if name == "jensen_shannon":
        return (
            (0.5 - v / 4.0) * math.log(2.0 - v)
            + (0.5 + v / 4.0) * math.log(2.0 + v)
            - math.log(2.0)
        )

    if name == "agm_t":
        return math.log(4.0 / math.sqrt(4.0 - v**2)) - math.log(2.0)

    if name == "jeffreys":
        return v * math.log((2.0 + v) / (2.0 - v))

    if name == "hellinger":
        return 2.0 - math.sqrt(4.0 - v**2)

    if name == "chi2":
        return v**2 if v < 1.0 else v / (2.0 - v)

    if name == "sym_chi2":
        return 8.0 * v**2 / (4.0 - v**2)

    # Entries added to the catalog later have no explicit formula.
    return asymmetric_n1_bound(name, v)
