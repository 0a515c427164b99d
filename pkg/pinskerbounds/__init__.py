"""Tight lower bounds on f-divergences in terms of variational divergence
and generalized variational divergences.

The catalog of supported divergences is :data:`pinskerbounds.catalog`; bounds
under arbitrary finite sets of constraints come from
:func:`~pinskerbounds.minimize_bound`, and explicit curves from
:func:`~pinskerbounds.corollary_bound`.
"""

from .closed_forms import asymmetric_n1_bound, corollary_bound, symmetric_bound
from .distributions import (
    DistributionPair,
    FiniteDistribution,
    RiskProfile,
    bayes_risk,
    f_divergence,
    generalized_variational,
    risk_profile,
    variational_divergence,
)
from .fdiv_catalog import (
    DivergenceCatalog,
    DivergenceSpec,
    antiderivatives,
    catalog,
    catalog_lookup,
    get_divergence,
    weight_from_generator,
)
from .integral_rep import divergence_via_representation, representation_residual
from .oracle import achieving_pair, distribution_search, slope_grid_bound
from .pinsker_solver import (
    BoundResult,
    ConstraintSet,
    gap_segments,
    minimize_bound,
    objective,
)
from .utils import (
    AtomError,
    CatalogLookupError,
    DimensionError,
    DomainError,
    HypothesisError,
    InfeasibleConstraintsError,
    NotRealizableError,
    PinskerError,
    SlopeError,
)

import importlib.metadata


__version__ = importlib.metadata.version("pinskerbounds")


def version():
    """Return the version of pinskerbounds."""
    return __version__


__all__ = [
    "AtomError",
    "BoundResult",
    "CatalogLookupError",
    "ConstraintSet",
    "DimensionError",
    "DistributionPair",
    "DivergenceCatalog",
    "DivergenceSpec",
    "DomainError",
    "FiniteDistribution",
    "HypothesisError",
    "InfeasibleConstraintsError",
    "NotRealizableError",
    "PinskerError",
    "RiskProfile",
    "SlopeError",
    "__version__",
    "achieving_pair",
    "antiderivatives",
    "asymmetric_n1_bound",
    "bayes_risk",
    "catalog",
    "catalog_lookup",
    "corollary_bound",
    "distribution_search",
    "divergence_via_representation",
    "f_divergence",
    "gap_segments",
    "generalized_variational",
    "get_divergence",
    "minimize_bound",
    "objective",
    "representation_residual",
    "risk_profile",
    "slope_grid_bound",
    "symmetric_bound",
    "variational_divergence",
    "version",
    "weight_from_generator",
]

# Make sure __all__does not have duplicates
if len(__all__) != len(set(__all__)):
    duplicates = [x for i, x in enumerate(__all__) if x in __all__[:i]]
    raise ValueError(f"Duplicate entries in __all__: {', '.join(duplicates)}")
