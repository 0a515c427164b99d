"""
Command-line interface for pinskerbounds.

Usage:
    pinsker bound --divergence kl --v 1.0
    pinsker bound --divergence kl --constraints two_point.json
    pinsker curve --divergence kl --method explicit,fedotov --v-min 0 --v-max 1.9 --steps 100
    pinsker verify --suite ladder
    pinsker divergence --divergence hellinger --p "[0.9, 0.1]" --q "[0.1, 0.9]"

Exit codes are 0 on success, 1 on malformed input, 2 on infeasible
constraints and 3 when a verification suite fails.
"""

import io
import json
import logging
import math
import re
import sys

import click
import numpy as np
from astropy.io import ascii
from astropy.table import Table

from . import closed_forms, reference_bounds, verification
from .distributions import DistributionPair, f_divergence, variational_divergence
from .fdiv_catalog import catalog
from .pinsker_solver import ConstraintSet, minimize_bound
from .utils import DomainError, InfeasibleConstraintsError, PinskerError

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3

KL_ONLY_METHODS = {
    "classical": reference_bounds.classical_pinsker,
    "kullback": lambda v: reference_bounds.polynomial_bound("kullback", v),
    "topsoe": lambda v: reference_bounds.polynomial_bound("topsoe", v),
    "toussaint": lambda v: reference_bounds.polynomial_bound("toussaint", v),
    "vajda": reference_bounds.vajda_bound,
    "gilardoni_vajda": reference_bounds.gilardoni_vajda_bound,
    "fedotov": reference_bounds.fedotov_bound,
}

CHI2_ONLY_METHODS = {
    "arnold": reference_bounds.arnold_chi2_bound,
}

GENERAL_METHODS = {
    "explicit": closed_forms.corollary_bound,
    "symmetric": closed_forms.symmetric_bound,
    "asymmetric": closed_forms.asymmetric_n1_bound,
    "solver": lambda name, v: minimize_bound(ConstraintSet.symmetric(v), name).bound,
    "gilardoni": reference_bounds.gilardoni_symmetric,
    "quadratic": reference_bounds.gilardoni_quadratic_bound,
}

CURVE_METHODS = (*GENERAL_METHODS, *KL_ONLY_METHODS, *CHI2_ONLY_METHODS)

FLOAT_FORMAT = "%.17g"

# Finite numbers travel through json.dumps as NUL-delimited strings and are
# unquoted afterwards; command-line arguments cannot contain NUL.
_FLOAT_TOKEN = re.compile(r'"\\u0000([^"\\]*)\\u0000"')

__all__ = [
    "cli",
    "main",
]


def _number(value):
    """JSON-safe float with 17 significant digits; infinities become
    strings.
    """
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    if math.isnan(value):
        return "nan"

    return f"\0{FLOAT_FORMAT % value}\0"


def _emit(document):
    click.echo(_FLOAT_TOKEN.sub(r"\1", json.dumps(document)))


def _fail(ctx, err, code):
    _emit({"error": str(err), "type": type(err).__name__})
    ctx.exit(code)


def _curve_function(name, method):
    if method in GENERAL_METHODS:
        func = GENERAL_METHODS[method]
        return lambda v: func(name, v)

    if method in KL_ONLY_METHODS:
        if name != "kl":
            raise DomainError(f"Method {method!r} only applies to kl")

        return KL_ONLY_METHODS[method]

    if method in CHI2_ONLY_METHODS:
        if name != "chi2":
            raise DomainError(f"Method {method!r} only applies to chi2")

        return CHI2_ONLY_METHODS[method]

    raise DomainError(
        f"Unknown method {method!r}; expected one of {', '.join(CURVE_METHODS)}"
    )


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase logging verbosity.")
def cli(verbose):
    """Tight lower bounds on f-divergences from variational divergences."""
    level = max(logging.WARNING - 10 * verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _load_constraints(path):
    try:
        with open(path, encoding="utf-8") as stream:
            document = json.load(stream)

    except (OSError, json.JSONDecodeError) as err:
        raise DomainError(f"Cannot read constraints from {path}: {err}") from err

    return ConstraintSet.from_json(document)


@cli.command()
@click.option("--divergence", "name", required=True, help="Catalog name of the divergence.")
@click.option("--v", "v", type=float, default=None, help="Variational divergence V.")
@click.option(
    "--constraints",
    "constraints_path",
    type=click.Path(dir_okay=False),
    default=None,
    help='JSON file {"constraints": [{"pi": ..., "v": ...}, ...]}.',
)
@click.option("--method", type=click.Choice(["closed", "solver"]), default=None)
@click.pass_context
def bound(ctx, name, v, constraints_path, method):
    """Tight lower bound on a divergence."""
    try:
        catalog.get(name)

        if (v is None) == (constraints_path is None):
            raise DomainError("Give exactly one of --v and --constraints")

        if v is not None:
            if not 0.0 <= v <= 2.0:
                raise DomainError(f"--v must lie in [0, 2], got {v!r}")

            constraints = ConstraintSet.symmetric(v) if v < 2.0 else None
        else:
            constraints = _load_constraints(constraints_path)

        symmetric = constraints is None or (
            len(constraints) == 1 and constraints.priors[0] == 0.5
        )
        method = method or ("closed" if symmetric else "solver")

        if method == "closed":
            if not symmetric:
                raise DomainError(
                    "The closed form needs a single constraint at pi = 1/2"
                )

            value = v if v is not None else 4.0 * constraints.values[0]
            result, argmin = closed_forms.corollary_bound(name, value), []

        else:
            if constraints is None:
                raise DomainError("The solver needs V < 2")

            solution = minimize_bound(constraints, name)
            result, argmin = solution.bound, [_number(a) for a in solution.slopes]

    except InfeasibleConstraintsError as err:
        _fail(ctx, err, EXIT_INFEASIBLE)

    except PinskerError as err:
        _fail(ctx, err, EXIT_MALFORMED)

    _emit(
        {
            "divergence": name,
            "bound": _number(result),
            "method": method,
            "argmin": argmin,
        }
    )


@cli.command()
@click.option("--divergence", "name", required=True)
@click.option("--method", "methods", required=True, help="Comma-separated methods.")
@click.option("--v-min", type=float, default=0.0, show_default=True)
@click.option("--v-max", type=float, default=1.9, show_default=True)
@click.option("--steps", type=int, default=100, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.pass_context
def curve(ctx, name, methods, v_min, v_max, steps, fmt):
    """Tabulate bounds over a grid of variational divergences."""
    methods = [m.strip() for m in methods.split(",") if m.strip()]

    try:
        catalog.get(name)

        if not methods:
            raise DomainError("Give at least one method")

        if len(set(methods)) != len(methods):
            raise DomainError(f"Repeated methods: {methods}")

        if not (0.0 <= v_min <= v_max < 2.0):
            raise DomainError(
                f"Need 0 <= v-min <= v-max < 2, got [{v_min!r}, {v_max!r}]"
            )

        if steps < 1:
            raise DomainError(f"Need at least one step, got {steps!r}")

        grid = np.linspace(v_min, v_max, steps)
        columns = {"v": grid}
        for method in methods:
            func = _curve_function(name, method)
            columns[method] = np.array([func(float(v)) for v in grid])

    except PinskerError as err:
        _fail(ctx, err, EXIT_MALFORMED)

    if fmt == "json":
        document = {"divergence": name}
        document.update({key: [_number(x) for x in col] for key, col in columns.items()})
        _emit(document)
        return

    table = Table(columns)
    buffer = io.StringIO()
    ascii.write(table, buffer, format="csv", formats={key: "%.17g" for key in columns})
    click.echo(buffer.getvalue(), nl=False)


@cli.command()
@click.option("--suite", type=click.Choice(verification.SUITES), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--atoms", type=int, default=6, show_default=True)
@click.pass_context
def verify(ctx, suite, seed, trials, atoms):
    """Run an invariant suite and report residuals."""
    try:
        results = verification.run_suite(suite, seed=seed, trials=trials, atoms=atoms)

    except PinskerError as err:
        _fail(ctx, err, EXIT_MALFORMED)

    click.echo(verification.format_report(results))

    if not all(r.passed for r in results):
        ctx.exit(EXIT_VERIFY_FAILED)


@cli.command()
@click.option("--divergence", "name", required=True)
@click.option("--p", "p_text", required=True, help="JSON list of probabilities.")
@click.option("--q", "q_text", required=True, help="JSON list of probabilities.")
@click.pass_context
def divergence(ctx, name, p_text, q_text):
    """Evaluate a divergence for a pair and compare it with the tight bound
    in terms of the pair's variational divergence.
    """
    try:
        entry = catalog.get(name)

        try:
            pair = DistributionPair(json.loads(p_text), json.loads(q_text))

        except json.JSONDecodeError as err:
            raise DomainError(f"--p and --q must be JSON lists: {err}") from err

        value = f_divergence(pair, entry.spec)
        v = variational_divergence(pair)
        try:
            tight = closed_forms.corollary_bound(name, min(v, 2.0))

        except DomainError:
            tight = math.inf

    except PinskerError as err:
        _fail(ctx, err, EXIT_MALFORMED)

    _emit(
        {
            "divergence": name,
            "value": _number(value),
            "variational": _number(v),
            "bound": _number(tight),
            "slack": _number(value - tight) if math.isfinite(tight) else "nan",
        }
    )


def main(argv=None):
    """Console entry point; maps usage errors to exit code 1."""
    try:
        code = cli.main(args=argv, prog_name="pinsker", standalone_mode=False)

    except click.exceptions.Abort:
        code = EXIT_MALFORMED

    except click.ClickException as err:
        err.show()
        code = EXIT_MALFORMED

    sys.exit(code or EXIT_OK)
