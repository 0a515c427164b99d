"""Tests for the `pinskerbounds.verification` module."""

import pytest

from pinskerbounds.utils import DomainError
from pinskerbounds.verification import (
    SUITES,
    InvariantResult,
    format_report,
    run_suite,
)


def test_invariant_result_passed():
    assert InvariantResult("ladder", "a<=b", 0.0, 1e-9).passed
    assert not InvariantResult("ladder", "a<=b", 1e-3, 1e-9).passed
    assert not InvariantResult("ladder", "a<=b", float("inf"), 1e-9).passed


def test_format_report():
    report = format_report(
        [
            InvariantResult("duality", "identity", 1e-15, 1e-12),
            InvariantResult("duality", "concave", 1e-3, 1e-12),
        ]
    )

    lines = report.splitlines()
    assert "invariant" in lines[0]
    assert "FAIL" in report
    assert lines[-1] == "1 passed, 1 failed"


def test_run_suite_rejects_arguments():
    with pytest.raises(DomainError):
        run_suite("everything")

    with pytest.raises(DomainError):
        run_suite("duality", trials=0)

    with pytest.raises(DomainError):
        run_suite("duality", atoms=1)


def test_duality_suite_passes():
    results = run_suite("duality", seed=1, trials=10, atoms=5)

    assert {r.suite for r in results} == {"duality"}
    assert all(r.passed for r in results), format_report(results)


def test_run_suite_is_deterministic():
    first = run_suite("duality", seed=7, trials=5)
    second = run_suite("duality", seed=7, trials=5)

    assert first == second


@pytest.mark.slow
@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes(suite):
    results = run_suite(suite, seed=0, trials=6, atoms=5)

    assert results
    assert all(r.passed for r in results), format_report(results)


@pytest.mark.slow
@pytest.mark.parametrize(
    "suite,seed,trials",
    [("tightness", 1, 100), ("tightness", 3, 100), ("oracle", 2, 20)],
)
def test_suite_passes_at_scale(suite, seed, trials):
    results = run_suite(suite, seed=seed, trials=trials)

    assert all(r.passed for r in results), format_report(results)
