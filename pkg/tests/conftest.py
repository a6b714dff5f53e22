from __future__ import annotations

import math

import pytest

from univcheck import functions as fc

# One "criterion N: PASS|FAIL ..." line per acceptance criterion, filled by test_acceptance.
ACCEPTANCE: dict[int, str] = {}


def univalent_corpus() -> dict[str, fc.AnalyticFunction]:
    return {
        "identity": fc.preset("identity"),
        "koebe": fc.preset("koebe"),
        "z/(1-z)": fc.preset("z_over_one_minus_cz", 1),
        "z exp(z/2)": fc.preset("z_exp_cz", 0.5),
        "z exp(-z/2)": fc.preset("z_exp_cz", -0.5),
        "z+0.25z^2": fc.preset("polynomial", 0, 1, 0.25),
        "z+0.1z^2": fc.preset("polynomial", 0, 1, 0.1),
        "z-0.2iz^2": fc.preset("polynomial", 0, 1, -0.2j),
    }


def non_univalent_corpus() -> dict[str, fc.AnalyticFunction]:
    return {
        "z+z^2": fc.preset("polynomial", 0, 1, 1),
        "z+2z^3": fc.preset("polynomial", 0, 1, 0, 2),
    }


def exp_series(c: float, n: int = 60) -> fc.AnalyticFunction:
    """Truncated Taylor series of (e^{cz} - 1)/c, a class-A function."""
    coeffs = [0.0] + [c ** (k - 1) / math.factorial(k) for k in range(1, n)]
    return fc.from_coefficients(coeffs, fc.CLASS_A, truncated=True, label=f"(exp({c}z)-1)/{c}")


@pytest.fixture
def corpus() -> dict[str, fc.AnalyticFunction]:
    return univalent_corpus()


@pytest.fixture
def bad_corpus() -> dict[str, fc.AnalyticFunction]:
    return non_univalent_corpus()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
