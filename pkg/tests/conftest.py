"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from splitmodels.poly import Polynomial, VarTable, parse_polynomial


def table(*names: str) -> VarTable:
    """A variable table; appends the uniformizer when absent."""
    if "pi" not in names:
        names = names + ("pi",)
    return VarTable(list(names))


def poly(tab: VarTable, text: str) -> Polynomial:
    return parse_polynomial(tab, text)


def random_polynomial(
    rng: random.Random,
    tab: VarTable,
    max_terms: int = 3,
    max_exp: int = 2,
    coeff_span: int = 4,
) -> Polynomial:
    """A small random polynomial with exact rational coefficients."""
    p = tab.zero()
    for _ in range(rng.randint(0, max_terms)):
        term = tab.const(
            Fraction(rng.randint(-coeff_span, coeff_span), rng.randint(1, 3))
        )
        for name in tab.names:
            for _ in range(rng.randint(0, max_exp)):
                term = term * tab.var(name)
        p = p + term
    return p


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260819)
