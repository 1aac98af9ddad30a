from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painlevekit.odeparse import (Expanding, ParseError, PolySystem, Steady, builtin,
                                  evaluate_rhs, format_system, jacobian_at, parse_system,
                                  sum_of_rhs)

STEADY4 = """\
vars: x, y
params: n=4
x' = x^2 - x*y + (n-1)
y' = x*y - n*x^2
"""


def test_builtin_matches_text_form():
    assert parse_system(STEADY4) == builtin(Steady(4))


def test_expanding_builtin_terms():
    s = builtin(Expanding(3, F(1, 2)))
    fx, fy, fz = s.as_dicts()
    assert fx == {(2, 0, 0): 1, (1, 1, 0): -1, (0, 0, 2): F(1, 2), (0, 0, 0): 2}
    assert fy == {(1, 1, 0): 1, (2, 0, 0): -3, (0, 0, 2): F(1, 2)}
    assert fz == {(1, 0, 1): 1}


@pytest.mark.parametrize("bad", [Steady(0), Expanding(2, F(0)), Expanding(2, F(-1))])
def test_builtin_rejects_bad_parameters(bad):
    with pytest.raises(ValueError):
        builtin(bad)


def test_format_is_canonical():
    text = format_system(builtin(Steady(4)))
    assert text.splitlines()[2:] == ["x' = x^2 - x*y + 3", "y' = -4*x^2 + x*y"]


def test_variables_inferred_and_comments_ignored():
    s = parse_system("# steady, n = 1\nx' = x^2 - x*y   # no constant\ny' = x*y - x^2\n")
    assert s.variables == ("x", "y")
    assert s.equations == builtin(Steady(1)).equations


def test_parameter_division_is_polynomial():
    s = parse_system("vars: x\nparams: a=2\nx' = x/a + 3/2")
    assert s.as_dicts() == [{(1,): F(1, 2), (0,): F(3, 2)}]


@pytest.mark.parametrize("text, kind, line, col", [
    ("vars: x, y\nx' = x^2 + q\ny' = y", "unbound-parameter", 2, 12),
    ("vars: x\nx' = 1/x", "non-polynomial", 2, 8),
    ("vars: x\nx' = x^(1/2)", "non-polynomial", 2, 8),
    ("vars: x\nx' = x^-1", "non-polynomial", 2, 8),
    ("vars: x\nx' = x*t", "non-polynomial", 2, 8),
    ("vars: x\nx' = (x + 1", "syntax", 2, 12),
    ("vars: x\nz' = x", "unknown-variable", 2, 1),
    ("vars: x\nx' = x +* 2", "syntax", 2, 9),
    ("vars: x\nx'= 2 x", "syntax", 2, 7),
])
def test_parse_errors_carry_position(text, kind, line, col):
    with pytest.raises(ParseError) as info:
        parse_system(text)
    err = info.value
    assert (err.kind, err.line, err.col) == (kind, line, col)
    assert str(err).startswith(f"line {line}, col {col}: ")


def test_decimal_parameter_rejected():
    with pytest.raises(ParseError):
        parse_system("vars: x\nparams: a=0.5\nx' = x")


def test_sum_of_rhs():
    assert sum_of_rhs(builtin(Steady(1))) == {}
    assert sum_of_rhs(builtin(Steady(4))) == {(2, 0): -3, (0, 0): 3}


# -- round trip and Jacobian ---------------------------------------------------------

coeffs = st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(bool)


@st.composite
def systems(draw):
    dim = draw(st.integers(1, 3))
    names = ("x", "y", "z")[:dim]
    polys = []
    for _ in range(dim):
        terms = draw(st.dictionaries(
            st.tuples(*[st.integers(0, 3)] * dim), coeffs, min_size=1, max_size=5))
        polys.append(terms)
    return PolySystem.from_dicts(names, polys)


@settings(max_examples=150, deadline=None)
@given(systems())
def test_format_parse_round_trip(s):
    assert parse_system(format_system(s)) == s


@settings(max_examples=100, deadline=None)
@given(systems(), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                           min_size=3, max_size=3))
def test_jacobian_matches_exact_difference_quotient(s, pt):
    # degree in each variable is at most 3, so one Richardson step on the
    # symmetric difference quotient is exact
    pt = pt[:s.dimension]
    J = jacobian_at(s, pt)
    for u in range(s.dimension):
        def quotient(h):
            up = list(pt)
            dn = list(pt)
            up[u] += h
            dn[u] -= h
            return [(a - b) / (2 * h) for a, b in zip(evaluate_rhs(s, up), evaluate_rhs(s, dn))]
        h = F(1, 7)
        q1, q2 = quotient(h), quotient(h / 2)
        rich = [(4 * b - a) / 3 for a, b in zip(q1, q2)]
        assert rich == [row[u] for row in J]
