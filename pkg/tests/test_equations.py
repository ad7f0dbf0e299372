from __future__ import annotations

from fractions import Fraction

import pytest

from malgebra.equations import (
    Add,
    Const,
    Equation,
    Mul,
    Paren,
    XTerm,
    closed_form_solution,
    evaluate_sides,
    parse_equation,
    render,
)
from malgebra.errors import (
    MultipleVariableError,
    NonlinearEquationError,
    NoUniqueSolutionError,
    ParseError,
)
from malgebra.taxonomy import ORDERED_TYPES


def test_parse_simple_t1():
    eq = parse_equation("3x = 12")
    assert eq == Equation(XTerm(Fraction(3)), Const(Fraction(12)))


def test_parse_parenthesized_product():
    eq = parse_equation("2x = 3(4x + 5)")
    expected_rhs = Mul(
        Const(Fraction(3)), Paren(Add(XTerm(Fraction(4)), Const(Fraction(5))))
    )
    assert eq.rhs == expected_rhs
    assert isinstance(eq.rhs.right, Paren)


def test_parse_nonlinear_rejected():
    with pytest.raises(NonlinearEquationError):
        parse_equation("x * x = 4")
    with pytest.raises(NonlinearEquationError):
        parse_equation("2x(3x + 1) = 4")


def test_parse_foreign_variable_rejected():
    with pytest.raises(MultipleVariableError):
        parse_equation("3y = 12")
    with pytest.raises(MultipleVariableError):
        parse_equation("3x + y = 12")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse_equation("3x = ")
    assert "position" in str(info.value)
    with pytest.raises(ParseError):
        parse_equation("3x = 4 +")
    with pytest.raises(ParseError):
        parse_equation("3x 4 = 5")
    with pytest.raises(ParseError):
        parse_equation("3/0x = 5")


def test_unary_minus_binds_to_factor():
    from malgebra.equations import Sub

    eq = parse_equation("-3(4x - 5) = 2")
    assert eq.lhs == Mul(
        Const(Fraction(-3)), Paren(Sub(XTerm(Fraction(4)), Const(Fraction(5))))
    )


def test_render_conventions():
    assert str(parse_equation("3x=12")) == "3x = 12"
    assert str(parse_equation("2x = 3(4x+5)")) == "2x = 3(4x + 5)"
    assert str(parse_equation("2x = -3(4x+5)")) == "2x = -3(4x + 5)"
    assert str(parse_equation("x = 1/2")) == "x = 1/2"
    assert str(parse_equation("1x = 5")) == "x = 5"
    assert render(XTerm(Fraction(-1))) == "-x"


def test_rational_literals():
    eq = parse_equation("1/2x = 3/4")
    assert eq.lhs == XTerm(Fraction(1, 2))
    assert eq.rhs == Const(Fraction(3, 4))
    assert str(eq) == "1/2x = 3/4"


def test_evaluate_sides():
    eq = parse_equation("2x = 3(4x + 5)")
    assert evaluate_sides(eq, 1) == (Fraction(2), Fraction(27))
    eq2 = parse_equation("3x = 12")
    assert evaluate_sides(eq2, 4) == (Fraction(12), Fraction(12))
    eq3 = parse_equation("x = 1/2")
    assert evaluate_sides(eq3, Fraction(1, 2)) == (Fraction(1, 2), Fraction(1, 2))


def test_closed_form_solution():
    assert closed_form_solution(parse_equation("3x = 12")) == 4
    # expand by hand: 2x = 12x + 15  =>  x = -15/10
    assert closed_form_solution(parse_equation("2x = 3(4x + 5)")) == Fraction(-3, 2)
    with pytest.raises(NoUniqueSolutionError):
        closed_form_solution(parse_equation("5 = 5"))


def test_closed_form_substitutes_back_exactly(sampler):
    for t in ORDERED_TYPES:
        for i in range(20):
            eq = sampler.sample(t, f"exact:{t.name}:{i}")
            root = closed_form_solution(eq)
            left, right = evaluate_sides(eq, root)
            assert left == right


def test_round_trip_sampled(sampler):
    for t in ORDERED_TYPES:
        for i in range(50):
            eq = sampler.sample(t, f"rt:{t.name}:{i}")
            assert parse_equation(str(eq)) == eq


def test_linearity_guard_three_point_collinearity(sampler):
    for t in ORDERED_TYPES:
        eq = sampler.sample(t, f"lin:{t.name}")
        points = []
        for v in (0, 1, 2):
            l, r = evaluate_sides(eq, v)
            points.append(l - r)
        # second difference of a line is zero
        assert points[2] - 2 * points[1] + points[0] == 0
