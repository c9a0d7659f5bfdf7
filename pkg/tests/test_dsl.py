import random
from itertools import product

import pytest

from padicvdp.core import (
    InexactDivisionError,
    PadicPoint,
    from_integer,
)
from padicvdp.dsl import (
    Add,
    DigitSum,
    DivP,
    IntConst,
    Mul,
    ParseError,
    Pow,
    RatConst,
    Sub,
    Var,
    divp_budget,
    evaluate,
    funcdef_from_json,
    parse,
    parse_funcdef,
    well_defined_check,
)

from support import QUINTIC_TEXT, eval_int_model, quintic_int, random_total_expr


def ev1(text, x_int, p, n):
    expr = parse(text, 1)
    return evaluate(expr, PadicPoint((from_integer(x_int, p, n),)))


class TestParser:
    def test_sum_of_variables(self):
        assert parse("x1 + x2", 2) == Add(Var(1), Var(2))

    def test_divp_form(self):
        assert parse("divp(x1 - x1^7, 1)", 1) == DivP(Sub(Var(1), Pow(Var(1), 7)), 1)

    def test_digitsum_form(self):
        got = parse(QUINTIC_TEXT, 1)
        assert got == Add(IntConst(-5), DigitSum(1, (4, 0, 0, 7), 5))

    def test_rational_constant(self):
        assert parse("1/2", 1) == RatConst(1, 2)
        assert parse("-1/2 * x1", 1) == Mul(RatConst(-1, 2), Var(1))

    def test_precedence(self):
        assert parse("x1 + x1 * x1^2", 1) == Add(Var(1), Mul(Var(1), Pow(Var(1), 2)))

    def test_unary_minus(self):
        assert parse("-x1", 1) == Sub(IntConst(0), Var(1))
        assert parse("-5", 1) == IntConst(-5)

    def test_parentheses(self):
        assert parse("(x1 + 1) * x1", 1) == Mul(Add(Var(1), IntConst(1)), Var(1))

    def test_variable_out_of_range(self):
        with pytest.raises(ParseError, match="out of range"):
            parse("x3", 2)

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse("y + 1", 1)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as info:
            parse("x1 + \n + 2", 1)
        assert info.value.line == 2

    def test_division_is_not_an_operator(self):
        with pytest.raises(ParseError):
            parse("x1 / 2", 1)

    def test_divp_exponent_must_be_positive(self):
        with pytest.raises(ParseError):
            parse("divp(x1, 0)", 1)

    def test_digitsum_needs_variable(self):
        with pytest.raises(ParseError):
            parse("digitsum(3, i, 1)", 1)

    def test_digitsum_rejects_rational_coefficients(self):
        with pytest.raises(ParseError, match="integer coefficients"):
            parse("digitsum(x1, 1/2 + i, 1)", 1)

    def test_ipoly_arithmetic(self):
        got = parse("digitsum(x1, (1 + i)^2 - i*i, 3)", 1)
        assert got == DigitSum(1, (1, 2), 3)

    def test_trailing_garbage(self):
        with pytest.raises(ParseError, match="trailing"):
            parse("x1 x1", 1)


class TestFuncDef:
    def test_json_round_trip(self):
        text = '{"arity":1,"alpha":[0],"body":"-5 + digitsum(x1, 4+7*i^3, 5)"}'
        defn = funcdef_from_json(text)
        assert defn.arity == 1
        assert defn.alpha == (0,)
        assert defn.to_json()["body"] == "-5 + digitsum(x1, 4+7*i^3, 5)"

    def test_alpha_length_checked(self):
        with pytest.raises(ValueError):
            parse_funcdef({"arity": 2, "alpha": [0], "body": "x1 + x2"})

    def test_alpha_sign_checked(self):
        with pytest.raises(ValueError):
            parse_funcdef({"arity": 1, "alpha": [-1], "body": "x1"})


class TestEvaluate:
    def test_identity(self):
        x = from_integer(11, 7, 5)
        assert evaluate(parse("x1", 1), PadicPoint((x,))) == x

    def test_divp_value(self):
        # (2 - 2^7) / 7 = -18, reduced mod 7^(N-1)
        got = ev1("divp(x1 - x1^7, 1)", 2, 7, 6)
        assert got.precision == 5
        assert got.to_integer() == (-18) % 7**5

    def test_quintic_vanishes_at_its_residue_root(self):
        got = ev1(QUINTIC_TEXT, 5, 7, 8)
        assert quintic_int(5, 1) == 0  # oracle: 4 * 5^5 - 5 is 0 mod 7
        assert got.digits[0] == 0

    def test_quintic_matches_integer_oracle(self):
        for x in (0, 5, 12, 300, 7**5 + 3):
            got = ev1(QUINTIC_TEXT, x, 7, 8)
            assert got.to_integer() == quintic_int(x, 8)

    def test_rational_constant_embedding(self):
        got = ev1("1/2 + 1/2", 0, 3, 4)
        assert got.to_integer() == 1

    def test_pow_zero_is_one(self):
        assert ev1("x1^0", 5, 3, 4).to_integer() == 1

    def test_inexact_division_raises(self):
        with pytest.raises(InexactDivisionError):
            ev1("divp(x1, 1)", 1, 7, 4)

    def test_precision_loss_is_worst_case_per_branch(self):
        got = ev1("x1 + divp(x1 - x1^7, 1)", 2, 7, 6)
        assert got.precision == 5

    def test_arity_mismatch(self):
        expr = parse("x1 + x2", 2)
        with pytest.raises(ValueError):
            evaluate(expr, PadicPoint((from_integer(1, 3, 4),)))

    def test_polynomials_match_big_integer_model_exhaustively(self):
        p, n = 3, 3
        exprs = [
            parse("x1^2 + 2*x2 - 1", 2),
            parse("(x1 + x2)^3 - x1*x2", 2),
            parse("7 - x1*x1*x2", 2),
        ]
        for expr in exprs:
            for a, b in product(range(p**n), repeat=2):
                pt = PadicPoint.from_integers((a, b), p, n)
                assert evaluate(expr, pt).to_integer() == eval_int_model(
                    expr, (a, b), p, n
                )

    def test_digitsum_identity_map(self):
        # coefficient polynomial 1 with exponent 1 reassembles the digits
        p, n = 3, 4
        expr = parse("digitsum(x1, 1, 1)", 1)
        for x in range(p**n):
            pt = PadicPoint((from_integer(x, p, n),))
            assert evaluate(expr, pt).to_integer() == x

    def test_deterministic(self):
        rng = random.Random(7)
        expr = random_total_expr(rng, 2, 5)
        pt = PadicPoint.from_integers((123, 456), 5, 6)
        assert evaluate(expr, pt) == evaluate(expr, pt)


class TestDivpBudget:
    def test_no_divp(self):
        assert divp_budget(parse("x1^3 + 2", 1)) == 0

    def test_single(self):
        assert divp_budget(parse("divp(x1 - x1^7, 1)", 1)) == 1

    def test_nested_accumulates(self):
        assert divp_budget(parse("divp(divp(x1, 2) - x1, 3)", 1)) == 5

    def test_branches_take_max(self):
        assert divp_budget(parse("divp(x1, 2) + divp(x1, 3)", 1)) == 3


class TestWellDefined:
    def test_fermat_difference_is_total(self):
        report = well_defined_check(parse("divp(x1 - x1^7, 1)", 1), 1, 7, 8, 500)
        assert report.failures == 0
        assert report.ok

    def test_bare_divp_fails(self):
        report = well_defined_check(parse("divp(x1, 1)", 1), 1, 7, 8, 500)
        assert report.failures > 0
        assert report.first_failure is not None

    def test_polynomial_never_fails(self):
        report = well_defined_check(parse("x1^2", 1), 1, 7, 8, 200)
        assert report.failures == 0

    def test_report_is_seeded(self):
        expr = parse("divp(x1, 1)", 1)
        a = well_defined_check(expr, 1, 7, 8, 300, seed=5)
        b = well_defined_check(expr, 1, 7, 8, 300, seed=5)
        assert a == b
