import random

import pytest

from padicvdp.core import PrecisionExhaustedError, from_integer
from padicvdp.dsl import FuncDef, as_univariate, parse
from padicvdp.vdp_uni import (
    LipschitzBoundError,
    VdpTable1,
    denormalize_alpha,
    e_m,
    initial_parts_below,
    lip_alpha_check_uni,
    normalize_alpha,
    sampled_lip_check_uni,
    vdp_coeff_uni,
    vdp_eval_uni,
    vdp_expand_uni,
)

from support import (
    FERMAT_DIFF_TEXT,
    QUINTIC_TEXT,
    initial_parts_int,
    random_total_expr,
    table_eval_int,
    val_mod,
)


def dsl_uni(text, arity=1):
    return as_univariate(FuncDef(arity=arity, body=parse(text, arity)))


def random_table(rng, p, level, n, satisfying_alpha=None):
    """Random coefficient table; optionally built to satisfy a bound."""
    coeffs = []
    for m in range(p**level):
        value = rng.randrange(p**n)
        if satisfying_alpha is not None:
            from padicvdp.vdp_uni import bound_log

            required = max(0, bound_log(m, p) - satisfying_alpha)
            value = (value * p**required) % p**n
        coeffs.append(from_integer(value, p, n))
    return VdpTable1(prime=p, level=level, coeffs=tuple(coeffs))


class TestIndicator:
    def test_zero_on_zero(self):
        assert e_m(0, from_integer(0, 7, 3)) == 1

    def test_self(self):
        assert e_m(5, from_integer(5, 7, 3)) == 1

    def test_ball_membership(self):
        assert e_m(3, from_integer(3 + 2 * 9, 3, 4)) == 1  # 21 = 3 mod 9
        assert e_m(3, from_integer(4, 3, 4)) == 0

    def test_initial_parts_listing(self):
        # oracle: truncations of 21 = 0 + 1*3 + 2*9 are 0, 3, 21
        assert initial_parts_int(21, 3, 3) == [0, 3, 21]
        assert initial_parts_below(from_integer(21, 3, 4), 3) == [0, 3, 21]

    def test_initial_parts_need_precision(self):
        with pytest.raises(PrecisionExhaustedError):
            initial_parts_below(from_integer(5, 3, 2), 3)


class TestCoefficients:
    def test_identity_below_prime(self):
        f = dsl_uni("x1")
        for m in range(3):
            assert vdp_coeff_uni(f, m, 3, 5).to_integer() == m

    def test_identity_difference(self):
        # m = 10 strips to 1, so the coefficient is 10 - 1 = 9
        f = dsl_uni("x1")
        assert vdp_coeff_uni(f, 10, 3, 5).to_integer() == 9

    def test_constant_has_vanishing_differences(self):
        f = dsl_uni("41")
        for m in range(3, 27):
            assert vdp_coeff_uni(f, m, 3, 5).is_zero()


class TestExpand:
    def test_indicator_function_table(self):
        # callback-backed evaluator: the indicator of the ball around 7
        f = lambda x: from_integer(1 if x.to_integer() % 49 == 7 else 0, 7, x.precision)
        table = vdp_expand_uni(f, 2, 7, 6)
        for m in range(49):
            f_m = 1 if m % 49 == 7 else 0
            if m < 7:
                expected = f_m
            else:
                m_low = m % 7  # strip the top digit of a two-digit index
                expected = f_m - (1 if m_low == 7 else 0)
            assert table.coefficient(m).to_integer() == expected % 7**6

    def test_zero_function(self):
        table = vdp_expand_uni(dsl_uni("0"), 2, 7, 6)
        assert all(c.is_zero() for c in table.coeffs)

    def test_quintic_level_one_values(self):
        # below p the coefficients are plain values: -5 + 4 m^5 mod 7^N
        table = vdp_expand_uni(dsl_uni(QUINTIC_TEXT), 1, 7, 6)
        for m in range(7):
            assert table.coefficient(m).to_integer() == (-5 + 4 * m**5) % 7**6

    def test_needs_precision_at_least_level(self):
        with pytest.raises(PrecisionExhaustedError):
            vdp_expand_uni(dsl_uni("x1"), 3, 7, 2)


class TestEval:
    @pytest.mark.parametrize("p", [2, 3])
    def test_reconstruction_on_random_functions(self, p):
        rng = random.Random(100 + p)
        level, n = 2, 5
        for _ in range(8):
            f = as_univariate(random_total_expr(rng, 1, p))
            table = vdp_expand_uni(f, level, p, n)
            for m in range(p**level):
                got = vdp_eval_uni(table, from_integer(m, p, n))
                want = f(from_integer(m, p, n))
                assert got.digits[: got.precision] == want.digits[: got.precision]

    def test_identity_table_truncates(self):
        table = vdp_expand_uni(dsl_uni("x1"), 2, 3, 6)
        x_int = 3**5 + 2 * 9 + 5
        x = from_integer(x_int, 3, 6)
        assert vdp_eval_uni(table, x).to_integer() == x_int % 3**2

    def test_constant_beyond_first_coefficient(self):
        coeffs = [from_integer(0, 3, 4) for _ in range(9)]
        coeffs[0] = from_integer(5, 3, 4)
        table = VdpTable1(prime=3, level=2, coeffs=tuple(coeffs))
        for x in (0, 3, 9 + 3):
            assert vdp_eval_uni(table, from_integer(x, 3, 4)).to_integer() == (
                5 if x % 3 == 0 else 0
            )

    def test_table_function_round_trips_through_expand(self):
        rng = random.Random(3)
        table = random_table(rng, 3, 2, 5)
        again = vdp_expand_uni(table.function(), 2, 3, 5)
        assert again.coeffs == table.coeffs


class TestLipschitzCheck:
    def test_identity_is_one_lipschitz(self):
        table = vdp_expand_uni(dsl_uni("x1"), 3, 3, 6)
        assert lip_alpha_check_uni(table, 0).holds

    def test_fermat_difference_alpha_one_holds_alpha_zero_fails(self):
        f = dsl_uni(FERMAT_DIFF_TEXT)
        table = vdp_expand_uni(f, 2, 7, 8)
        assert lip_alpha_check_uni(table, 1).holds
        verdict = lip_alpha_check_uni(table, 0)
        assert not verdict.holds
        assert verdict.violation == 7  # (7 - 7^7)/7 - f(0) = 1 - 7^6, a unit

    def test_unit_coefficient_at_prime_violates(self):
        coeffs = [from_integer(0, 3, 4) for _ in range(9)]
        coeffs[3] = from_integer(1, 3, 4)
        table = VdpTable1(prime=3, level=2, coeffs=tuple(coeffs))
        verdict = lip_alpha_check_uni(table, 0)
        assert not verdict.holds and verdict.violation == 3

    @pytest.mark.parametrize("p", [2, 3])
    @pytest.mark.parametrize("alpha", [0, 1, 2])
    def test_matches_pairwise_brute_force(self, p, alpha):
        # the coefficient bound is equivalent to the pairwise inequality
        rng = random.Random(17 * p + alpha)
        level, n = 2, 5
        for case in range(6):
            table = random_table(
                rng, p, level, n, satisfying_alpha=alpha if case % 2 else None
            )
            ints = [c.to_integer() for c in table.coeffs]
            pairwise_ok = True
            for x in range(p**level):
                for y in range(p**level):
                    if x == y:
                        continue
                    required = val_mod(x - y, p, n) - alpha
                    diff = table_eval_int(ints, p, level, x) - table_eval_int(
                        ints, p, level, y
                    )
                    if required > 0 and val_mod(diff, p, n) < required:
                        pairwise_ok = False
            assert lip_alpha_check_uni(table, alpha).holds == pairwise_ok


class TestNormalization:
    def test_below_prime_alpha_zero_is_untouched(self):
        table = vdp_expand_uni(dsl_uni("x1"), 2, 3, 6)
        normalized = normalize_alpha(table, 0)
        for m in range(3):
            assert normalized.normalized[m] == table.coeffs[m]

    def test_identity_coefficient_scales_to_unit(self):
        # B_10 = 9 and floor(log_3 10) = 2, so b_10 = 9 / 3^2 = 1
        table = vdp_expand_uni(dsl_uni("x1"), 3, 3, 6)
        normalized = normalize_alpha(table, 0)
        assert normalized.normalized[10].to_integer() == 1

    def test_zero_shift_branch(self):
        # at m = p with alpha = 1 the shift exponent is zero
        coeffs = [from_integer(0, 3, 5) for _ in range(9)]
        coeffs[3] = from_integer(3 * 2, 3, 5)
        table = VdpTable1(prime=3, level=2, coeffs=tuple(coeffs))
        normalized = normalize_alpha(table, 1)
        assert normalized.normalized[3] == table.coeffs[3]

    def test_round_trip(self):
        table = vdp_expand_uni(dsl_uni(FERMAT_DIFF_TEXT), 2, 7, 8)
        back = denormalize_alpha(normalize_alpha(table, 1))
        assert back.coeffs == table.coeffs

    def test_violating_table_is_rejected(self):
        coeffs = [from_integer(0, 3, 4) for _ in range(9)]
        coeffs[3] = from_integer(1, 3, 4)
        table = VdpTable1(prime=3, level=2, coeffs=tuple(coeffs))
        with pytest.raises(LipschitzBoundError):
            normalize_alpha(table, 0)


class TestSampledCheck:
    def test_constant_never_violates(self):
        report = sampled_lip_check_uni(dsl_uni("9"), 0, 300, 7, 6, seed=1)
        assert report.ok

    def test_quintic_is_one_lipschitz(self):
        report = sampled_lip_check_uni(dsl_uni(QUINTIC_TEXT), 0, 400, 7, 6, seed=1)
        assert report.ok

    def test_fermat_difference_violates_alpha_zero(self):
        report = sampled_lip_check_uni(dsl_uni(FERMAT_DIFF_TEXT), 0, 400, 7, 8, seed=1)
        assert not report.ok
        a, b = report.first_violation
        assert (a - b) % 7 == 0  # witnessed pairs differ inside the same residue

    def test_fermat_difference_passes_alpha_one(self):
        report = sampled_lip_check_uni(dsl_uni(FERMAT_DIFF_TEXT), 1, 400, 7, 8, seed=1)
        assert report.ok


class TestSupNorm:
    def test_matches_grid_sup_exhaustively(self):
        rng = random.Random(23)
        p, level, n = 3, 2, 5
        for _ in range(10):
            table = random_table(rng, p, level, n)
            ints = [c.to_integer() for c in table.coeffs]
            grid_min_ord = min(
                val_mod(table_eval_int(ints, p, level, x), p, n)
                for x in range(p**level)
            )
            table_ord = table.sup_norm_ord()
            assert (n if table_ord is None else table_ord) == grid_min_ord

    def test_zero_table_has_no_sup_norm_exponent(self):
        table = vdp_expand_uni(dsl_uni("0"), 2, 3, 5)
        assert table.sup_norm_ord() is None


class TestTableJson:
    def test_round_trip(self):
        table = vdp_expand_uni(dsl_uni(QUINTIC_TEXT), 2, 7, 6)
        data = table.to_json()
        assert data["p"] == 7 and data["K"] == 2 and data["N"] == 6
        assert VdpTable1.from_json(data) == table

    def test_round_trip_with_normalization(self):
        table = normalize_alpha(vdp_expand_uni(dsl_uni("x1"), 2, 3, 6), 0)
        again = VdpTable1.from_json(table.to_json())
        assert again == table
