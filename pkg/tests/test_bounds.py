import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.bounds import (
    BoundReport,
    EmptyList,
    InvalidExponent,
    RhsReport,
    ZeroRHS,
    admissible_n_exponent,
    check_range_conditions,
    extremal_q_exponent,
    implied_constant_estimate,
    parse_exponent,
    rhs_mean_square_bound,
    rhs_trilinear_coprime,
    rhs_trilinear_fixed_factor,
)

F = Fraction

# Golden values frozen from an independent 50-digit mpmath evaluation of the
# displayed formulas (tests/golden oracle; see the module docstring note).
BC_GOLDEN = [
    ((1, 1, 1, 1, (1, 1, 1), 0.0), 3.2240036559153699097),
    ((4, 8, 2, -3, (1.5, 0.5, 2.0), 0.01), 25.655601199120836933),
    ((16, 9, 5, 7, (1, 2, 3), 0.0), 293.82045738553497005),
    ((100, 50, 10, -1, (0.3, 0.7, 1.1), 0.02), 85.743268601660146073),
    ((256, 128, 16, 2, (1, 1, 1), 0.01), 981.41436149399228577),
]
BCR_GOLDEN_STATEMENT = [
    ((1, 1, 1, 1, 1, (1, 1, 1), 0.0), 5.9460355750136053336),
    ((4, 8, 2, 3, -3, (1.5, 0.5, 2.0), 0.01), 75.816560755692846699),
    ((16, 9, 5, 2, 7, (1, 2, 3), 0.0), 700.23931153559041739),
    ((100, 50, 10, 8, -1, (0.3, 0.7, 1.1), 0.02), 266.59236619816477731),
    ((256, 128, 16, 16, 2, (1, 1, 1), 0.01), 3847.376317920252507),
]
BCR_GOLDEN_PROOF = [
    ((1, 1, 1, 1, 1, (1, 1, 1), 0.0), 5.9460355750136053336),
    ((4, 8, 2, 3, -3, (1.5, 0.5, 2.0), 0.01), 73.984485360766501957),
    ((16, 9, 5, 2, 7, (1, 2, 3), 0.0), 647.39005864821459411),
    ((100, 50, 10, 8, -1, (0.3, 0.7, 1.1), 0.02), 242.60884466428241929),
    ((256, 128, 16, 16, 2, (1, 1, 1), 0.01), 3477.6402313218758082),
]
CB_GOLDEN = [
    ((1, 1, 1, 1, 1, (1, 1), 0.0), 8.4852813742385702928),
    ((4, 8, 2, 2, -3, (1.5, 0.5), 0.01), 210.61032274007227289),
    ((16, 9, 5, 4, 7, (1, 2), 0.0), 11623.942058348350875),
    ((100, 50, 10, 9, -1, (0.3, 0.7), 0.02), 8400.8872458365196302),
    ((256, 128, 16, 8, 2, (1, 1), 0.01), 1365923.8580661879114),
]


class TestTrilinearCoprimeBound:
    def test_unit_point_hand_arithmetic(self):
        # oracle: (1+1)^(1/2) * (2^(1/4) + 2^(1/8))
        rep = rhs_trilinear_coprime(1, 1, 1, 1, (1, 1, 1))
        want = math.sqrt(2) * (2 ** 0.25 + 2 ** 0.125)
        assert math.isclose(rep.total, want, rel_tol=1e-14)

    def test_zero_norm(self):
        assert rhs_trilinear_coprime(4, 4, 2, 1, (0.0, 1, 1)).total == 0.0

    def test_monotone_in_A_prefactor(self):
        lo = rhs_trilinear_coprime(2, 2, 1, 1, (1, 1, 1))
        hi = rhs_trilinear_coprime(2, 2, 2, 1, (1, 1, 1))
        assert hi.total > lo.total
        assert hi.meta["prefactor"] ** 2 == pytest.approx(1 + 2 / 4)

    @pytest.mark.parametrize("args,want", BC_GOLDEN)
    def test_golden(self, args, want):
        rep = rhs_trilinear_coprime(*args)
        assert math.isclose(rep.total, want, rel_tol=1e-12)

    def test_total_is_scale_times_term_sum(self):
        rep = rhs_trilinear_coprime(9, 5, 3, -2, (1.1, 0.4, 2.0), 0.01)
        assert math.isclose(rep.total, rep.scale * sum(v for _, v in rep.terms), rel_tol=1e-15)


class TestTrilinearFixedFactorBound:
    def test_unit_point_both_variants(self):
        # oracle: 2^(1/4) * 5 (all sizes 1, the bracket has five unit terms)
        for variant in ("statement", "proof", "theorem_statement", "proof_final"):
            rep = rhs_trilinear_fixed_factor(1, 1, 1, 1, 1, (1, 1, 1), 0.0, variant)
            assert math.isclose(rep.total, 5 * 2 ** 0.25, rel_tol=1e-14)

    def test_zero_norm(self):
        assert rhs_trilinear_fixed_factor(4, 4, 2, 2, 1, (1, 0.0, 1)).total == 0.0

    @pytest.mark.parametrize("args,want", BCR_GOLDEN_STATEMENT)
    def test_golden_statement(self, args, want):
        rep = rhs_trilinear_fixed_factor(*args, exponent_variant="statement")
        assert math.isclose(rep.total, want, rel_tol=1e-12)

    @pytest.mark.parametrize("args,want", BCR_GOLDEN_PROOF)
    def test_golden_proof(self, args, want):
        rep = rhs_trilinear_fixed_factor(*args, exponent_variant="proof")
        assert math.isclose(rep.total, want, rel_tol=1e-12)

    def test_variants_differ_only_in_third_term(self):
        a = rhs_trilinear_fixed_factor(16, 9, 5, 2, 7, (1, 2, 3), 0.0, "statement")
        b = rhs_trilinear_fixed_factor(16, 9, 5, 2, 7, (1, 2, 3), 0.0, "proof")
        for name in ("term1", "term2", "term4", "term5"):
            assert a.term(name) == b.term(name)
        assert math.isclose(a.term("term3") / b.term("term3"), 5 ** (3 / 10 - 1 / 20),
                            rel_tol=1e-12)

    def test_r1_regression_lock(self):
        # R = 1 specializes the bracket to its five-term base form
        rep = rhs_trilinear_fixed_factor(16, 9, 5, 1, 7, (1, 2, 3), 0.0, "statement")
        assert math.isclose(rep.total, 593.40365934526961954, rel_tol=1e-12)

    def test_monotone_nondecreasing_in_R(self):
        for M, N, A in ((4, 8, 2), (16, 16, 4), (100, 50, 10)):
            prev = 0.0
            for R in (1, 2, 3, 4, 6, 8, 12, 16):
                tot = rhs_trilinear_fixed_factor(M, N, A, R, 1, (1, 1, 1)).total
                assert tot >= prev
                prev = tot

    def test_hypothesis_flags(self):
        rep = rhs_trilinear_fixed_factor(100, 5, 2, 1, 1, (1, 1, 1))
        assert "M>N^2" in rep.flags
        rep = rhs_trilinear_fixed_factor(1, 4, 2, 3, 1, (1, 1, 1))
        assert "R>M^A" in rep.flags
        rep = rhs_trilinear_fixed_factor(16, 9, 5, 2, 1, (1, 1, 1))
        assert rep.flags == ()

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            rhs_trilinear_fixed_factor(1, 1, 1, 1, 1, (1, 1, 1), 0.0, "middle")


class TestMeanSquareBound:
    def test_unit_point(self):
        # oracle: sqrt(2) * 6
        rep = rhs_mean_square_bound(1, 1, 1, 1, 1, (1, 1))
        assert math.isclose(rep.total, 6 * math.sqrt(2), rel_tol=1e-14)

    def test_zero_beta_norm(self):
        assert rhs_mean_square_bound(4, 4, 2, 2, 1, (0.0, 1)).total == 0.0

    def test_term1_scaling_in_b(self):
        # term1 = AM (bN)^(1/2): quadrupling b doubles it
        t1 = rhs_mean_square_bound(1, 1, 1, 1, 1, (1, 1)).term("term1")
        t4 = rhs_mean_square_bound(1, 1, 1, 4, 1, (1, 1)).term("term1")
        assert math.isclose(t4, 2 * t1, rel_tol=1e-14)

    @pytest.mark.parametrize("args,want", CB_GOLDEN)
    def test_golden(self, args, want):
        rep = rhs_mean_square_bound(*args)
        assert math.isclose(rep.total, want, rel_tol=1e-12)


class TestImpliedConstant:
    def rep(self, lhs, total, **params):
        return BoundReport(lhs, RhsReport((), 1.0, total), params)

    def test_single(self):
        est = implied_constant_estimate([self.rep(0.3, 1.0)])
        assert est.max_ratio == 0.3 and est.argmax_index == 0

    def test_max(self):
        est = implied_constant_estimate(
            [self.rep(0.1, 1.0), self.rep(0.7, 1.0, M=8), self.rep(0.2, 1.0)]
        )
        assert est.max_ratio == 0.7
        assert est.argmax_index == 1 and est.argmax_params == {"M": 8}

    def test_zero_rhs(self):
        with pytest.raises(ZeroRHS) as exc:
            implied_constant_estimate([self.rep(0.1, 1.0), self.rep(0.1, 0.0)])
        assert exc.value.index == 1

    def test_empty(self):
        with pytest.raises(EmptyList):
            implied_constant_estimate([])


class TestAdmissibleNExponent:
    def test_new_i_at_half(self):
        got = admissible_n_exponent("new", "i", F(1, 2))
        assert got.ceiling == F(17, 28) - F(33, 28) * F(1, 2) == F(1, 56)
        assert got.feasible

    def test_fr_i_at_half(self):
        got = admissible_n_exponent("fr_cor11", "i", F(1, 2))
        assert got.ceiling == F(17, 36) - F(11, 12) * F(1, 2) == F(1, 72)

    def test_extremal_q(self):
        assert extremal_q_exponent("new_cor") == F(17, 33) == F(1, 2) + F(1, 66)
        got = admissible_n_exponent("new", "i", F(17, 33))
        assert got.ceiling == 0 and not got.feasible

    def test_fixed_caps(self):
        for cor, cap in (("new", F(45, 89)), ("fr", F(53, 105))):
            for var, nc in (("ii", F(7, 90)), ("iii", F(101, 630))):
                got = admissible_n_exponent(cor, var, F(1, 2))
                assert got.ceiling == nc and got.q_admissible and got.extremal_q == cap
            beyond = admissible_n_exponent(cor, "ii", cap + F(1, 1000))
            assert not beyond.q_admissible

    def test_invalid_exponent(self):
        with pytest.raises(InvalidExponent):
            admissible_n_exponent("new", "i", F(0))
        with pytest.raises(InvalidExponent):
            admissible_n_exponent("new", "i", F(3, 2))
        with pytest.raises(ValueError):
            admissible_n_exponent("new", "iv", F(1, 2))
        with pytest.raises(ValueError):
            admissible_n_exponent("older", "i", F(1, 2))

    def test_results_are_reduced_rationals(self):
        got = admissible_n_exponent("new", "i", F(100, 200))
        assert got.ceiling == F(1, 56)
        assert math.gcd(got.ceiling.numerator, got.ceiling.denominator) == 1

    def test_handoff_at_q_cap(self):
        # at the (ii)/(iii) Q-cap the variant-(i) ceiling is exactly the
        # hand-off exponent where the wide-modulus ranges take over
        from klab.bounds import HANDOFF_N_EXPONENT

        at_cap = admissible_n_exponent("new", "i", F(45, 89))
        assert at_cap.ceiling == HANDOFF_N_EXPONENT == F(1, 89)

    @given(st.fractions(min_value=F(1, 2), max_value=F(17, 33)))
    @settings(max_examples=200)
    def test_improvement_dominates_baseline(self, q):
        new = admissible_n_exponent("new", "i", q).ceiling
        old = admissible_n_exponent("fr", "i", q).ceiling
        assert new >= old


class TestRangeConditions:
    def test_variant_ii_example(self):
        chk = check_range_conditions(F(1, 90), F(45, 89) - F(1, 100), F(0), F(1, 200), "new")
        assert "ii" in chk.variants

    def test_variant_i_just_beyond_ceiling(self):
        chk = check_range_conditions(F(1, 56) + F(1, 1000), F(1, 2), F(0), F(0), "new")
        assert "i" not in chk.variants
        assert chk.conditions["n_ceiling_i"].slack < 0

    def test_variant_i_beyond_extremal_q(self):
        chk = check_range_conditions(F(1, 10**6), F(1, 2) + F(1, 66) + F(1, 1000), F(0), F(0),
                                     "new")
        assert "i" not in chk.variants

    def test_variant_i_inside(self):
        chk = check_range_conditions(F(1, 60), F(1, 2), F(1, 2), F(1, 10**4), "new")
        assert "i" in chk.variants
        assert chk.m_exp == 1 - F(1, 60)

    def test_variant_iii_needs_tiny_a(self):
        ok = check_range_conditions(F(1, 10), F(44, 89), F(1, 10**7), F(1, 100), "new")
        assert "iii" in ok.variants
        big_a = check_range_conditions(F(1, 10), F(44, 89), F(1, 2), F(1, 100), "new")
        assert "iii" not in big_a.variants

    def test_mqn_conditions_match_solved_ceiling(self):
        # the (i) ceiling is exactly where mqn2 flips at eps = 0
        q = F(1, 2)
        n_at = F(17, 28) - F(33, 28) * q
        below = check_range_conditions(n_at - F(1, 10**6), q, F(0), F(0), "new")
        above = check_range_conditions(n_at + F(1, 10**6), q, F(0), F(0), "new")
        assert below.conditions["mqn2"].satisfied
        assert not above.conditions["mqn2"].satisfied

    def test_complement_range_flags(self):
        chk = check_range_conditions(F(1, 90), F(44, 89), F(0), F(1, 1000), "new")
        assert chk.conditions["complement_range_47"].satisfied
        chk2 = check_range_conditions(F(1, 3), F(2, 5), F(0), F(0), "new")
        # at n = 1/3: 4/7 - 6/7 * 1/3 = 2/7 < 2/5, so the wide range fails
        assert not chk2.conditions["complement_range_47"].satisfied

    def test_exponent_validation(self):
        with pytest.raises(InvalidExponent):
            check_range_conditions(F(0), F(1, 2), F(0), F(0))
        with pytest.raises(InvalidExponent):
            check_range_conditions(F(1, 10), F(1), F(0), F(0))
        with pytest.raises(InvalidExponent):
            check_range_conditions(F(1, 10), F(1, 2), F(2), F(0))


class TestParseExponent:
    def test_fraction(self):
        assert parse_exponent("17/28") == F(17, 28)

    def test_whitespace_and_int(self):
        assert parse_exponent(" 1 ") == F(1)

    def test_bad(self):
        for text in ("x/y", "1/0", "", "3 / 4 / 5"):
            with pytest.raises(InvalidExponent):
                parse_exponent(text)
