import math
import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.arith import euler_phi, moebius
from klab.sequences import (
    CoefficientSequence,
    DivisorBoundViolation,
    DyadicRange,
    EmptySupport,
    NotCoprime,
    build_sequence,
    default_convention,
    make_sequence,
    sequence_from_text,
    sequence_norms,
    sequence_to_text,
    set_default_convention,
    sw_discrepancy,
)


class TestDyadicRange:
    def test_half_open_default(self):
        assert list(DyadicRange(2)) == [3, 4]
        assert default_convention() == "half-open"

    def test_closed(self):
        assert list(DyadicRange(2, "closed")) == [2, 3, 4]

    def test_global_convention_switch(self):
        set_default_convention("closed")
        try:
            assert list(DyadicRange(2)) == [2, 3, 4]
        finally:
            set_default_convention("half-open")

    def test_contains(self):
        r = DyadicRange(8)
        assert 9 in r and 16 in r and 8 not in r and 17 not in r

    def test_invalid(self):
        with pytest.raises(ValueError):
            DyadicRange(0)
        with pytest.raises(ValueError):
            DyadicRange(4, "open")


class TestBuildSequence:
    def test_ones(self):
        s = build_sequence("ones", DyadicRange(2))
        assert s.values == {3: 1 + 0j, 4: 1 + 0j}
        assert math.isclose(s.l2_norm, math.sqrt(2))
        assert s.divisor_bound_k == 1

    def test_moebius_from_trial_factorization(self):
        # oracle: mu from trial factorization over (4, 8]
        s = build_sequence("moebius", DyadicRange(4))
        assert s.values == {n: complex(moebius(n)) for n in (5, 6, 7, 8)}
        assert s.values[8] == 0

    def test_tau_k(self):
        s = build_sequence("tau_k", DyadicRange(2), k=2)
        assert s.values == {3: 2 + 0j, 4: 3 + 0j}
        assert s.divisor_bound_k == 2

    def test_random_unit_single_element(self):
        s = build_sequence("random_unit", DyadicRange(1), seed=7)
        (v,) = s.values.values()
        assert math.isclose(abs(v), 1.0, abs_tol=1e-12)
        assert math.isclose(s.l2_norm, 1.0, abs_tol=1e-12)

    def test_random_unit_reproducible_and_normalized(self):
        s1 = build_sequence("random_unit", DyadicRange(16), seed=99)
        s2 = build_sequence("random_unit", DyadicRange(16), seed=99)
        assert s1.values == s2.values
        assert math.isclose(s1.l2_norm, 1.0, abs_tol=1e-12)

    def test_explicit_from_list(self):
        s = build_sequence("explicit", {1, 3}, values=[1j, 2.0])
        assert s.values == {1: 1j, 3: 2 + 0j}

    def test_empty_support(self):
        with pytest.raises(EmptySupport):
            build_sequence("ones", set())

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            build_sequence("primes", DyadicRange(2))

    def test_divisor_bound_enforced(self):
        with pytest.raises(DivisorBoundViolation):
            make_sequence({5: 2 + 0j}, divisor_bound_k=1)

    def test_value_outside_support_rejected(self):
        with pytest.raises(ValueError):
            make_sequence({9: 1 + 0j}, support=DyadicRange(2))


class TestNorms:
    def test_ones_norms(self):
        n = sequence_norms(build_sequence("ones", DyadicRange(2)))
        assert math.isclose(n.l1, 2.0) and math.isclose(n.l2, math.sqrt(2))

    def test_explicit_single(self):
        n = sequence_norms(make_sequence({1: 3 + 4j}))
        assert math.isclose(n.l1, 5.0) and math.isclose(n.l2, 5.0)
        assert n.l2_ceiling is None

    def test_tau2_l1(self):
        # oracle: divisor counts tau(3) + tau(4) = 2 + 3
        n = sequence_norms(build_sequence("tau_k", DyadicRange(2), k=2))
        assert math.isclose(n.l1, 5.0)

    def test_l2_ceiling_reported_and_respected(self):
        for base, k in ((64, 1), (64, 2), (256, 2), (256, 3)):
            s = build_sequence("tau_k", DyadicRange(base), k=k)
            n = sequence_norms(s)
            assert n.l2_ceiling == math.sqrt(base) * math.log(2 * base) ** (k * k - 1)
            assert n.l2 <= n.l2_ceiling

    @given(st.integers(0, 2**31), st.integers(2, 40))
    @settings(max_examples=150)
    def test_cached_norms_match_recomputation(self, seed, size):
        rng = random.Random(seed)
        vals = {i: complex(rng.uniform(-5, 5), rng.uniform(-5, 5)) for i in range(1, size)}
        s = make_sequence(vals)
        n = sequence_norms(s)
        assert abs(s.l1_norm - n.l1) <= 1e-12 * (1 + n.l1)
        assert abs(s.l2_norm - n.l2) <= 1e-12 * (1 + n.l2)

    def test_cached_norms_1000_random_sequences(self):
        rng = random.Random(8128)
        for _ in range(1000):
            size = rng.randrange(1, 12)
            vals = {i: complex(rng.uniform(-3, 3), rng.uniform(-3, 3)) for i in range(1, size + 1)}
            s = make_sequence(vals)
            n = sequence_norms(s)
            assert abs(s.l1_norm - n.l1) <= 1e-12 * (1 + n.l1)
            assert abs(s.l2_norm - n.l2) <= 1e-12 * (1 + n.l2)


class TestSwDiscrepancy:
    def test_modulus_one_vanishes(self):
        s = build_sequence("ones", DyadicRange(16))
        assert sw_discrepancy(s, 1, 0) == 0.0

    def test_ones_small_example(self):
        # oracle: direct counting on (10, 20], q=3, a=1: AP {13,16,19},
        # coprime-to-3 count 7, phi(3)=2 -> |3 - 3.5| = 0.5
        s = build_sequence("ones", DyadicRange(10))
        assert math.isclose(sw_discrepancy(s, 3, 1), 0.5)

    def test_moebius_exact_enumeration(self):
        # oracle: brute-force sums over (10, 20], q=4, a=1, r=2
        s = build_sequence("moebius", DyadicRange(10))
        ap = sum(moebius(n) for n in range(11, 21) if n % 4 == 1 and gcd(n, 2) == 1)
        cop = sum(moebius(n) for n in range(11, 21) if gcd(n, 8) == 1)
        want = abs(ap - cop / euler_phi(4))
        assert math.isclose(sw_discrepancy(s, 4, 1, r=2), want)

    def test_not_coprime(self):
        s = build_sequence("ones", DyadicRange(4))
        with pytest.raises(NotCoprime):
            sw_discrepancy(s, 4, 2)

    def test_ones_counting_bound(self):
        # counting argument: discrepancy of the constant sequence is <= 2
        # for every modulus up to 100 once the range base is at least 10
        for base in (10, 23, 64):
            s = build_sequence("ones", DyadicRange(base))
            for q in range(1, 101):
                for a in (1, 2, q - 1, q // 2):
                    if a >= 0 and gcd(a, q) == 1:
                        assert sw_discrepancy(s, q, a) <= 2.0, (base, q, a)

    def test_discrepancy_table_records_pairs(self):
        from klab.sequences import sw_discrepancy_table

        s = build_sequence("moebius", DyadicRange(20))
        pairs = [(3, 1), (4, 1), (5, 2)]
        table = sw_discrepancy_table(s, pairs)
        assert [(q, a) for q, a, _ in table] == pairs
        for q, a, val in table:
            assert val == sw_discrepancy(s, q, a)


class TestTextRoundTrip:
    def test_dyadic_header(self):
        s = build_sequence("moebius", DyadicRange(4))
        text = sequence_to_text(s)
        assert text.splitlines()[0] == "# support 4 half-open"
        back = sequence_from_text(text)
        assert back.values == s.values
        assert isinstance(back.support, DyadicRange) and back.support.base == 4

    def test_explicit_header(self):
        s = make_sequence({2: 1 - 2j, 7: 0.5 + 0j})
        back = sequence_from_text(sequence_to_text(s))
        assert back.values == s.values

    def test_malformed(self):
        with pytest.raises(ValueError):
            sequence_from_text("3 1.0 0.0\n")
        with pytest.raises(ValueError):
            sequence_from_text("# support 4 half-open\n3 1.0\n")

    @given(st.integers(0, 2**31))
    @settings(max_examples=50)
    def test_random_round_trip(self, seed):
        rng = random.Random(seed)
        s = build_sequence("random_unit", DyadicRange(rng.randrange(1, 30)), seed=seed)
        back = sequence_from_text(sequence_to_text(s))
        assert back.values == s.values
        assert abs(back.l2_norm - s.l2_norm) < 1e-12
