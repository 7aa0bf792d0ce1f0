import random

import pytest
from hypothesis import given, strategies as st

from pdml.errors import DomainError, ResourceLimitError, UsageError
from pdml.exact import (
    FpElem,
    FpPoly,
    PrimeModulus,
    RatFunc,
    frobenius_power,
    is_prime,
    ratfunc_int_pow,
    ratfunc_normalize,
)
from pdml.exact import _binary_pow

P5 = PrimeModulus(5)
P3 = PrimeModulus(3)
P2 = PrimeModulus(2)


def poly(coeffs, p=P5):
    return FpPoly(coeffs, p)


def rf(num, den=None, p=P5):
    return RatFunc(poly(num, p), poly(den, p) if den is not None else None)


class TestPrimeModulus:
    def test_accepts_primes(self):
        for p in (2, 3, 5, 7, 11, 97, 2**31 - 1):
            PrimeModulus(p)

    def test_rejects_composites(self):
        for n in (0, 1, 4, 6, 9, 91, 561):
            with pytest.raises(DomainError):
                PrimeModulus(n)

    def test_is_prime_small(self):
        primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}
        for n in range(2, 42):
            assert is_prime(n) == (n in primes)


class TestFieldOps:
    def test_inv_mod5(self):
        assert FpElem(2, P5).inv() == FpElem(3, P5)

    def test_fermat_pow(self):
        assert FpElem(3, PrimeModulus(7)) ** 6 == FpElem(1, PrimeModulus(7))

    def test_add_wraps(self):
        assert FpElem(4, P5) + FpElem(4, P5) == FpElem(3, P5)

    def test_invert_zero(self):
        with pytest.raises(DomainError):
            FpElem(0, P5).inv()

    def test_modulus_mismatch(self):
        with pytest.raises(UsageError):
            FpElem(1, P5) + FpElem(1, P3)

    @given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))
    def test_field_axioms(self, a, b, c):
        x, y, z = (FpElem(v, P5) for v in (a, b, c))
        assert (x + y) + z == x + (y + z)
        assert x * (y + z) == x * y + x * z
        assert x + (-x) == FpElem(0, P5)
        if a % 5:
            assert x * x.inv() == FpElem(1, P5)


class TestPolyOps:
    def test_gcd_common_root(self):
        g = poly([4, 0, 1]).gcd(poly([4, 1]))  # t^2-1, t-1 over F_5
        assert g == poly([4, 1])
        assert g.is_monic()

    def test_mul_mod3(self):
        # (t+1)(t+2) = t^2 + 2 over F_3
        assert poly([1, 1], P3) * poly([2, 1], P3) == poly([2, 0, 1], P3)

    def test_divmod_f2(self):
        q, r = poly([0, 0, 0, 1], P2).divmod(poly([1, 1], P2))
        assert q == poly([1, 1, 1], P2)
        assert r == poly([1], P2)

    def test_divmod_identity(self):
        rnd = random.Random(11)
        for _ in range(50):
            f = poly([rnd.randrange(5) for _ in range(rnd.randint(0, 8))])
            g = poly([rnd.randrange(5) for _ in range(rnd.randint(1, 5))])
            if g.is_zero():
                continue
            q, r = f.divmod(g)
            assert q * g + r == f
            assert r.degree < g.degree

    def test_divide_by_zero(self):
        with pytest.raises(DomainError):
            poly([1]).divmod(poly([]))

    def test_degree_cap(self):
        with pytest.raises(ResourceLimitError):
            poly([1, 1]).frobenius(20)


class TestNormalize:
    def test_common_factor(self):
        # (2t+2)/(t+1) -> 2/1
        x = ratfunc_normalize(poly([2, 2]), poly([1, 1]))
        assert x == rf([2])

    def test_cancel_and_monicize(self):
        # (t^2-1)/(2t-2) -> (3t+3)/1
        x = ratfunc_normalize(poly([4, 0, 1]), poly([3, 2]))
        assert x == rf([3, 3])

    def test_constant_ratio(self):
        # t/(2t) -> 2/1 over F_3
        x = ratfunc_normalize(poly([0, 1], P3), poly([0, 2], P3))
        assert x == rf([2], p=P3)

    def test_zero_denominator(self):
        with pytest.raises(DomainError):
            ratfunc_normalize(poly([1]), poly([]))

    def test_round_trip_common_factors(self):
        rnd = random.Random(5)
        for _ in range(100):
            num = poly([rnd.randrange(5) for _ in range(rnd.randint(1, 5))])
            den = poly([rnd.randrange(5) for _ in range(rnd.randint(1, 4))] + [1])
            h = poly([rnd.randrange(5) for _ in range(rnd.randint(0, 3))] + [
                rnd.randrange(1, 5)])
            if num.is_zero() or den.is_zero():
                continue
            assert ratfunc_normalize(num * h, den * h) == \
                ratfunc_normalize(num, den)


class TestFrobenius:
    def test_t_plus_one_squared_step(self):
        # (t+1)^(5^2) = t^25 + 1
        x = frobenius_power(rf([1, 1]), 2)
        expected = [1] + [0] * 24 + [1]
        assert list(x.num.coeffs) == expected
        assert x.den.is_one()

    def test_identity_step(self):
        x = rf([2, 0, 1], [1, 1])
        assert frobenius_power(x, 0) == x

    def test_cube_over_f3(self):
        # (2t+1)^3 = 2t^3 + 1 over F_3
        assert frobenius_power(rf([1, 2], p=P3), 1) == rf([1, 0, 0, 2], p=P3)

    def test_matches_binary_powering(self):
        rnd = random.Random(17)
        for _ in range(100):
            p = random.Random(rnd.random()).choice([P2, P3, P5])
            num = [rnd.randrange(p.p) for _ in range(rnd.randint(1, 3))]
            den = [rnd.randrange(p.p) for _ in range(rnd.randint(0, 2))] + [1]
            x = RatFunc(FpPoly(num, p), FpPoly(den, p))
            if x.is_zero():
                continue
            k = rnd.randint(0, 4)
            if p.p ** k * 4 > 3000:
                k = 2
            assert frobenius_power(x, k) == _binary_pow(x, p.p ** k)


class TestIntPow:
    def test_pow26_matches_binary(self):
        x = rf([1, 1])
        via_digits = ratfunc_int_pow(x, 26)
        assert via_digits == _binary_pow(x, 26)
        assert via_digits == x * frobenius_power(x, 2)

    def test_pow_zero(self):
        assert ratfunc_int_pow(rf([3, 2, 1]), 0) == RatFunc.one(P5)

    def test_negative_is_inverse(self):
        x = rf([1, 1])
        assert ratfunc_int_pow(x, -1) == x.inv()
        assert ratfunc_int_pow(x, -3) == _binary_pow(x.inv(), 3)

    def test_zero_to_negative(self):
        with pytest.raises(DomainError):
            ratfunc_int_pow(RatFunc.zero(P5), -1)

    @given(st.integers(0, 2), st.integers(1, 4), st.integers(0, 60))
    def test_agrees_with_binary(self, c0, c1, m):
        x = rf([c0, c1])
        assert ratfunc_int_pow(x, m) == _binary_pow(x, m)


class TestRatFuncField:
    def test_axioms_random(self):
        rnd = random.Random(23)

        def rand_rf():
            num = [rnd.randrange(5) for _ in range(rnd.randint(1, 3))]
            den = [rnd.randrange(5) for _ in range(rnd.randint(0, 2))] + [1]
            return RatFunc(FpPoly(num, P5), FpPoly(den, P5))

        for _ in range(60):
            x, y, z = rand_rf(), rand_rf(), rand_rf()
            assert (x + y) + z == x + (y + z)
            assert x * (y + z) == x * y + x * z
            assert x + (-x) == RatFunc.zero(P5)
            if not x.is_zero():
                assert x * x.inv() == RatFunc.one(P5)

    def test_structural_equality(self):
        a = rf([1, 2], [3, 1])
        b = rf([2, 4], [6, 2])
        assert a == b
        assert hash(a) == hash(b)
