"""Cross-validation of the factored/structured evaluation fast paths
against plain dense arithmetic on ranges where both are feasible."""

import random
from fractions import Fraction

from pdml.exact import FpPoly, PrimeModulus, RatFunc, ratfunc_int_pow
from pdml.psets import PSet, pset_enumerate, pset_membership
from pdml.torus import (
    Factored,
    TorusPoint,
    TorusSelfMap,
    Variety,
    _structured_zero_test,
    reduction_decompose,
    return_set,
    selfmap_iterate,
    variety_contains,
    verify_reduction,
)

P3, P5, P7 = PrimeModulus(3), PrimeModulus(5), PrimeModulus(7)


class TestStructuredZeroTest:
    def test_against_dense_random(self):
        rnd = random.Random(808)
        for _ in range(400):
            p = rnd.choice([P3, P5, P7])
            pv = p.p
            shifts = rnd.sample(range(1, pv), rnd.randint(1, pv - 1))
            lams = [rnd.randrange(pv) for _ in shifts]
            const = rnd.randrange(pv)
            m = rnd.randint(0, 120)
            total = FpPoly([const], p)
            for s, lam in zip(shifts, lams):
                base = FpPoly([s, 1], p)
                total = total + (base ** m).scale(lam)
            dense_zero = total.is_zero()
            structured = _structured_zero_test(
                list(zip(shifts, lams)), const, m, pv)
            assert structured == dense_zero, (pv, shifts, lams, const, m)

    def test_vandermonde_rows_are_exercised(self):
        # the all-ones variety rows: membership iff digit sum matches
        from pdml.constructions import vandermonde_inverse

        for p in (P3, P5, P7):
            pv = p.p
            a_inv = vandermonde_inverse(p)
            ell = 2 if pv > 3 else 1
            for m in range(0, 200):
                digit_sum = 0
                mm = m
                while mm:
                    digit_sum += mm % pv
                    mm //= pv
                row = list(zip(range(1, pv), a_inv[ell]))
                got = _structured_zero_test(row, pv - 1, m, pv)
                dense = FpPoly([pv - 1], p)
                for s, lam in row:
                    dense = dense + (FpPoly([s, 1], p) ** m).scale(lam)
                assert got == dense.is_zero()

    def test_negative_exponent_pole_argument(self):
        # nonzero coefficient on a pole can never sum to zero
        assert _structured_zero_test([(1, 2)], 0, -5, 5) is False
        assert _structured_zero_test([(1, 0), (2, 0)], 0, -5, 5) is True


class TestFactoredRatioTest:
    def test_two_term_equations_match_dense(self):
        rnd = random.Random(909)
        for _ in range(200):
            p = rnd.choice([P3, P5])
            pv = p.p
            e1, e2 = rnd.randint(0, 12), rnd.randint(0, 12)
            s1, s2 = rnd.randrange(pv), rnd.randrange(pv)
            c1 = rnd.randrange(1, pv)
            c2 = rnd.randrange(1, pv)
            b1 = RatFunc(FpPoly([s1, 1], p))
            b2 = RatFunc(FpPoly([s2, 1], p))
            f1 = Factored.from_ratfunc(b1) ** e1
            f2 = Factored.from_ratfunc(b2) ** e2
            lhs = ratfunc_int_pow(b1, e1) * RatFunc.const(c1, p) + \
                ratfunc_int_pow(b2, e2) * RatFunc.const(c2, p)
            from pdml.torus import _two_term_zero

            got = _two_term_zero(f1 * Factored.from_ratfunc(RatFunc.const(c1, p)),
                                 f2 * Factored.from_ratfunc(RatFunc.const(c2, p)))
            assert got == lhs.is_zero()


class TestRationalCoefficients:
    def test_enumerate_with_denominators(self):
        rnd = random.Random(606)
        for _ in range(40):
            p = rnd.choice([P3, P5])
            m = rnd.randint(1, 2)
            terms = []
            for _ in range(m):
                num = rnd.choice([x for x in range(-5, 6) if x])
                den = rnd.choice([1, 2, 3])
                terms.append((Fraction(num, den), rnd.randint(0, 2)))
            S = PSet(tuple(terms))
            bound = 500
            got = set(pset_enumerate(S, p, bound))
            # brute force on exponent tuples
            want = set()
            caps = [range(14 // max(k, 1) + 1) if k else [0]
                    for _, k in S.terms]
            import itertools

            for combo in itertools.product(*caps):
                v = sum(c * p.p ** (k * n)
                        for (c, k), n in zip(S.terms, combo))
                if v.denominator == 1 and 0 <= v <= bound:
                    want.add(int(v))
            assert got == want
            for v in sorted(want)[:10]:
                assert pset_membership(v, S, p) is not None


class TestDenseFallbacks:
    def test_verify_reduction_unfactorable_coordinates(self):
        # degree-4 root-free coordinate forces the dense path
        p = P5
        quartic = FpPoly([2, 0, 1], p) * FpPoly([3, 0, 1], p)
        alpha = TorusPoint((RatFunc(quartic),))
        phi = TorusSelfMap(((2,),), TorusPoint((RatFunc(FpPoly([0, 1], p)),)))
        rd = reduction_decompose(phi, alpha)
        assert verify_reduction(rd, phi, alpha, 6)

    def test_return_set_translation_path(self):
        # translation present: dense sequential iteration
        p = P5
        t = RatFunc(FpPoly([0, 1], p))
        phi = TorusSelfMap(((1,),), TorusPoint((t,)))
        v = Variety(1, ((((1,), RatFunc.one(p)),
                         ((0,), -ratfunc_int_pow(t, 5))),))
        assert return_set(phi, TorusPoint((RatFunc.one(p),)), v, 9) == [5]

    def test_factored_orbit_vs_dense_orbit(self):
        rnd = random.Random(123)
        p = P5
        t1 = RatFunc(FpPoly([1, 1], p))
        t2 = RatFunc(FpPoly([2, 1], p))
        for _ in range(10):
            mat = tuple(tuple(rnd.randint(-1, 2) for _ in range(2))
                        for _ in range(2))
            phi = TorusSelfMap.endomorphism(mat, p)
            alpha = TorusPoint((t1, t2))
            v = Variety(2, ((((1, 0), RatFunc.one(p)),
                             ((0, 1), -RatFunc.one(p))),))
            fast = return_set(phi, alpha, v, 6)
            dense = [n for n in range(7) if variety_contains(
                v, selfmap_iterate(phi, alpha, n))]
            assert fast == dense
