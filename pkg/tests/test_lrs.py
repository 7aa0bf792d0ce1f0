import random

import pytest

from pdml.errors import UnsupportedError
from pdml.exact import PrimeModulus
from pdml.lrs import (
    CharRoots,
    Lrs,
    char_poly_of_matrix,
    companion_matrix,
    constant,
    cyclotomic_poly,
    fibonacci,
    lrs_char_roots,
    lrs_eval,
    lrs_nondegenerate_split,
    lrs_prefix,
    lrs_root_p_dependence,
    lrs_subsequence,
    lrs_zero_progression_certify,
    mat_pow,
)

P5 = PrimeModulus(5)

THREE_POW_MINUS_TWO = Lrs((3, -4), (-1, 1))  # roots 3 and 1


def random_lrs(rnd, max_order=4, coeff_bound=3, init_bound=5):
    d = rnd.randint(1, max_order)
    return Lrs(tuple(rnd.randint(-coeff_bound, coeff_bound) for _ in range(d)),
               tuple(rnd.randint(-init_bound, init_bound) for _ in range(d)))


class TestEval:
    def test_fibonacci(self):
        assert lrs_eval(fibonacci(), 10) == 55

    def test_constant(self):
        s = constant(7)
        assert all(lrs_eval(s, n) == 7 for n in range(20))

    def test_three_pow_minus_two(self):
        assert lrs_eval(THREE_POW_MINUS_TWO, 3) == 25
        assert [lrs_eval(THREE_POW_MINUS_TWO, n) for n in range(5)] == \
            [-1, 1, 7, 25, 79]

    def test_matrix_path_matches_iteration(self):
        # force the companion-matrix path via a large index
        s = fibonacci()
        window = list(s.initial)
        for _ in range(2000 - 1):
            window.append(window[-1] + window[-2])
        assert lrs_eval(s, 2000) == window[2000]

    def test_prefix(self):
        assert lrs_prefix(fibonacci(), 7) == [0, 1, 1, 2, 3, 5, 8, 13]


class TestSubsequence:
    def test_fibonacci_even(self):
        sub = lrs_subsequence(fibonacci(), 2, 0)
        assert sub.char_poly() == (1, -3, 1)  # x^2 - 3x + 1
        assert sub.initial == (0, 1)
        assert lrs_eval(sub, 3) == 8  # F_6

    def test_identity(self):
        s = fibonacci()
        assert lrs_subsequence(s, 1, 0) == s

    def test_powers_of_two(self):
        s = Lrs((-2,), (1,))
        sub = lrs_subsequence(s, 3, 1)
        assert sub.char_poly() == (-8, 1)
        assert sub.initial == (2,)
        for k in range(6):
            assert lrs_eval(sub, k) == lrs_eval(s, 3 * k + 1)

    def test_consistency_randomized(self):
        rnd = random.Random(101)
        for _ in range(60):
            s = random_lrs(rnd)
            a = rnd.randint(1, 5)
            b = rnd.randint(0, 5)
            sub = lrs_subsequence(s, a, b)
            direct = lrs_prefix(s, a * 50 + b)
            for k in range(51):
                assert lrs_eval(sub, k) == direct[a * k + b]


class TestZeroCertify:
    def test_alternating(self):
        s = Lrs((-1, 0), (0, 2))  # u_n = 1 - (-1)^n
        assert lrs_zero_progression_certify(s, 2, 0) is True
        assert lrs_zero_progression_certify(s, 2, 1) is False

    def test_zero_sequence(self):
        z = Lrs((1, 1), (0, 0))
        for a, b in ((1, 0), (3, 2), (5, 1)):
            assert lrs_zero_progression_certify(z, a, b) is True

    def test_soundness_randomized(self):
        rnd = random.Random(31)
        for _ in range(40):
            s = random_lrs(rnd, max_order=3)
            a = rnd.randint(1, 4)
            b = rnd.randint(0, 4)
            verdict = lrs_zero_progression_certify(s, a, b)
            vals = lrs_prefix(s, a * 200 + b)
            if verdict:
                assert all(vals[a * k + b] == 0 for k in range(201))
            else:
                d = lrs_subsequence(s, a, b).order
                assert any(vals[a * k + b] != 0 for k in range(d))


class TestCharRoots:
    def test_two_integer_roots(self):
        roots = lrs_char_roots(THREE_POW_MINUS_TWO)
        assert roots.integer_roots == ((1, 1), (3, 1))
        assert roots.unresolved_factor == (1,)

    def test_fibonacci_unresolved(self):
        roots = lrs_char_roots(fibonacci())
        assert roots.integer_roots == ()
        assert roots.unresolved_factor == (-1, -1, 1)

    def test_double_root(self):
        roots = lrs_char_roots(Lrs((4, -4), (0, 0)))
        assert roots.integer_roots == ((2, 2),)

    def test_zero_root(self):
        roots = lrs_char_roots(Lrs((0, -3), (1, 1)))  # x^2 - 3x
        assert roots.integer_roots == ((0, 1), (3, 1))

    def test_reconstruction_invariant(self):
        rnd = random.Random(77)
        for _ in range(80):
            s = random_lrs(rnd)
            roots = lrs_char_roots(s)
            rebuilt = list(roots.unresolved_factor)
            for r, mult in roots.integer_roots:
                for _ in range(mult):
                    rebuilt = _mul_z(rebuilt, [-r, 1])
            assert tuple(rebuilt) == s.char_poly()


def _mul_z(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class TestNondegenerateSplit:
    def test_plus_minus_two(self):
        s = Lrs((-4, 0), (2, 0))  # (-2)^n + 2^n
        pieces = lrs_nondegenerate_split(s)
        assert [(a, b) for a, b, _ in pieces] == [(2, 0), (2, 1)]
        even = pieces[0][2]
        assert lrs_char_roots(even).root_set() == {4}
        assert lrs_prefix(even, 3) == [2, 8, 32, 128]
        odd = pieces[1][2]
        assert all(v == 0 for v in lrs_prefix(odd, 10))

    def test_already_nondegenerate(self):
        pieces = lrs_nondegenerate_split(THREE_POW_MINUS_TWO)
        assert [(a, b) for a, b, _ in pieces] == [(1, 0)]

    def test_constant(self):
        pieces = lrs_nondegenerate_split(constant(3))
        assert [(a, b) for a, b, _ in pieces] == [(1, 0)]
        assert lrs_char_roots(pieces[0][2]).root_set() == {1}

    def test_cyclotomic_order_four(self):
        # roots i, -i: x^2 + 1
        s = Lrs((1, 0), (1, 0))
        pieces = lrs_nondegenerate_split(s)
        assert pieces[0][0] == 4

    def test_unsupported_irrational(self):
        with pytest.raises(UnsupportedError):
            lrs_nondegenerate_split(fibonacci())

    def test_split_correctness_randomized(self):
        rnd = random.Random(13)
        done = 0
        while done < 30:
            s = random_lrs(rnd, max_order=3, coeff_bound=2)
            try:
                pieces = lrs_nondegenerate_split(s)
            except UnsupportedError:
                continue
            done += 1
            vals = lrs_prefix(s, 500)
            for mod, off, piece in pieces:
                for k in range((500 - off) // mod + 1):
                    assert lrs_eval(piece, k) == vals[mod * k + off]
                roots = lrs_char_roots(piece).root_set()
                assert -1 not in roots
                assert not any(r > 0 and -r in roots for r in roots)

    def test_cyclotomic_polys(self):
        assert cyclotomic_poly(1) == (-1, 1)
        assert cyclotomic_poly(2) == (1, 1)
        assert cyclotomic_poly(4) == (1, 0, 1)
        assert cyclotomic_poly(6) == (1, -1, 1)


class TestRootPDependence:
    def test_independent(self):
        report = lrs_root_p_dependence(lrs_char_roots(Lrs((-3,), (1,))), P5)
        assert not report.verdicts[0].dependent

    def test_power(self):
        report = lrs_root_p_dependence(lrs_char_roots(Lrs((-25,), (1,))), P5)
        v = report.verdicts[0]
        assert v.dependent and v.s == 2 and v.sign == 1

    def test_negative_power(self):
        report = lrs_root_p_dependence(lrs_char_roots(Lrs((5,), (1,))), P5)
        v = report.verdicts[0]
        assert v.dependent and v.s == 1 and v.sign == -1

    def test_unit_roots_depend(self):
        report = lrs_root_p_dependence(lrs_char_roots(Lrs((-1,), (1,))), P5)
        assert report.verdicts[0].dependent and report.verdicts[0].s == 0

    def test_unresolved_unknown(self):
        report = lrs_root_p_dependence(lrs_char_roots(fibonacci()), P5)
        assert report.unresolved_unknown
        assert not report.all_independent()


class TestMatrixHelpers:
    def test_char_poly_companion_round_trip(self):
        rnd = random.Random(3)
        for _ in range(40):
            s = random_lrs(rnd)
            assert char_poly_of_matrix(companion_matrix(s)) == s.char_poly()

    def test_mat_pow(self):
        m = mat_pow([[1, 1], [0, 1]], 13)
        assert m == [[1, 13], [0, 1]]
