import itertools
import random

import pytest

from pdml.errors import ValidationError
from pdml.exact import PrimeModulus
from pdml.lrs import Lrs, constant, fibonacci, lrs_prefix
from pdml.pexp import (
    FArithSeq,
    PexpInstance,
    farith_solve,
    fit_solution_desc,
    general_farith_intersect,
    pexp_classify,
    pexp_solution_set,
    pexp_solve,
)
from pdml.psets import ArithProg

P2, P3, P5 = PrimeModulus(2), PrimeModulus(3), PrimeModulus(5)

THREE_POW_MINUS_TWO = Lrs((3, -4), (-1, 1))
LINEAR = Lrs((1, -2), (0, 1))  # u_n = n


def oracle_solutions(inst: PexpInstance, n_max: int) -> set[int]:
    """Direct double loop: values by naive recurrence, representability by
    exhaustive exponent tuples under a value bound."""
    values = lrs_prefix(inst.u, n_max)
    p = inst.p.p
    out = set()
    for n, v in enumerate(values):
        if not inst.terms:
            out.add(n)
            continue
        cap = 1
        while p ** cap <= (abs(v) + 1) * 10**4:
            cap += 1
        ranges = [range(cap // k + 1) if k else [0] for _, k in inst.terms]
        for combo in itertools.product(*ranges):
            if v == sum(c * p ** (k * e)
                        for (c, k), e in zip(inst.terms, combo)):
                out.add(n)
                break
    return out


class TestSolve:
    def test_three_pow_minus_two(self):
        inst = PexpInstance(THREE_POW_MINUS_TWO, P5, ((1, 1),))
        sols = pexp_solve(inst, 10**4)
        assert [n for n, _ in sols] == [1, 3]
        assert sols[0][1] == (0,)
        assert sols[1][1] == (2,)

    def test_all_powers_of_two(self):
        inst = PexpInstance(Lrs((-2,), (1,)), P2, ((1, 1),))
        sols = pexp_solve(inst, 50)
        assert [n for n, _ in sols] == list(range(51))
        assert all(w == (n,) for n, w in sols)

    def test_linear_picks_powers(self):
        inst = PexpInstance(LINEAR, P3, ((1, 1),))
        assert sorted(pexp_solution_set(inst, 100)) == [1, 3, 9, 27, 81]

    def test_void_equation(self):
        inst = PexpInstance(fibonacci(), P5, ())
        assert sorted(pexp_solution_set(inst, 30)) == list(range(31))

    def test_oracle_agreement_polynomial_growth(self):
        rnd = random.Random(12)
        for _ in range(120):
            p = rnd.choice([P2, P3, P5])
            kind = rnd.randrange(3)
            if kind == 0:
                u = constant(rnd.randint(-6, 6))
            elif kind == 1:
                u = Lrs((1, -2), (rnd.randint(0, 4), rnd.randint(1, 5)))
            else:
                u = Lrs((-1, 0), (rnd.randint(0, 3), rnd.randint(0, 3)))
            m = rnd.randint(1, 3)
            terms = tuple(
                (rnd.choice([c for c in range(-4, 5) if c]), rnd.randint(0, 2))
                for _ in range(m))
            inst = PexpInstance(u, p, terms)
            assert pexp_solution_set(inst, 200) == oracle_solutions(inst, 200)

    def test_oracle_agreement_geometric(self):
        rnd = random.Random(13)
        for _ in range(80):
            p = rnd.choice([P2, P3, P5])
            u = Lrs((rnd.choice([-3, -2, 2, 3]),),
                    (rnd.choice([-2, -1, 1, 2]),))
            m = rnd.randint(1, 3)
            terms = tuple(
                (rnd.choice([c for c in range(-4, 5) if c]), rnd.randint(0, 2))
                for _ in range(m))
            inst = PexpInstance(u, p, terms)
            assert pexp_solution_set(inst, 24) == oracle_solutions(inst, 24)


class TestClassify:
    def test_three_pow_minus_two(self):
        inst = PexpInstance(THREE_POW_MINUS_TWO, P5, ((1, 1),))
        desc = pexp_classify(inst, 2000)
        assert desc.aps == ()
        assert desc.psets == ()
        assert desc.exceptional == (1, 3)
        assert desc.verified_bound == 2000

    def test_linear_fits_power_pset(self):
        inst = PexpInstance(LINEAR, P3, ((1, 1),))
        desc = pexp_classify(inst, 2000)
        assert len(desc.psets) == 1
        ps = desc.psets[0]
        assert ps.nontrivial_terms() == 1
        assert desc.exceptional == ()
        assert desc.verified_bound == 2000

    def test_void_is_ambient_progression(self):
        desc = pexp_classify(PexpInstance(fibonacci(), P5, ()), 100)
        assert desc.aps == (ArithProg(1, 0),)
        assert desc.psets == () and desc.exceptional == ()

    def test_unsupported_roots_fall_back(self):
        inst = PexpInstance(fibonacci(), P5, ((1, 1), (1, 1)))
        desc = pexp_classify(inst, 60)
        assert desc.verified_bound == 60
        assert any("unsupported" in note for note in desc.notes)
        assert set(desc.exceptional) == pexp_solution_set(inst, 60)

    def test_a_path_no_nontrivial_psets(self):
        # roots {2, 3}: both independent of p = 5
        u = Lrs((6, -5), (2, 5))  # (x-2)(x-3) = x^2 - 5x + 6
        inst = PexpInstance(u, P5, ((1, 1),))
        desc = pexp_classify(inst, 400)
        assert all(ps.nontrivial_terms() == 0 for ps in desc.psets)
        assert any("independent" in note for note in desc.notes)
        assert desc.verified_bound == 400

    def test_b_path_shape_bound(self):
        inst = PexpInstance(LINEAR, P3, ((1, 1), (1, 2)))
        desc = pexp_classify(inst, 1500)
        for ps in desc.psets:
            assert ps.nontrivial_terms() <= 2
        assert desc.verified_bound == 1500

    def test_degenerate_split_classify(self):
        # u_n = (-2)^n + 2^n: even progression solves 2*4^k = 2^(n1), odds 0
        u = Lrs((-4, 0), (2, 0))
        inst = PexpInstance(u, P2, ((2, 1),))
        desc = pexp_classify(inst, 300)
        assert desc.verified_bound == 300
        sols = pexp_solution_set(inst, 300)
        assert desc.members(300) == sols

    def test_every_description_verified(self):
        rnd = random.Random(21)
        for _ in range(25):
            p = rnd.choice([P2, P3, P5])
            u = rnd.choice([
                constant(rnd.randint(-4, 4)),
                Lrs((1, -2), (rnd.randint(0, 3), rnd.randint(1, 3))),
                Lrs((rnd.choice([-3, -2, 2]),), (rnd.choice([-2, 1, 2]),)),
            ])
            terms = tuple(
                (rnd.choice([c for c in range(-3, 4) if c]), rnd.randint(0, 2))
                for _ in range(rnd.randint(0, 2)))
            n_max = 150
            desc = pexp_classify(PexpInstance(u, p, terms), n_max)
            assert desc.verified_bound == n_max


class TestFitSolutionDesc:
    def test_periodic(self):
        sols = {n for n in range(301) if n % 3 == 1}
        desc = fit_solution_desc(sols, P5, 300, allow_psets=True)
        assert desc.aps == (ArithProg(3, 1),)
        assert desc.exceptional == ()

    def test_periodic_with_exception(self):
        sols = {n for n in range(301) if n % 4 == 2} | {1}
        desc = fit_solution_desc(sols, P5, 300, allow_psets=True)
        assert ArithProg(4, 2) in desc.aps
        assert 1 in desc.exceptional

    def test_empty(self):
        desc = fit_solution_desc(set(), P5, 200, allow_psets=True)
        assert desc.is_empty()
        assert desc.verified_bound == 200

    def test_full(self):
        desc = fit_solution_desc(set(range(201)), P5, 200, allow_psets=True)
        assert desc.aps == (ArithProg(1, 0),)

    def test_progression_plus_pset_mix(self):
        n_max = 300
        sols = {n for n in range(n_max + 1) if n % 2 == 0}
        sols |= {1, 3, 9, 27, 81, 243}
        desc = fit_solution_desc(sols, P3, n_max, allow_psets=True)
        assert ArithProg(2, 0) in desc.aps
        assert len(desc.psets) == 1 and desc.psets[0].nontrivial_terms() == 1
        assert desc.verified_bound == n_max


class TestFArith:
    def test_fibonacci_against_powers_of_five(self):
        seq = FArithSeq(P5, ArithProg(1, 0), fibonacci(), (Lrs((-5,), (1,)),))
        res = farith_solve(seq, 30)
        assert res.solutions == (1, 2, 5)
        assert not res.capped

    def test_void_parts(self):
        seq = FArithSeq(P5, ArithProg(2, 1), fibonacci(), ())
        res = farith_solve(seq, 20)
        assert res.solutions == tuple(range(1, 21, 2))

    def test_singleton_progression(self):
        part = Lrs((-5,), (1,))
        hit = farith_solve(FArithSeq(P5, ArithProg(0, 5), fibonacci(), (part,)), 30)
        miss = farith_solve(FArithSeq(P5, ArithProg(0, 7), fibonacci(), (part,)), 30)
        assert hit.solutions == (5,)
        assert miss.solutions == ()

    def test_constant_part_shift(self):
        # F_n = 5^k + 1: F_3 = 2, F_7 = 13 no, ... solutions where F_n - 1 is a power
        seq = FArithSeq(P5, ArithProg(1, 0), fibonacci(),
                        (Lrs((-5,), (1,)), constant(1)))
        res = farith_solve(seq, 20)
        want = tuple(n for n, f in enumerate(lrs_prefix(fibonacci(), 20))
                     if f - 1 in {1, 5, 25, 125, 625, 3125})
        assert res.solutions == want

    def test_part_validation(self):
        with pytest.raises(ValidationError):
            FArithSeq(P5, ArithProg(1, 0), fibonacci(), (Lrs((-3,), (1,)),))
        with pytest.raises(ValidationError):
            FArithSeq(P5, ArithProg(1, 0), fibonacci(), (fibonacci(),))

    def test_two_part_sum(self):
        # u_n = n against 5^a + 5^b
        part = Lrs((-5,), (1,))
        seq = FArithSeq(P5, ArithProg(1, 0), LINEAR, (part, part))
        res = farith_solve(seq, 60)
        assert res.solutions == (2, 6, 10, 26, 30, 50)

    def test_intersection(self):
        a = FArithSeq(P5, ArithProg(2, 0), fibonacci(), ())
        b = FArithSeq(P5, ArithProg(3, 0), fibonacci(), ())
        res = general_farith_intersect([a, b], 30)
        assert res.solutions == (0, 6, 12, 18, 24, 30)

    def test_intersection_single(self):
        seq = FArithSeq(P5, ArithProg(1, 0), fibonacci(), (Lrs((-5,), (1,)),))
        assert general_farith_intersect([seq], 30).solutions == \
            farith_solve(seq, 30).solutions

    def test_intersection_identical_pair(self):
        seq = FArithSeq(P5, ArithProg(1, 0), fibonacci(), (Lrs((-5,), (1,)),))
        assert general_farith_intersect([seq, seq], 30).solutions == \
            farith_solve(seq, 30).solutions

    def test_unconvertible_part_search(self):
        # part with double root p: (x-5)^2: values (a + b k) 5^k, unconvertible
        part = Lrs((25, -10), (1, 10))  # u_k = (1 + k) 5^k
        seq = FArithSeq(P5, ArithProg(1, 0), fibonacci(), (part,))
        res = farith_solve(seq, 25)
        vals = {(1 + k) * 5**k for k in range(40)}
        want = tuple(n for n, f in enumerate(lrs_prefix(fibonacci(), 25))
                     if f in vals)
        assert res.solutions == want

    def test_two_unconvertible_parts_flag_capped(self):
        # cancellation between two searched parts cannot be certified
        # complete within the exponent cap, so the result is flagged
        part = Lrs((25, -10), (1, 10))
        neg = Lrs((25, -10), (-1, -10))
        seq = FArithSeq(P5, ArithProg(1, 0), fibonacci(), (part, neg))
        res = farith_solve(seq, 10)
        assert res.capped
        # within the searched region: F_n = 0 is solvable (v - v), F_0 = 0
        assert 0 in res.solutions
