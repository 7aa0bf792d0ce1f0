"""Instance generators: recurrences as torus dynamics and p-set varieties.

The p-set variety in G_m^(p-1) is cut out by inverse-Vandermonde linear
rows; those rows characterize points of the form ((t+1)^m, ..., (t+p-1)^m)
with base-p digit sum equal to the coefficient total. Multiplicity patterns
additionally need the evaluated points to come from a polynomial with few
distinct roots, which is expressed through vanishing principal subresultant
coefficients of (u, u') in the elementary-symmetric coordinates; the
coordinates themselves are linear in the torus variables, so the extra
equations stay explicit polynomials. Every construction self-checks against
its parametrization before it is released.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, DomainError
from .exact import FpPoly, PrimeModulus, RatFunc, ratfunc_int_pow
from .lrs import Lrs, mat_pow
from .torus import (
    Equation,
    TorusPoint,
    TorusSelfMap,
    Variety,
    variety_contains,
)

_SELF_CHECK_SAMPLES = 50
_SELF_CHECK_SEED = 0x5E1F


def vandermonde_inverse(p: PrimeModulus) -> tuple[tuple[int, ...], ...]:
    """Inverse of the (p-1)x(p-1) Vandermonde matrix (a^j) over F_p.

    Rows are indexed by k = 0..p-2 and columns by a = 1..p-1, so that
    sum_a A[k][a-1] a^j is 1 exactly when j = k mod (p-1) and 0 otherwise;
    the defining identity is asserted for j up to 2(p-1).
    """
    if p.p < 3:
        raise DomainError("need p >= 3")
    pv = p.p
    n = pv - 1
    # invert V with rows a = 1..p-1 and columns j = 0..p-2 by Gauss-Jordan
    aug = [[pow(a, j, pv) for j in range(n)] + [int(a - 1 == i) for i in range(n)]
           for a in range(1, pv)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] % pv)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], pv - 2, pv)
        aug[col] = [x * inv % pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % pv for x, y in zip(aug[r], aug[col])]
    inv_rows = tuple(tuple(aug[k][n:]) for k in range(n))
    for k in range(n):
        for j in range(2 * n + 1):
            total = sum(inv_rows[k][a - 1] * pow(a, j, pv)
                        for a in range(1, pv)) % pv
            if total != (1 if (j - k) % n == 0 else 0):
                raise ConstructionError("Vandermonde inverse identity failed")
    return inv_rows


# ---------------------------------------------------------------------------
# Symbolic multivariate polynomials over Z (for subresultant equations)
# ---------------------------------------------------------------------------

SymPoly = dict[tuple[int, ...], int]


def _sym_const(c: int, nvars: int) -> SymPoly:
    return {(0,) * nvars: c} if c else {}


def _sym_var(i: int, nvars: int) -> SymPoly:
    ev = [0] * nvars
    ev[i] = 1
    return {tuple(ev): 1}


def _sym_add(a: SymPoly, b: SymPoly) -> SymPoly:
    out = dict(a)
    for ev, c in b.items():
        nc = out.get(ev, 0) + c
        if nc:
            out[ev] = nc
        elif ev in out:
            del out[ev]
    return out


def _sym_mul(a: SymPoly, b: SymPoly) -> SymPoly:
    out: SymPoly = {}
    for ev1, c1 in a.items():
        for ev2, c2 in b.items():
            ev = tuple(x + y for x, y in zip(ev1, ev2))
            nc = out.get(ev, 0) + c1 * c2
            if nc:
                out[ev] = nc
            elif ev in out:
                del out[ev]
    return out


def _sym_det(matrix: list[list[SymPoly]], nvars: int) -> SymPoly:
    """Determinant by expansion along first columns with bitmask memo."""
    n = len(matrix)
    memo: dict[int, SymPoly] = {}

    def rec(rows_mask: int, col: int) -> SymPoly:
        if col == n:
            return _sym_const(1, nvars)
        if rows_mask in memo:
            return memo[rows_mask]
        out: SymPoly = {}
        sign = 1
        for r in range(n):
            if rows_mask >> r & 1:
                entry = matrix[r][col]
                if entry:
                    sub = rec(rows_mask & ~(1 << r), col + 1)
                    term = _sym_mul(entry, sub)
                    if sign < 0:
                        term = {ev: -c for ev, c in term.items()}
                    out = _sym_add(out, term)
                sign = -sign
        memo[rows_mask] = out
        return out

    return rec((1 << n) - 1, 0)


def _subresultant_polys(ell_prime: int, count: int) -> list[SymPoly]:
    """Principal subresultant coefficients sres_j(u, u'), j = 0..count-1,
    as polynomials in e_1..e_ell' for monic u of degree ell'.

    deg gcd(u, u') >= count iff all of them vanish, which over a field with
    all multiplicities below p characterizes at most ell'-count+... fewer
    distinct roots.
    """
    nv = ell_prime
    m, n = ell_prime, ell_prime - 1
    # u coefficients high -> low: 1, e_1, ..., e_ell'
    F = [_sym_const(1, nv)] + [_sym_var(i, nv) for i in range(nv)]
    # u' high -> low: ell'*1, (ell'-1)e_1, ..., 1*e_(ell'-1)
    G = [_sym_const(ell_prime, nv)] + [
        {ev: c * (ell_prime - 1 - i) for ev, c in _sym_var(i, nv).items()}
        for i in range(nv - 1)]
    out = []
    for j in range(count):
        size = m + n - 2 * j
        rows: list[list[SymPoly]] = []
        for i in range(n - j):
            rows.append([F[c - i] if 0 <= c - i <= m else {} for c in range(size)])
        for i in range(m - j):
            rows.append([G[c - i] if 0 <= c - i <= n else {} for c in range(size)])
        out.append(_sym_det(rows, nv))
    return out


def _merge_coarsenings(parts: tuple[int, ...]) -> set[tuple[int, ...]]:
    """All multisets reachable by repeatedly merging two parts."""
    start = tuple(sorted(parts))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for i in range(len(cur)):
            for j in range(i + 1, len(cur)):
                nxt = tuple(sorted(
                    cur[:i] + cur[i + 1:j] + cur[j + 1:] + (cur[i] + cur[j],)))
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


def _partitions_at_most(total: int, max_parts: int,
                        largest: int | None = None) -> list[tuple[int, ...]]:
    if total == 0:
        return [()]
    if max_parts == 0:
        return []
    largest = total if largest is None else largest
    out = []
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions_at_most(total - first, max_parts - 1, first):
            out.append(tuple(sorted(rest + (first,))))
    return sorted(set(out))


@dataclass(frozen=True)
class PsetVariety:
    """The torus variety whose multiple-of-P membership set is a p-set."""

    p: PrimeModulus
    coefficients: tuple[int, ...]
    X: Variety
    P: TorusPoint
    A_inv: tuple[tuple[int, ...], ...]
    ell_prime: int
    # e_k = e_const[k] + sum_a e_lin[k][a] * x_(a+1) for k = 1..ell'
    e_lin: tuple[tuple[int, ...], ...]
    e_const: tuple[int, ...]
    sres: tuple[SymPoly, ...]


def build_pset_variety(p: PrimeModulus, c: list[int]) -> PsetVariety:
    """Variety X in G_m^(p-1) with [m]P in X iff m = sum c_i p^(n_i).

    Linear rows: the inverse-Vandermonde combination at row sum(c) equals 1
    and the rows above it vanish. When some c_i > 1, subresultant equations
    in the recovered elementary-symmetric coordinates force the evaluation
    polynomial to have at most len(c) distinct roots; patterns whose root
    coincidences do not match that locus are rejected. The emitted equation
    set must pass a parametrized-point / non-member self-check.
    """
    pv = p.p
    c = [int(x) for x in c]
    if any(x < 1 for x in c):
        raise DomainError("coefficients must be positive")
    ell = len(c)
    ell_prime = sum(c)
    if ell_prime >= pv - 1:
        raise DomainError("need sum(c) < p - 1")
    a_inv = vandermonde_inverse(p)
    n = pv - 1
    one = RatFunc.one(p)

    def unit_ev(a: int) -> tuple[int, ...]:
        ev = [0] * n
        ev[a - 1] = 1
        return tuple(ev)

    equations: list[Equation] = []
    eq = tuple((unit_ev(a), RatFunc.const(a_inv[ell_prime][a - 1], p))
               for a in range(1, pv) if a_inv[ell_prime][a - 1]) + (
        ((0,) * n, -one),)
    equations.append(eq)
    for k in range(ell_prime + 1, n):
        equations.append(tuple(
            (unit_ev(a), RatFunc.const(a_inv[k][a - 1], p))
            for a in range(1, pv) if a_inv[k][a - 1]))

    sres: tuple[SymPoly, ...] = ()
    e_lin: tuple[tuple[int, ...], ...] = ()
    e_const: tuple[int, ...] = ()
    if ell < ell_prime:
        wanted = set(_partitions_at_most(ell_prime, ell))
        reachable = {pat for pat in _merge_coarsenings(tuple(c))}
        if wanted != reachable:
            raise ConstructionError(
                f"multiplicity pattern {tuple(sorted(c))} does not match the "
                "few-distinct-roots locus; variety not expressible here")
        e_lin, e_const = _symmetric_recovery(p, ell_prime)
        sres = tuple(_subresultant_polys(ell_prime, ell_prime - ell))
        for poly in sres:
            equations.append(_sres_to_equation(poly, e_lin, e_const, p, n))

    P = TorusPoint(tuple(
        RatFunc(FpPoly([a, 1], p)) for a in range(1, pv)))
    pvar = PsetVariety(p, tuple(c), Variety(n, tuple(equations)), P, a_inv,
                       ell_prime, e_lin, e_const, sres)
    _self_check(pvar)
    return pvar


def _symmetric_recovery(p: PrimeModulus, ell_prime: int
                        ) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Solve x_a = a^ell' + sum_k e_k a^(ell'-k) for e_1..e_ell' from the
    first ell' coordinates: e = M^-1 (x - consts)."""
    pv = p.p
    m = [[pow(a, ell_prime - k, pv) for k in range(1, ell_prime + 1)]
         for a in range(1, ell_prime + 1)]
    aug = [row[:] + [int(i == j) for j in range(ell_prime)]
           for i, row in enumerate(m)]
    nn = ell_prime
    for col in range(nn):
        piv = next(r for r in range(col, nn) if aug[r][col] % pv)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], pv - 2, pv)
        aug[col] = [x * inv % pv for x in aug[col]]
        for r in range(nn):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % pv for x, y in zip(aug[r], aug[col])]
    minv = [[aug[i][nn + j] for j in range(nn)] for i in range(nn)]
    # e_k = sum_a minv[k-1][a-1] * (x_a - a^ell')
    e_lin = tuple(tuple(minv[k][a] for a in range(nn)) for k in range(nn))
    e_const = tuple(
        -sum(minv[k][a] * pow(a + 1, ell_prime, pv) for a in range(nn)) % pv
        for k in range(nn))
    return e_lin, e_const


def _sres_to_equation(poly: SymPoly, e_lin, e_const, p: PrimeModulus,
                      n_vars: int) -> Equation:
    """Substitute the affine-linear forms e_k(x) into a symbolic polynomial
    and expand to an explicit torus equation."""
    pv = p.p
    # each e_k as {expvec: coeff} over x variables plus constant
    e_forms: list[dict[tuple[int, ...], int]] = []
    for k in range(len(e_lin)):
        form: dict[tuple[int, ...], int] = {}
        if e_const[k] % pv:
            form[(0,) * n_vars] = e_const[k] % pv
        for a, coeff in enumerate(e_lin[k]):
            if coeff % pv:
                ev = [0] * n_vars
                ev[a] = 1
                form[tuple(ev)] = coeff % pv
        e_forms.append(form)
    acc: dict[tuple[int, ...], int] = {}
    for ev, coeff in poly.items():
        term: dict[tuple[int, ...], int] = {(0,) * n_vars: coeff % pv}
        for k, power in enumerate(ev):
            for _ in range(power):
                term = _xpoly_mul(term, e_forms[k], pv)
        for xev, cc in term.items():
            nc = (acc.get(xev, 0) + cc) % pv
            if nc:
                acc[xev] = nc
            elif xev in acc:
                del acc[xev]
    return tuple((ev, RatFunc.const(cc, p)) for ev, cc in sorted(acc.items()))


def _xpoly_mul(a: dict, b: dict, pv: int) -> dict:
    out: dict[tuple[int, ...], int] = {}
    for ev1, c1 in a.items():
        for ev2, c2 in b.items():
            ev = tuple(x + y for x, y in zip(ev1, ev2))
            nc = (out.get(ev, 0) + c1 * c2) % pv
            if nc:
                out[ev] = nc
            elif ev in out:
                del out[ev]
    return out


def _self_check(pv: PsetVariety):
    """Emitted equations must vanish on parametrized sample points and
    reject perturbed non-members; failure aborts the construction."""
    rng = random.Random(_SELF_CHECK_SEED)
    p = pv.p
    for _ in range(_SELF_CHECK_SAMPLES):
        # degree >= 1 parameters keep every shifted base nonzero
        ys = [_random_poly(rng, p) for _ in range(len(pv.coefficients))]
        coords = []
        for a in range(1, p.p):
            acc = RatFunc.one(p)
            for y, cj in zip(ys, pv.coefficients):
                acc = acc * ratfunc_int_pow(y + RatFunc.const(a, p), cj)
            coords.append(acc)
        point = TorusPoint(tuple(coords))
        if not variety_contains(pv.X, point):
            raise ConstructionError("parametrized point violates equations")
        # scaling a coordinate with nonzero row weight breaks the
        # normalization row, so this is a non-member by construction
        a0 = next(a for a in range(1, p.p)
                  if pv.A_inv[pv.ell_prime][a - 1])
        twist = list(coords)
        twist[a0 - 1] = twist[a0 - 1] * RatFunc(
            FpPoly([rng.randrange(p.p), 1], p))
        if variety_contains(pv.X, TorusPoint(tuple(twist))):
            raise ConstructionError("perturbed non-member satisfied equations")


def _random_poly(rng: random.Random, p: PrimeModulus) -> RatFunc:
    deg = rng.randint(1, 3)
    coeffs = [rng.randrange(p.p) for _ in range(deg)] + [
        rng.randrange(1, p.p)]
    return RatFunc(FpPoly(coeffs, p))


def exponent_set(pv: PsetVariety, bound: int) -> list[int]:
    """{m in [0, bound] : [m]P in X} by exact evaluation.

    Coordinates (t+a)^m are maintained incrementally as dense coefficient
    arrays modulo p; the linear rows are numpy dot products and the rare
    survivors of the linear sieve additionally get the subresultant
    equations evaluated through convolution products.
    """
    if bound < 0:
        raise DomainError("bound must be non-negative")
    from .exact import get_degree_cap
    from .errors import ResourceLimitError

    if bound + 1 > get_degree_cap():
        raise ResourceLimitError(
            f"coordinate degree {bound} exceeds the degree cap")
    p = pv.p.p
    n = p - 1
    ell_prime = pv.ell_prime
    coords = [np.zeros(bound + 1, dtype=np.int64) for _ in range(n + 1)]
    for a in range(1, p):
        coords[a][0] = 1
    length = 1
    hits = []
    zero_rows = list(range(ell_prime + 1, n))
    for m in range(bound + 1):
        ok = True
        one_row = np.zeros(length, dtype=np.int64)
        for a in range(1, p):
            one_row += pv.A_inv[ell_prime][a - 1] * coords[a][:length]
        one_row %= p
        if one_row[0] != 1 or np.any(one_row[1:]):
            ok = False
        if ok:
            for k in zero_rows:
                acc = np.zeros(length, dtype=np.int64)
                for a in range(1, p):
                    acc += pv.A_inv[k][a - 1] * coords[a][:length]
                if np.any(acc % p):
                    ok = False
                    break
        if ok and pv.sres:
            ok = _eval_sres_at(pv, [coords[a][:length] for a in range(1, p)])
        if ok:
            hits.append(m)
        if m < bound:
            for a in range(1, p):
                cur = coords[a][:length]
                nxt = np.zeros(length + 1, dtype=np.int64)
                nxt[1:] = cur
                nxt[:length] += a * cur
                coords[a][:length + 1] = nxt % p
            length += 1
    return hits


def _eval_sres_at(pv: PsetVariety, xs: list[np.ndarray]) -> bool:
    p = pv.p.p
    ell_prime = pv.ell_prime
    es = []
    for k in range(ell_prime):
        acc = np.zeros(len(xs[0]), dtype=np.int64)
        acc[0] = pv.e_const[k]
        for a in range(ell_prime):
            acc += pv.e_lin[k][a] * xs[a]
        es.append(acc % p)
    for poly in pv.sres:
        terms = []
        for ev, coeff in poly.items():
            term = np.array([coeff % p], dtype=np.int64)
            for k, power in enumerate(ev):
                for _ in range(power):
                    term = np.convolve(term, es[k]) % p
            terms.append(term)
        width = max(len(t) for t in terms)
        total = np.zeros(width, dtype=np.int64)
        for t in terms:
            total[:len(t)] += t
        if np.any(total % p):
            return False
    return True


# ---------------------------------------------------------------------------
# Encoding recurrences as torus dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LrsEncoding:
    """Companion realization with pi(Phi^n(Q)) = P^(u_n)."""

    N: int
    phi_matrix: tuple[tuple[int, ...], ...]
    pi_exponents: tuple[int, ...]
    Q: TorusPoint
    base_point: RatFunc
    initial_exponents: tuple[int, ...]


def _companion_of(u: Lrs) -> tuple[tuple[int, ...], ...]:
    d = u.order
    mat = [[0] * d for _ in range(d)]
    for i in range(d - 1):
        mat[i][i + 1] = 1
    for j in range(d):
        mat[d - 1][j] = -u.rec_coeffs[j]
    return tuple(tuple(r) for r in mat)


def encode_lrs(u: Lrs, P: RatFunc, p: PrimeModulus) -> LrsEncoding:
    """Companion matrix acting on exponent windows (u_n, ..., u_(n+d-1));
    first-coordinate projection reads off P^(u_n)."""
    if P.is_zero():
        raise DomainError("base point must be nonzero")
    d = u.order
    q = TorusPoint(tuple(ratfunc_int_pow(P, u.initial[i]) for i in range(d)))
    return LrsEncoding(d, _companion_of(u), (1,) + (0,) * (d - 1), q, P,
                       tuple(u.initial))


def encoding_exponent(enc: LrsEncoding, n: int) -> int:
    """Exponent e with pi(Phi^n(Q)) = P^e, via the matrix action."""
    m = mat_pow([list(r) for r in enc.phi_matrix], n)
    return sum(pe * sum(m[i][j] * enc.initial_exponents[j]
                        for j in range(enc.N))
               for i, pe in enumerate(enc.pi_exponents))


def encoding_projection(enc: LrsEncoding, n: int) -> RatFunc:
    """pi(Phi^n(Q)) as an explicit rational function (degree-capped)."""
    return ratfunc_int_pow(enc.base_point, encoding_exponent(enc, n))


def dml_instance(u: Lrs, p: PrimeModulus, c: list[int]
                 ) -> tuple[TorusSelfMap, TorusPoint, Variety]:
    """Torus instance whose return set is {n : u_n = sum c_i p^(n_i)}.

    One companion block per coordinate of P = (t+1, ..., t+p-1); the p-set
    variety pulls back along the blockwise first-coordinate projections.
    """
    pvar = build_pset_variety(p, c)
    d = u.order
    n_amb = (p.p - 1) * d
    block = _companion_of(u)
    big = [[0] * n_amb for _ in range(n_amb)]
    for b in range(p.p - 1):
        for i in range(d):
            for j in range(d):
                big[b * d + i][b * d + j] = block[i][j]
    coords = []
    for a in range(1, p.p):
        base = RatFunc(FpPoly([a, 1], p))
        for i in range(d):
            coords.append(ratfunc_int_pow(base, u.initial[i]))
    start = TorusPoint(tuple(coords))
    equations = []
    for eq in pvar.X.equations:
        new_terms = []
        for ev, coeff in eq:
            big_ev = [0] * n_amb
            for a_idx, e in enumerate(ev):
                if e:
                    big_ev[a_idx * d] = e
            new_terms.append((tuple(big_ev), coeff))
        equations.append(tuple(new_terms))
    phi = TorusSelfMap.endomorphism(big, p)
    return phi, start, Variety(n_amb, tuple(equations))
