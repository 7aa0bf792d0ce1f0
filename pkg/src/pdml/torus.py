"""Dynamics of affine self-maps x -> y * [A]x on split tori over F_p(t).

Orbits of pure endomorphisms are carried in factored form (a unit times a
product of monic irreducibles with big-integer exponents) so that points
like (t+1)^(10^8) stay cheap; variety membership on such points is decided
either by expanding small terms or by an exact digit-structured evaluation
of linear equations in Frobenius powers. Everything user-facing remains
plain RatFunc coordinates, with resource errors where dense degrees would
explode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ResourceLimitError, UsageError
from .exact import FpPoly, PrimeModulus, RatFunc, ratfunc_int_pow
from .lrs import Lrs, lrs_prefix, mat_mul, mat_pow
from .psets import ReturnSetDesc

# Expanding a factored value beyond this many coefficients is refused.
_EXPAND_CAP = 200_000

Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(rows) -> Matrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    if not m or any(len(row) != len(m) for row in m):
        raise DomainError("matrix must be square and nonempty")
    return m


@dataclass(frozen=True)
class TorusPoint:
    """Point of G_m^N: every coordinate a nonzero element of F_p(t)."""

    coords: tuple[RatFunc, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise DomainError("need at least one coordinate")
        if any(c.is_zero() for c in self.coords):
            raise DomainError("torus points have nonzero coordinates")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def modulus(self) -> PrimeModulus:
        return self.coords[0].modulus

    @staticmethod
    def identity(n: int, p: PrimeModulus) -> "TorusPoint":
        return TorusPoint(tuple(RatFunc.one(p) for _ in range(n)))

    def is_identity(self) -> bool:
        return all(c.is_one() for c in self.coords)

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        if self.dim != other.dim:
            raise UsageError("dimension mismatch")
        return TorusPoint(tuple(a * b for a, b in
                                zip(self.coords, other.coords)))


@dataclass(frozen=True)
class TorusSelfMap:
    """x -> translation * [matrix]x with the matrix acting multiplicatively."""

    matrix: Matrix
    translation: TorusPoint

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))
        if len(self.matrix) != self.translation.dim:
            raise DomainError("matrix size and translation dimension differ")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def is_endomorphism(self) -> bool:
        return self.translation.is_identity()

    @staticmethod
    def endomorphism(matrix, p: PrimeModulus) -> "TorusSelfMap":
        m = _as_matrix(matrix)
        return TorusSelfMap(m, TorusPoint.identity(len(m), p))


Equation = tuple[tuple[tuple[int, ...], RatFunc], ...]


@dataclass(frozen=True)
class Variety:
    """Zero set of Laurent polynomials; an empty list is the whole torus."""

    n_vars: int
    equations: tuple[Equation, ...]

    def __post_init__(self):
        eqs = []
        for eq in self.equations:
            terms = tuple((tuple(int(e) for e in ev), c) for ev, c in eq)
            for ev, _ in terms:
                if len(ev) != self.n_vars:
                    raise DomainError("exponent vector has wrong length")
            eqs.append(terms)
        object.__setattr__(self, "equations", tuple(eqs))


def endo_apply(matrix, x: TorusPoint) -> TorusPoint:
    """([A]x)_i = prod_j x_j^(A_ij); negative entries use inverses."""
    m = _as_matrix(matrix)
    if len(m[0]) != x.dim:
        raise UsageError("dimension mismatch")
    coords = []
    for row in m:
        acc = RatFunc.one(x.modulus)
        for a, xj in zip(row, x.coords):
            if a:
                acc = acc * ratfunc_int_pow(xj, a)
        coords.append(acc)
    return TorusPoint(tuple(coords))


def selfmap_apply(phi: TorusSelfMap, x: TorusPoint) -> TorusPoint:
    return phi.translation * endo_apply(phi.matrix, x)


def selfmap_compose(f: TorusSelfMap, g: TorusSelfMap) -> TorusSelfMap:
    """(f o g)(x) = f(g(x)): matrices multiply, translations twist."""
    return TorusSelfMap(
        mat_mul([list(r) for r in f.matrix], [list(r) for r in g.matrix]),
        f.translation * endo_apply(f.matrix, g.translation))


def selfmap_iterate(phi: TorusSelfMap, alpha: TorusPoint, n: int
                    ) -> TorusPoint:
    """Phi^n(alpha) by binary composition of affine pairs."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return alpha
    acc: TorusSelfMap | None = None
    base = phi
    e = n
    while e:
        if e & 1:
            acc = base if acc is None else selfmap_compose(acc, base)
        e >>= 1
        if e:
            base = selfmap_compose(base, base)
    return selfmap_apply(acc, alpha)


def variety_contains(v: Variety, x: TorusPoint) -> bool:
    """Exact membership: every equation evaluates to zero."""
    if v.n_vars != x.dim:
        raise UsageError("dimension mismatch")
    powers: dict[tuple[int, int], RatFunc] = {}

    def coord_pow(i: int, e: int) -> RatFunc:
        key = (i, e)
        if key not in powers:
            powers[key] = ratfunc_int_pow(x.coords[i], e)
        return powers[key]

    for eq in v.equations:
        acc = RatFunc.zero(x.modulus)
        for ev, coeff in eq:
            term = coeff
            for i, e in enumerate(ev):
                if e:
                    term = term * coord_pow(i, e)
            acc = acc + term
        if not acc.is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# Factored values: unit * prod (monic irreducible)^exponent
# ---------------------------------------------------------------------------


class Factored:
    """Element of F_p(t)^* in factored form with exact integer exponents.

    Keys are monic irreducible polynomials (by canonical coefficient tuple),
    so equality of values is equality of unit and exponent dictionaries.
    """

    __slots__ = ("unit", "powers", "p")

    def __init__(self, unit: int, powers: dict[tuple[int, ...], int],
                 p: PrimeModulus):
        self.unit = unit % p.p
        self.powers = {k: e for k, e in powers.items() if e != 0}
        self.p = p
        if self.unit == 0:
            raise DomainError("factored values are nonzero")

    @staticmethod
    def one(p: PrimeModulus) -> "Factored":
        return Factored(1, {}, p)

    @staticmethod
    def from_ratfunc(x: RatFunc) -> "Factored | None":
        """Factor into linear/irreducible pieces; None when a root-free
        factor of degree >= 4 remains (it might split further)."""
        if x.is_zero():
            return None
        p = x.modulus
        unit = 1
        powers: dict[tuple[int, ...], int] = {}
        for poly, sign in ((x.num, 1), (x.den, -1)):
            u, factors = _factor_poly(poly)
            if factors is None:
                return None
            if sign == 1:
                unit = unit * u % p.p
            else:
                unit = unit * pow(u, p.p - 2, p.p) % p.p
            for key, mult in factors.items():
                powers[key] = powers.get(key, 0) + sign * mult
        return Factored(unit, powers, p)

    def __mul__(self, other: "Factored") -> "Factored":
        powers = dict(self.powers)
        for k, e in other.powers.items():
            powers[k] = powers.get(k, 0) + e
        return Factored(self.unit * other.unit % self.p.p, powers, self.p)

    def __pow__(self, e: int) -> "Factored":
        pm1 = self.p.p - 1
        return Factored(pow(self.unit, e % pm1, self.p.p),
                        {k: v * e for k, v in self.powers.items()}, self.p)

    def inv(self) -> "Factored":
        return self ** -1

    def __eq__(self, other) -> bool:
        return (isinstance(other, Factored) and self.unit == other.unit
                and self.powers == other.powers)

    def __repr__(self):
        return f"Factored(unit={self.unit}, powers={self.powers})"

    def expanded_len(self) -> int:
        """Coefficient count of the numerator/denominator if expanded."""
        num = sum((len(k) - 1) * e for k, e in self.powers.items() if e > 0)
        den = sum((len(k) - 1) * -e for k, e in self.powers.items() if e < 0)
        return max(num, den) + 1

    def to_ratfunc(self) -> RatFunc:
        if self.expanded_len() > _EXPAND_CAP:
            raise ResourceLimitError(
                "factored value too large to expand densely")
        p = self.p
        num = FpPoly.const(self.unit, p)
        den = FpPoly.one(p)
        for key, e in self.powers.items():
            base = FpPoly(key, p)
            if e > 0:
                num = num * base ** e
            else:
                den = den * base ** (-e)
        return RatFunc(num, den, _canonical=True)


def _factor_poly(poly: FpPoly
                 ) -> tuple[int, dict[tuple[int, ...], int] | None]:
    """(unit, {monic irreducible coeffs: multiplicity}) or (_, None)."""
    p = poly.modulus.p
    unit = poly.leading()
    work = poly.monic()
    factors: dict[tuple[int, ...], int] = {}
    # root scan over F_p
    for r in range(p):
        while work.degree >= 1 and work.eval_int(r) == 0:
            lin = FpPoly((-r % p, 1), poly.modulus)
            work = work.divmod(lin)[0]
            key = lin.coeffs
            factors[key] = factors.get(key, 0) + 1
    if work.degree >= 4:
        return unit, None
    if work.degree >= 1:
        # degree 2 or 3 without roots is irreducible over F_p
        factors[work.coeffs] = factors.get(work.coeffs, 0) + 1
    return unit, factors


def factor_point(x: TorusPoint) -> list[Factored] | None:
    out = []
    for c in x.coords:
        f = Factored.from_ratfunc(c)
        if f is None:
            return None
        out.append(f)
    return out


def _endo_apply_factored(matrix: Matrix, pt: list[Factored]
                         ) -> list[Factored]:
    out = []
    for row in matrix:
        acc = Factored.one(pt[0].p)
        for a, xj in zip(row, pt):
            if a:
                acc = acc * xj ** a
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# Structured equation evaluation on Frobenius-power points
# ---------------------------------------------------------------------------


def _digit_sum(m: int, p: int) -> int:
    s = 0
    while m:
        s += m % p
        m //= p
    return s


def _structured_zero_test(lin: list[tuple[int, int]], const: int, m: int,
                          p: int) -> bool | None:
    """Is sum_a lam_a (t + s_a)^m + const zero over F_p?

    Requires distinct nonzero shifts s_a. The Frobenius factorization
    (t+s)^m = prod_i (t^(p^i) + s)^(d_i) over the base-p digits d_i of m
    makes every coefficient a binomial product (nonzero mod p by Lucas)
    times W(K) = sum_a lam_a s_a^K, so the polynomial vanishes iff W does
    on the achievable exponent range. Returns None when inapplicable.
    """
    shifts = [s for s, _ in lin]
    if len(set(shifts)) != len(shifts) or any(s % p == 0 for s in shifts):
        return None
    lam = [(s % p, l % p) for s, l in lin]
    if m == 0:
        return (sum(l for _, l in lam) + const) % p == 0
    if m < 0:
        return all(l == 0 for _, l in lam) and const % p == 0

    def W(K: int) -> int:
        return sum(l * pow(s, K % (p - 1) if K else 0, p)
                   for s, l in lam) % p

    D = _digit_sum(m, p)
    top = min(D, p - 1)
    for K in range(top):
        if W(K) != 0:
            return False
    return (W(D % (p - 1) if D else 0) + const) % p == 0


def _eval_equation_factored(eq: Equation, pt: list[Factored],
                            p: PrimeModulus) -> bool:
    """Exact zero test of one equation at a factored point.

    One term never vanishes; two terms reduce to a factored ratio test whose
    degrees are exact, so unequal degrees decide without expansion. Linear
    combinations of equal Frobenius powers of distinct linear bases go
    through the digit-structured route; what remains is expanded under the
    size cap after the common monomial factor is stripped.
    """
    terms: list[tuple[Factored, RatFunc]] = []
    for ev, coeff in eq:
        acc = Factored.one(p)
        for i, e in enumerate(ev):
            if e:
                acc = acc * pt[i] ** e
        terms.append((acc, coeff))

    folded = _fold_coefficients(terms, p)
    if folded is not None:
        if len(folded) == 0:
            return True
        if len(folded) == 1:
            return False  # a single nonzero monomial
        if len(folded) == 2:
            return _two_term_zero(folded[0], folded[1])

    structured = _try_structured(terms, p)
    if structured is not None:
        return structured

    if folded is not None:
        # strip the common monomial factor; zeroness is unaffected
        common: dict[tuple[int, ...], int] = {}
        for key in set().union(*(f.powers.keys() for f in folded)):
            common[key] = min(f.powers.get(key, 0) for f in folded)
        reduced = [
            Factored(f.unit, {k: e - common.get(k, 0)
                              for k, e in f.powers.items()}, p)
            for f in folded
        ]
        total = RatFunc.zero(p)
        for fac in reduced:
            total = total + fac.to_ratfunc()
        return total.is_zero()

    total = RatFunc.zero(p)
    for fac, coeff in terms:
        total = total + coeff * fac.to_ratfunc()
    return total.is_zero()


def _fold_coefficients(terms: list[tuple[Factored, RatFunc]],
                       p: PrimeModulus) -> list[Factored] | None:
    """Fold each coefficient into its factored monomial; None if one does
    not factor. Zero coefficients drop out."""
    out = []
    for fac, coeff in terms:
        if coeff.is_zero():
            continue
        cf = Factored.from_ratfunc(coeff)
        if cf is None:
            return None
        out.append(fac * cf)
    return out


def _two_term_zero(a: Factored, b: Factored) -> bool:
    """a + b = 0 iff a/b = -1; degrees of the reduced ratio are exact, so
    any nonzero exponent already decides."""
    ratio = a * b.inv()
    return not ratio.powers and (ratio.unit + 1) % a.p.p == 0


def _try_structured(terms: list[tuple[Factored, RatFunc]], p: PrimeModulus
                    ) -> bool | None:
    lin: list[tuple[int, int]] = []
    const = 0
    m_common: int | None = None
    for fac, coeff in terms:
        if not coeff.is_constant():
            return None
        c = (coeff.num.coeffs[0] if coeff.num.coeffs else 0)
        c = c * pow(coeff.den.coeffs[0], p.p - 2, p.p) % p.p
        c = c * fac.unit % p.p
        if c == 0:
            continue
        if not fac.powers:
            const = (const + c) % p.p
            continue
        if len(fac.powers) != 1:
            return None
        (key, e), = fac.powers.items()
        if len(key) != 2 or key[1] != 1:
            return None  # base not monic linear
        s = key[0]  # base is t + s
        if s % p.p == 0:
            return None
        if m_common is None:
            m_common = e
        elif m_common != e:
            return None
        lin.append((s, c))
    if m_common is None:
        return const % p.p == 0
    return _structured_zero_test(lin, const, m_common, p.p)


def _variety_contains_factored(v: Variety, pt: list[Factored],
                               p: PrimeModulus) -> bool:
    return all(_eval_equation_factored(eq, pt, p) for eq in v.equations)


# ---------------------------------------------------------------------------
# Return sets
# ---------------------------------------------------------------------------


def return_set(phi: TorusSelfMap, alpha: TorusPoint, v: Variety,
               n_max: int) -> list[int]:
    """{n <= n_max : Phi^n(alpha) in V} by sequential iteration.

    Pure endomorphisms with factorable start coordinates iterate in factored
    form (exponent bookkeeping only); everything else iterates densely, one
    affine step per n, degree-capped.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    if v.n_vars != alpha.dim:
        raise UsageError("dimension mismatch")
    if phi.is_endomorphism():
        pt = factor_point(alpha)
        if pt is not None:
            p = alpha.modulus
            hits = []
            cur = pt
            for n in range(n_max + 1):
                if _variety_contains_factored(v, cur, p):
                    hits.append(n)
                if n < n_max:
                    cur = _endo_apply_factored(phi.matrix, cur)
            return hits
    hits = []
    cur = alpha
    for n in range(n_max + 1):
        if variety_contains(v, cur):
            hits.append(n)
        if n < n_max:
            cur = selfmap_apply(phi, cur)
    return hits


# ---------------------------------------------------------------------------
# Minimal polynomial and the decomposition of Phi^n
# ---------------------------------------------------------------------------


def minimal_polynomial(a) -> tuple[int, ...]:
    """Minimal monic polynomial of an integer matrix, lowest degree first.

    Finds the least degree l with A^l in the span of lower powers by exact
    rational elimination; the result has integer coefficients because A is
    integral over Z.
    """
    m = _as_matrix(a)
    n = len(m)
    powers = [[[int(i == j) for j in range(n)] for i in range(n)]]
    for _ in range(n):
        powers.append(mat_mul(powers[-1], [list(r) for r in m]))
    vecs = [[Fraction(x) for row in pk for x in row] for pk in powers]
    for l in range(1, n + 1):
        sol = _solve_exact(vecs[:l], vecs[l])
        if sol is not None:
            coeffs = [-c for c in sol] + [Fraction(1)]
            assert all(c.denominator == 1 for c in coeffs)
            return tuple(int(c) for c in coeffs)
    raise AssertionError("Cayley-Hamilton guarantees degree <= n")


def _solve_exact(columns: list[list[Fraction]], target: list[Fraction]
                 ) -> list[Fraction] | None:
    """Solve sum x_i columns[i] = target exactly, or None if inconsistent."""
    rows = len(target)
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]]
           for i in range(rows)]
    piv_cols: list[int] = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    for i in range(rows):
        if all(aug[i][j] == 0 for j in range(k)) and aug[i][k] != 0:
            return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][k]
    return sol


@dataclass(frozen=True)
class ReductionData:
    """Phi^n(alpha) = prod_i [u_i(n)]Q_i * prod_i [v_i(n)](A^i alpha).

    v-sequences express A^n in the basis A^0..A^(l-1) (delta initial
    conditions, minimal-polynomial recurrence); u-sequences expand the
    geometric operator sum S_n = I + A + ... + A^(n-1) in the triangular
    basis S_1..S_l, so their recurrence is (x - 1) times the minimal
    polynomial. Q_i = prod_{j<i} [A^j]y.
    """

    minpoly: tuple[int, ...]
    u_seqs: tuple[Lrs, ...]
    v_seqs: tuple[Lrs, ...]
    q_points: tuple[TorusPoint, ...]


def reduction_decompose(phi: TorusSelfMap, alpha: TorusPoint
                        ) -> ReductionData:
    minpoly = minimal_polynomial(phi.matrix)
    l = len(minpoly) - 1
    v_seqs = tuple(
        Lrs(minpoly[:-1], tuple(int(i == j) for j in range(l)))
        for i in range(l))
    # s_{n+1} = x*s_n + 1 in Z[x]/(minpoly); u_i(n) = c_{i-1}(s_n) - c_i(s_n)
    urec = _poly_mul_z(minpoly, (-1, 1))
    s: list[int] = [0] * l
    u_init: list[list[int]] = [[] for _ in range(l)]
    for _ in range(l + 1):
        coeffs = s + [0]
        for i in range(1, l + 1):
            u_init[i - 1].append(coeffs[i - 1] - coeffs[i])
        s = _shift_mod(s, minpoly)
        s[0] += 1
    u_seqs = tuple(Lrs(urec[:-1], tuple(u_init[i])) for i in range(l))
    q_points = []
    acc = phi.translation
    apow = [list(r) for r in phi.matrix]
    for i in range(1, l + 1):
        q_points.append(acc)
        if i < l:
            image = endo_apply(mat_pow(apow, i), phi.translation)
            acc = acc * image
    return ReductionData(minpoly, u_seqs, v_seqs, tuple(q_points))


def _poly_mul_z(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def _shift_mod(s: list[int], minpoly: tuple[int, ...]) -> list[int]:
    """x * s mod minpoly over Z, for monic minpoly of degree l = len(s)."""
    l = len(s)
    out = [0] + s[:-1] if l > 1 else [0]
    lead = s[-1] if s else 0
    if l == 1:
        out = [0]
        lead = s[0]
    if lead:
        for i in range(l):
            out[i] -= lead * minpoly[i]
    return out


def verify_reduction(rd: ReductionData, phi: TorusSelfMap,
                     alpha: TorusPoint, n_max: int) -> bool:
    """Exact check of the decomposition identity for every n <= n_max.

    Both sides are computed independently: the left by iterating the affine
    map, the right from the stored recurrences and points. Runs in factored
    form when all base coordinates factor, else densely.
    """
    l = len(rd.minpoly) - 1
    p = alpha.modulus
    u_vals = [lrs_prefix(s, n_max) for s in rd.u_seqs]
    v_vals = [lrs_prefix(s, n_max) for s in rd.v_seqs]
    apow = [list(r) for r in phi.matrix]
    a_alpha = [alpha]
    for i in range(1, l):
        a_alpha.append(endo_apply(mat_pow(apow, i), alpha))

    f_alpha = factor_point(alpha)
    f_y = factor_point(phi.translation)
    f_q = [factor_point(q) for q in rd.q_points]
    f_aa = [factor_point(x) for x in a_alpha]
    if (f_alpha is not None and f_y is not None
            and all(x is not None for x in f_q)
            and all(x is not None for x in f_aa)):
        cur = f_alpha
        for n in range(n_max + 1):
            rhs = [Factored.one(p) for _ in range(alpha.dim)]
            for i in range(l):
                for d in range(alpha.dim):
                    rhs[d] = rhs[d] * f_q[i][d] ** u_vals[i][n]
                    rhs[d] = rhs[d] * f_aa[i][d] ** v_vals[i][n]
            if cur != rhs:
                return False
            if n < n_max:
                cur = [a * b for a, b in zip(
                    f_y, _endo_apply_factored(phi.matrix, cur))]
        return True

    cur_pt = alpha
    for n in range(n_max + 1):
        coords = []
        for d in range(alpha.dim):
            acc = RatFunc.one(p)
            for i in range(l):
                acc = acc * ratfunc_int_pow(rd.q_points[i].coords[d],
                                            u_vals[i][n])
                acc = acc * ratfunc_int_pow(a_alpha[i].coords[d],
                                            v_vals[i][n])
            coords.append(acc)
        if TorusPoint(tuple(coords)).coords != cur_pt.coords:
            return False
        if n < n_max:
            cur_pt = selfmap_apply(phi, cur_pt)
    return True


# ---------------------------------------------------------------------------
# Frobenius obstruction (bounded decision)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObstructionVerdict:
    obstructed: bool
    r: int | None = None
    s: int | None = None
    r_max: int | None = None
    s_max: int | None = None

    def __str__(self):
        if self.obstructed:
            return f"obstructed({self.r},{self.s})"
        return f"clear-to-bound({self.r_max},{self.s_max})"


def frobenius_obstruction(a, p: PrimeModulus, r_max: int = 12,
                          s_max: int = 24) -> ObstructionVerdict:
    """Does some iterate act as a Frobenius power on a proper subgroup?

    Scans det(A^r - p^s I) = 0 for r <= r_max, s <= s_max in lexicographic
    order; afterwards any integer eigenvalue of absolute value p^b forces
    obstructed(2, 2b) even beyond the scan window. A clear verdict is
    explicitly bounded.
    """
    if r_max < 1 or s_max < 1:
        raise DomainError("bounds must be at least 1")
    m = [list(r) for r in _as_matrix(a)]
    from .lrs import char_poly_of_matrix

    for r in range(1, r_max + 1):
        ar = mat_pow(m, r)
        cp = char_poly_of_matrix(ar)
        for s in range(0, s_max + 1):
            if _poly_eval_z(cp, p.p ** s) == 0:
                return ObstructionVerdict(True, r, s)
    minpoly = minimal_polynomial(m)
    from .lrs import Lrs as _L, lrs_char_roots

    roots = lrs_char_roots(_L(minpoly[:-1], (0,) * (len(minpoly) - 1)))
    for root, _ in roots.integer_roots:
        v = abs(root)
        b = 0
        while v > 1 and v % p.p == 0:
            v //= p.p
            b += 1
        if v == 1:
            return ObstructionVerdict(True, 2, 2 * b)
    return ObstructionVerdict(False, r_max=r_max, s_max=s_max)


def _poly_eval_z(poly: tuple[int, ...], x: int) -> int:
    acc = 0
    for c in reversed(poly):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


def full_pipeline(phi: TorusSelfMap, alpha: TorusPoint, v: Variety,
                  n_max: int, declared_dim: int | None = None,
                  r_max: int = 12, s_max: int = 24) -> ReturnSetDesc:
    """return_set followed by fit-and-verify classification.

    Pure endomorphisms that are clear of the Frobenius obstruction get the
    progressions-only shape; a declared variety dimension <= 2 (or the
    default) fits p-sets with at most two nontrivial exponent terms. The
    description always verifies against the raw hits on [0, n_max].
    """
    from .pexp import fit_solution_desc

    p = alpha.modulus
    hits = set(return_set(phi, alpha, v, n_max))
    notes: list[str] = []
    allow_psets = True
    if phi.is_endomorphism():
        verdict = frobenius_obstruction(phi.matrix, p, r_max, s_max)
        if not verdict.obstructed:
            allow_psets = False
            notes.append(f"no Frobenius obstruction: {verdict}; "
                         "progressions-only shape")
        else:
            notes.append(str(verdict))
    if declared_dim is not None and declared_dim > 2 and allow_psets:
        allow_psets = False
        notes.append("declared dimension above 2: "
                     "progressions and exceptional points only")
    return fit_solution_desc(hits, p, n_max, allow_psets=allow_psets,
                             max_nontrivial=2, notes=tuple(notes))
