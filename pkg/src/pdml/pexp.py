"""Polynomial-exponential equations u_n = sum c_i p^(k_i n_i).

pexp_solve decides representability of each u_n exactly through the digit
DP; pexp_classify fits the solution set into arithmetic progressions plus
p-sets of the two-exponent shape, re-verifying every emitted description
against the solver on the full range. The classifier never extrapolates
unverified structure: shape fitting is advisory, the oracle check
is mandatory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ResourceLimitError, UnsupportedError, ValidationError
from .exact import PrimeModulus
from .lrs import (
    Lrs,
    lrs_char_roots,
    lrs_eval,
    lrs_nondegenerate_split,
    lrs_prefix,
    lrs_root_p_dependence,
)
from .psets import ArithProg, PSet, ReturnSetDesc, desc_verify, fit_pset_shapes

# Eventual-periodicity detection cap for AP extraction.
DEFAULT_PERIOD_CAP = 360

# Residual sets at least this large get a p-set fit attempt before the
# plain exceptional-set fallback.
_PSET_FIT_MIN = 4

# Largest exceptional set a structured description may carry.
_EXCEPTIONAL_CAP = 64


@dataclass(frozen=True)
class PexpInstance:
    """u_n = sum c_i p^(k_i n_i); empty terms mean the void equation, which
    every n satisfies."""

    u: Lrs
    p: PrimeModulus
    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((int(c), int(k)) for c, k in self.terms))
        if any(k < 0 for _, k in self.terms):
            raise DomainError("exponent multipliers must be non-negative")

    def nontrivial_terms(self) -> int:
        return sum(1 for c, k in self.terms if k >= 1 and c != 0)

    def pset(self) -> PSet | None:
        if not self.terms:
            return None
        return PSet(tuple((Fraction(c), k) for c, k in self.terms))


def pexp_solve(inst: PexpInstance, n_max: int
               ) -> list[tuple[int, tuple[int, ...]]]:
    """All (n, lexicographically least witness) with n <= n_max."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    from .psets import pset_membership

    values = lrs_prefix(inst.u, n_max)
    S = inst.pset()
    out = []
    for n, v in enumerate(values):
        if S is None:
            out.append((n, ()))
            continue
        w = pset_membership(v, S, inst.p)
        if w is not None:
            out.append((n, w))
    return out


def pexp_solution_set(inst: PexpInstance, n_max: int) -> set[int]:
    return {n for n, _ in pexp_solve(inst, n_max)}


# ---------------------------------------------------------------------------
# Description fitting (shared with the torus pipeline)
# ---------------------------------------------------------------------------


def _extract_aps(indicator: list[bool], period_cap: int
                 ) -> tuple[list[tuple[int, int]], int]:
    """Smallest period q <= cap such that the indicator is q-periodic on a
    tail covering at least three periods; returns (aps as (q, offset), tail
    start). No valid period yields ([], len(indicator))."""
    n = len(indicator)
    for q in range(1, period_cap + 1):
        if 3 * q > n:
            break
        start = 0
        for i in range(n - q - 1, -1, -1):
            if indicator[i] != indicator[i + q]:
                start = i + 1
                break
        if start + 3 * q <= n:
            aps = []
            for r in range(q):
                first = next(
                    (i for i in range(start, min(start + q, n))
                     if i % q == r % q and indicator[i]), None)
                if first is not None:
                    # extend the progression backwards while it keeps holding
                    while first - q >= 0 and indicator[first - q]:
                        first -= q
                    aps.append((q, first))
            return aps, start
    return [], n


def fit_solution_desc(
    solutions: set[int],
    p: PrimeModulus,
    n_max: int,
    allow_psets: bool,
    max_nontrivial: int = 2,
    period_cap: int = DEFAULT_PERIOD_CAP,
    notes: tuple[str, ...] = (),
) -> ReturnSetDesc:
    """Fit-and-verify a ReturnSetDesc for a solution set on [0, n_max].

    Tries AP extraction, then (if allowed) two-exponent p-set shapes on the
    residual, then falls back to the raw exceptional set, which always
    verifies. The returned description always carries verified_bound = n_max.
    """
    oracle = solutions.__contains__
    indicator = [n in solutions for n in range(n_max + 1)]
    ap_pairs, tail = _extract_aps(indicator, period_cap)
    aps = tuple(ArithProg(q, b) for q, b in ap_pairs)
    covered = set()
    for ap in aps:
        covered.update(ap.members(n_max))
    residual = sorted(solutions - covered)

    candidates: list[tuple[tuple[int, int], ReturnSetDesc]] = []
    if residual and len(residual) >= _PSET_FIT_MIN and allow_psets:
        for cand in fit_pset_shapes(residual, p):
            if cand.nontrivial_terms() > max_nontrivial:
                continue
            from .psets import pset_enumerate

            cand_members = set(pset_enumerate(cand, p, n_max))
            if not cand_members <= solutions:
                continue
            leftovers = tuple(sorted(set(residual) - cand_members))
            if len(leftovers) > _EXCEPTIONAL_CAP:
                continue
            candidates.append(((len(leftovers), cand.m), ReturnSetDesc(
                p, aps=aps, psets=(cand,), exceptional=leftovers,
                notes=notes)))
    # fewest leftover exceptional points first, then simplest shape
    candidates.sort(key=lambda kv: kv[0])
    ranked = [d for _, d in candidates]
    if len(residual) <= _EXCEPTIONAL_CAP:
        exc_only = ReturnSetDesc(
            p, aps=aps, psets=(), exceptional=tuple(residual), notes=notes)
        # a fit that explains most of the residual beats the plain list
        if ranked and len(ranked[0].exceptional) <= len(residual) // 2:
            ranked.append(exc_only)
        else:
            ranked.insert(0, exc_only)
    ranked.append(ReturnSetDesc(
        p, exceptional=tuple(sorted(solutions)),
        notes=notes + ("fallback: raw solution set",)))
    for desc in ranked:
        if desc_verify(desc, oracle, n_max):
            return desc
    raise AssertionError("raw solution description failed to verify")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def pexp_classify(inst: PexpInstance, n_max: int,
                  period_cap: int = DEFAULT_PERIOD_CAP,
                  cyclotomic_bound: int | None = None) -> ReturnSetDesc:
    """Classify {n : u_n representable} into a verified description.

    Dispatch per non-degenerate piece of u: when every integer root is
    multiplicatively independent of p only progressions and exceptional
    points are fitted; with at most two nontrivial terms the two-exponent
    p-set shape is additionally tried; otherwise raw solutions are returned.
    Unresolved irrational root factors force the raw fallback, flagged in
    the notes.
    """
    from .lrs import DEFAULT_CYCLOTOMIC_BOUND

    if cyclotomic_bound is None:
        cyclotomic_bound = DEFAULT_CYCLOTOMIC_BOUND
    solutions = pexp_solution_set(inst, n_max)
    oracle = solutions.__contains__
    if not inst.terms:
        desc = ReturnSetDesc(inst.p, aps=(ArithProg(1, 0),),
                             notes=("void equation: ambient progression",))
        assert desc_verify(desc, oracle, n_max)
        return desc
    try:
        pieces = lrs_nondegenerate_split(inst.u, cyclotomic_bound)
    except UnsupportedError:
        desc = ReturnSetDesc(
            inst.p, exceptional=tuple(sorted(solutions)),
            notes=("unsupported: irrational characteristic roots; "
                   "raw solutions to bound",))
        assert desc_verify(desc, oracle, n_max)
        return desc

    all_aps: list[ArithProg] = []
    all_psets: list[PSet] = []
    all_exc: list[int] = []
    notes: list[str] = []
    for mod, off, piece in pieces:
        k_max = (n_max - off) // mod if off <= n_max else -1
        k_sols = {(n - off) // mod for n in solutions
                  if n >= off and (n - off) % mod == 0}
        if k_max < 0:
            continue
        roots = lrs_char_roots(piece)
        report = lrs_root_p_dependence(roots, inst.p)
        if roots.fully_resolved() and report.all_independent():
            allow = False
            notes.append(f"piece {mod}k+{off}: roots independent of p")
        elif inst.nontrivial_terms() <= 2:
            allow = True
            notes.append(f"piece {mod}k+{off}: two-exponent shape fitted")
        else:
            all_exc.extend(mod * k + off for k in sorted(k_sols))
            notes.append(f"piece {mod}k+{off}: raw solutions")
            continue
        sub = fit_solution_desc(k_sols, inst.p, k_max, allow_psets=allow,
                                period_cap=period_cap)
        for ap in sub.aps:
            all_aps.append(ArithProg(ap.a * mod, ap.b * mod + off))
        for ps in sub.psets:
            all_psets.append(_affine_pset(ps, mod, off))
        all_exc.extend(mod * k + off for k in sub.exceptional)

    desc = ReturnSetDesc(inst.p, aps=tuple(all_aps), psets=tuple(all_psets),
                         exceptional=tuple(sorted(all_exc)),
                         notes=tuple(notes))
    if desc_verify(desc, oracle, n_max):
        return desc
    desc = ReturnSetDesc(inst.p, exceptional=tuple(sorted(solutions)),
                         notes=("fallback: piecewise fit failed to verify",))
    assert desc_verify(desc, oracle, n_max)
    return desc


def _affine_pset(ps: PSet, scale: int, shift: int) -> PSet:
    """Image of a p-set under k -> scale*k + shift, again a p-set."""
    terms = [(c * scale, k) for c, k in ps.terms]
    const = sum((c for c, k in terms if k == 0), Fraction(0)) + shift
    rest = [(c, k) for c, k in terms if k != 0]
    if const != 0 or not rest:
        rest.append((const, 0))
    return PSet(tuple(rest))


# ---------------------------------------------------------------------------
# F-arithmetic sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FArithSeq:
    """n in an ambient progression with U_n = sum_i U^(i)_(n_i) solvable.

    Nontrivial parts must have all integer characteristic roots equal to
    powers p^b with b >= 1 (checked at construction); constant parts are
    trivial and act as fixed summands.
    """

    p: PrimeModulus
    ap: ArithProg
    U: Lrs
    parts: tuple[Lrs, ...]

    def __post_init__(self):
        for part in self.parts:
            if _is_constant(part):
                continue
            roots = lrs_char_roots(part)
            if not roots.fully_resolved():
                raise ValidationError(
                    "part has unresolved non-integer characteristic roots")
            for r, _ in roots.integer_roots:
                if r == 1:
                    continue
                if not _is_p_power(r, self.p.p):
                    raise ValidationError(
                        f"part root {r} is not a power of p = {self.p.p}")


def _is_constant(s: Lrs) -> bool:
    vals = lrs_prefix(s, s.order)
    return all(v == vals[0] for v in vals)


def _is_p_power(r: int, p: int) -> bool:
    if r < p:
        return False
    while r % p == 0:
        r //= p
    return r == 1


@dataclass(frozen=True)
class FarithResult:
    solutions: tuple[int, ...]
    capped: bool


def _convert_part(part: Lrs, p: int
                  ) -> tuple[Fraction, int, Fraction] | None:
    """Express a part as gamma * p^(b k) + delta if its characteristic
    polynomial splits into distinct factors from {x - 1, x - p^b}."""
    if _is_constant(part):
        return Fraction(0), 0, Fraction(lrs_eval(part, 0))
    roots = lrs_char_roots(part)
    if not roots.fully_resolved():
        return None
    rs = dict(roots.integer_roots)
    if any(mult != 1 for mult in rs.values()):
        return None
    nontriv = [r for r in rs if r != 1]
    if len(nontriv) != 1 or not _is_p_power(nontriv[0], p):
        return None
    pb = nontriv[0]
    b = 0
    q = pb
    while q > 1:
        q //= p
        b += 1
    u0 = Fraction(lrs_eval(part, 0))
    if 1 in rs:
        u1 = Fraction(lrs_eval(part, 1))
        gamma = (u1 - u0) / (pb - 1)
        delta = u0 - gamma
    else:
        gamma, delta = u0, Fraction(0)
    return gamma, b, delta


def farith_solve(seq: FArithSeq, n_max: int) -> FarithResult:
    """All n = ak + b <= n_max with U_n expressible as a sum over the parts.

    Convertible parts become p-set terms; the rest are searched over a
    bounded exponent range with divergence pruning, and the result is
    flagged capped whenever that range cannot be certified complete.
    """
    ns = seq.ap.members(n_max)
    if not seq.parts:
        # void equation: the sequence is the ambient progression itself
        return FarithResult(tuple(ns), False)
    pv = seq.p.p
    converted: list[tuple[Fraction, int]] = []
    delta = Fraction(0)
    searched: list[Lrs] = []
    for part in seq.parts:
        conv = _convert_part(part, pv)
        if conv is None:
            searched.append(part)
        else:
            gamma, b, d = conv
            delta += d
            if gamma != 0:
                converted.append((gamma, b))
    S = PSet(tuple(converted)) if converted else None
    if not ns:
        return FarithResult((), False)
    prefix = lrs_prefix(seq.U, ns[-1])
    u_vals = {n: prefix[n] for n in ns}
    cap = _nested_cap(max(abs(v) for v in u_vals.values()), pv)
    tables, capped = _part_tables(searched, cap, u_vals.values())

    def solvable(target: Fraction) -> bool:
        return _search_parts(target, tables, 0, S, seq.p)

    sols = [n for n in ns if solvable(Fraction(u_vals[n]) - delta)]
    return FarithResult(tuple(sols), capped)


def _nested_cap(u_abs_max: int, p: int) -> int:
    import math

    return 4 * math.ceil(math.log(1 + u_abs_max, p)) + 16


def _part_tables(parts: list[Lrs], cap: int, targets
                 ) -> tuple[list[list[int]], bool]:
    """Explored values per unconvertible part plus a completeness flag."""
    horizon = max((abs(int(t)) for t in targets), default=0)
    tables = []
    capped = False
    for part in parts:
        vals = lrs_prefix(part, cap)
        tables.append(vals)
    for i, vals in enumerate(tables):
        other = sum(max(abs(v) for v in t) for j, t in enumerate(tables)
                    if j != i)
        tail = vals[-3:]
        monotone = all(abs(tail[k]) < abs(tail[k + 1])
                       for k in range(len(tail) - 1))
        if not (monotone and abs(vals[-1]) > horizon + other):
            capped = True
    return tables, capped


def _search_parts(target: Fraction, tables: list[list[int]], idx: int,
                  S: PSet | None, p: PrimeModulus) -> bool:
    from .psets import pset_membership

    if idx == len(tables):
        if S is None:
            return target == 0
        return pset_membership(target, S, p) is not None
    lo = sum(min(t) for t in tables[idx:])
    hi = sum(max(t) for t in tables[idx:])
    if S is None and not (lo <= target <= hi):
        return False
    for v in tables[idx]:
        if _search_parts(target - v, tables, idx + 1, S, p):
            return True
    return False


def general_farith_intersect(seqs: list[FArithSeq], n_max: int
                             ) -> FarithResult:
    """Intersection of finitely many F-arithmetic sequences."""
    if not seqs:
        raise DomainError("need at least one sequence")
    results = [farith_solve(s, n_max) for s in seqs]
    common = set(results[0].solutions)
    for r in results[1:]:
        common &= set(r.solutions)
    return FarithResult(tuple(sorted(common)),
                        any(r.capped for r in results))
