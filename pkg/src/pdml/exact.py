"""Exact arithmetic over F_p, F_p[t] and F_p(t).

Values are immutable after construction and safe to share between threads.
Polynomials store their coefficients lowest degree first as plain ints in
[0, p); the zero polynomial is the empty coefficient list, so ``degree ==
len(coeffs) - 1`` and the Frobenius re-indexing x -> x^p is a stride copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ResourceLimitError, UsageError

# Intermediate polynomials above this many coefficients are rejected instead
# of exhausting memory; x^m for huge m is degree m, so callers must bound m.
DEFAULT_DEGREE_CAP = 10**6
_degree_cap = DEFAULT_DEGREE_CAP


def set_degree_cap(n: int) -> None:
    global _degree_cap
    if n < 1:
        raise DomainError("degree cap must be positive")
    _degree_cap = n


def get_degree_cap() -> int:
    return _degree_cap

# Schoolbook multiplication below this size; numpy convolution above.
_CONVOLVE_MIN = 64

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_LIMIT = 3317044064679887385961981  # witness set is deterministic below this


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n below ~3.3e24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    if n >= _MR_LIMIT:
        raise UnsupportedPrimeSize(n)
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class UnsupportedPrimeSize(DomainError):
    def __init__(self, n: int):
        super().__init__(f"primality test limited to n < {_MR_LIMIT}, got {n}")


@dataclass(frozen=True)
class PrimeModulus:
    """A prime p, validated once at construction so hot loops need not."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    def __repr__(self):
        return f"PrimeModulus({self.p})"


@dataclass(frozen=True)
class FpElem:
    """Element of the prime field F_p, kept in canonical range [0, p)."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.p:
            object.__setattr__(self, "value", self.value % self.modulus.p)

    def _check(self, other: "FpElem") -> int:
        if self.modulus != other.modulus:
            raise UsageError("modulus mismatch")
        return self.modulus.p

    def __add__(self, other: "FpElem") -> "FpElem":
        p = self._check(other)
        return FpElem((self.value + other.value) % p, self.modulus)

    def __sub__(self, other: "FpElem") -> "FpElem":
        p = self._check(other)
        return FpElem((self.value - other.value) % p, self.modulus)

    def __mul__(self, other: "FpElem") -> "FpElem":
        p = self._check(other)
        return FpElem(self.value * other.value % p, self.modulus)

    def __neg__(self) -> "FpElem":
        return FpElem(-self.value % self.modulus.p, self.modulus)

    def inv(self) -> "FpElem":
        if self.value == 0:
            raise DomainError("inversion of zero")
        p = self.modulus.p
        return FpElem(pow(self.value, p - 2, p), self.modulus)

    def __pow__(self, e: int) -> "FpElem":
        p = self.modulus.p
        if e < 0:
            return self.inv() ** (-e)
        return FpElem(pow(self.value, e, p), self.modulus)

    def __truediv__(self, other: "FpElem") -> "FpElem":
        return self * other.inv()

    def __bool__(self):
        return self.value != 0


class FpPoly:
    """Polynomial over F_p, coefficients lowest degree first.

    Canonical form: no trailing zero coefficients; the zero polynomial has an
    empty tuple. Coefficients are plain ints in [0, p).
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: Iterable[int], modulus: PrimeModulus,
                 _canonical: bool = False):
        self.modulus = modulus
        if _canonical:
            self.coeffs = tuple(coeffs)
            return
        p = modulus.p
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def zero(modulus: PrimeModulus) -> "FpPoly":
        return FpPoly((), modulus, _canonical=True)

    @staticmethod
    def one(modulus: PrimeModulus) -> "FpPoly":
        return FpPoly((1,), modulus, _canonical=True)

    @staticmethod
    def const(c: int, modulus: PrimeModulus) -> "FpPoly":
        return FpPoly((c,), modulus)

    @staticmethod
    def x(modulus: PrimeModulus) -> "FpPoly":
        return FpPoly((0, 1), modulus, _canonical=True)

    # -- basic queries ---------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def __eq__(self, other):
        return (isinstance(other, FpPoly) and self.modulus == other.modulus
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.coeffs, self.modulus.p))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"FpPoly({list(self.coeffs)}, p={self.modulus.p})"

    def _check(self, other: "FpPoly"):
        if self.modulus != other.modulus:
            raise UsageError("modulus mismatch")

    # -- ring operations -------------------------------------------------------

    def __add__(self, other: "FpPoly") -> "FpPoly":
        self._check(other)
        p = self.modulus.p
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % p
        return FpPoly(out, self.modulus)

    def __sub__(self, other: "FpPoly") -> "FpPoly":
        return self + (-other)

    def __neg__(self) -> "FpPoly":
        p = self.modulus.p
        return FpPoly(tuple((-c) % p for c in self.coeffs), self.modulus,
                      _canonical=True)

    def scale(self, c: int) -> "FpPoly":
        p = self.modulus.p
        c %= p
        if c == 0:
            return FpPoly.zero(self.modulus)
        return FpPoly([a * c % p for a in self.coeffs], self.modulus)

    def __mul__(self, other: "FpPoly") -> "FpPoly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FpPoly.zero(self.modulus)
        p = self.modulus.p
        _guard_size(len(a) + len(b) - 1, self.modulus)
        if min(len(a), len(b)) >= _CONVOLVE_MIN and (p - 1) ** 2 * min(
                len(a), len(b)) < 2**62:
            out = np.convolve(np.array(a, dtype=np.int64),
                              np.array(b, dtype=np.int64)) % p
            return FpPoly(out.tolist(), self.modulus)
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return FpPoly([c % p for c in out], self.modulus)

    def shift(self, k: int) -> "FpPoly":
        """Multiply by t^k."""
        if self.is_zero() or k == 0:
            return self
        _guard_size(len(self.coeffs) + k, self.modulus)
        return FpPoly((0,) * k + self.coeffs, self.modulus, _canonical=True)

    def divmod(self, other: "FpPoly") -> tuple["FpPoly", "FpPoly"]:
        """Euclidean division: self = q*other + r with deg r < deg other."""
        self._check(other)
        if other.is_zero():
            raise DomainError("division by zero polynomial")
        p = self.modulus.p
        rem = list(self.coeffs)
        d = other.degree
        lead_inv = pow(other.coeffs[-1], p - 2, p)
        q = [0] * max(0, len(rem) - d)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] % p
            if c:
                factor = c * lead_inv % p
                q[i - d] = factor
                for j, oc in enumerate(other.coeffs):
                    rem[i - d + j] = (rem[i - d + j] - factor * oc) % p
        return FpPoly(q, self.modulus), FpPoly(rem[:d], self.modulus)

    def __mod__(self, other: "FpPoly") -> "FpPoly":
        return self.divmod(other)[1]

    def gcd(self, other: "FpPoly") -> "FpPoly":
        """Monic gcd via Euclid; gcd(0, 0) = 0."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def monic(self) -> "FpPoly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        if lead == 1:
            return self
        return self.scale(pow(lead, self.modulus.p - 2, self.modulus.p))

    def derivative(self) -> "FpPoly":
        return FpPoly([i * c for i, c in enumerate(self.coeffs)][1:],
                      self.modulus)

    def __pow__(self, e: int) -> "FpPoly":
        if e < 0:
            raise DomainError("negative power of a polynomial")
        result = FpPoly.one(self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def frobenius(self, k: int = 1) -> "FpPoly":
        """self(t)^(p^k) = self(t^(p^k)): coefficient re-indexing."""
        if k < 0:
            raise DomainError("negative Frobenius step")
        if k == 0 or self.is_zero():
            return self
        q = self.modulus.p ** k
        _guard_size((len(self.coeffs) - 1) * q + 1, self.modulus)
        out = [0] * ((len(self.coeffs) - 1) * q + 1)
        for i, c in enumerate(self.coeffs):
            out[i * q] = c  # c^(p^k) = c in F_p
        return FpPoly(out, self.modulus, _canonical=True)

    def eval_int(self, x: int) -> int:
        """Evaluate at x in F_p (Horner), returning a canonical residue."""
        p = self.modulus.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc


def _guard_size(n_coeffs: int, modulus: PrimeModulus,
                cap: int | None = None):
    limit = _degree_cap if cap is None else cap
    if n_coeffs > limit:
        raise ResourceLimitError(
            f"polynomial with {n_coeffs} coefficients exceeds cap {limit}")


class RatFunc:
    """Element of F_p(t) as a reduced fraction with monic denominator.

    Equality of values is structural equality of the canonical forms.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: FpPoly, den: FpPoly | None = None,
                 _canonical: bool = False):
        if den is None:
            den = FpPoly.one(num.modulus)
        if _canonical:
            self.num = num
            self.den = den
            return
        num._check(den)
        if den.is_zero():
            raise DomainError("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = FpPoly.one(num.modulus)
            return
        g = num.gcd(den)
        if not g.is_one():
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        lead = den.coeffs[-1]
        if lead != 1:
            p = num.modulus.p
            inv = pow(lead, p - 2, p)
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(modulus: PrimeModulus) -> "RatFunc":
        return RatFunc(FpPoly.zero(modulus), FpPoly.one(modulus),
                       _canonical=True)

    @staticmethod
    def one(modulus: PrimeModulus) -> "RatFunc":
        return RatFunc(FpPoly.one(modulus), FpPoly.one(modulus),
                       _canonical=True)

    @staticmethod
    def const(c: int, modulus: PrimeModulus) -> "RatFunc":
        return RatFunc(FpPoly.const(c, modulus))

    @staticmethod
    def t(modulus: PrimeModulus) -> "RatFunc":
        return RatFunc(FpPoly.x(modulus))

    @staticmethod
    def from_poly(poly: FpPoly) -> "RatFunc":
        return RatFunc(poly, FpPoly.one(poly.modulus), _canonical=True)

    # -- queries ---------------------------------------------------------------

    @property
    def modulus(self) -> PrimeModulus:
        return self.num.modulus

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree <= 0

    def __eq__(self, other):
        return (isinstance(other, RatFunc) and self.num == other.num
                and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"RatFunc({list(self.num.coeffs)}/{list(self.den.coeffs)}, p={self.modulus.p})"

    # -- field operations --------------------------------------------------------

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den - other.num * self.den,
                       self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _canonical=True)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            raise DomainError("division by zero")
        return RatFunc(self.num * other.den, self.den * other.num)

    def inv(self) -> "RatFunc":
        if self.is_zero():
            raise DomainError("inversion of zero")
        return RatFunc(self.den, self.num)


def ratfunc_normalize(num: FpPoly, den: FpPoly) -> RatFunc:
    """Canonical reduced fraction with monic denominator."""
    return RatFunc(num, den)


def frobenius_power(x: RatFunc, k: int) -> RatFunc:
    """x^(p^k) via coefficient re-indexing; cost is one stride copy per step.

    gcd and monicity survive the Frobenius, so the result is already
    canonical.
    """
    if k < 0:
        raise DomainError("negative Frobenius step")
    if k == 0:
        return x
    return RatFunc(x.num.frobenius(k), x.den.frobenius(k), _canonical=True)


def ratfunc_int_pow(x: RatFunc, m: int) -> RatFunc:
    """x^m for arbitrary-precision m via base-p splitting of the exponent.

    m = sum d_i p^i gives x^m = prod frobenius_power(x^(d_i), i); each small
    power x^(d_i) uses binary powering. Degree grows linearly in |m|, guarded
    by the degree cap.
    """
    if m == 0:
        return RatFunc.one(x.modulus)
    if m < 0:
        return ratfunc_int_pow(x.inv(), -m)
    if x.is_zero():
        return x
    p = x.modulus.p
    # small powers of x, computed once per needed digit
    small: dict[int, RatFunc] = {}
    result = RatFunc.one(x.modulus)
    i = 0
    while m:
        d = m % p
        m //= p
        if d:
            if d not in small:
                small[d] = _binary_pow(x, d)
            result = result * frobenius_power(small[d], i)
        i += 1
    return result


def _binary_pow(x: RatFunc, e: int) -> RatFunc:
    result = RatFunc.one(x.modulus)
    base = x
    while e:
        if e & 1:
            result = result * base
        e >>= 1
        if e:
            base = base * base
    return result
