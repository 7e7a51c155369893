"""Fixed-precision arithmetic in Z_p.

Values are cosets a + p^N Z_p stored as the canonical residue in [0, p^N).
All ring operations are exact modulo p^N; the only precision-losing
operations are explicit divisions, which return a value at the reduced
precision instead of silently pretending.
"""

from __future__ import annotations

import math

from .errors import ConfigError, NonUnitError, PrecisionExhausted, UnsupportedError, UsageError

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, exact for every n below 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = ((d & -d).bit_length()) - 1
    d >>= r
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def vp(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is not a finite integer")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_factorial(k, p):
    """v_p(k!) by Legendre: (k - digit sum of k in base p) / (p - 1)."""
    s, m = 0, k
    while m:
        s += m % p
        m //= p
    return (k - s) // (p - 1)


class PadicInt:
    """An element of Z_p known exactly modulo p**precision.

    Immutable by convention.  Mixed arithmetic with plain ints treats the
    int as exactly known.  Operations between two PadicInt values require
    the same prime and reduce to the smaller precision.
    """

    __slots__ = ("p", "precision", "modulus", "residue")

    def __init__(self, p, precision, residue, _checked=False):
        if not _checked:
            if not isinstance(precision, int) or precision < 1:
                raise ConfigError(f"precision must be a positive integer, got {precision!r}")
            if not is_prime(p):
                raise ConfigError(f"p = {p!r} is not prime")
        self.p = p
        self.precision = precision
        self.modulus = p ** precision
        self.residue = residue % self.modulus

    @classmethod
    def from_integer(cls, n, p, precision):
        return cls(p, precision, n)

    def _make(self, residue, precision=None):
        return PadicInt(self.p, self.precision if precision is None else precision,
                        residue, _checked=True)

    # -- inspection ---------------------------------------------------------

    def valuation(self):
        """v_p of the residue; returns precision itself for 0, read ">= precision"."""
        if self.residue == 0:
            return self.precision
        return vp(self.residue, self.p)

    def is_zero(self):
        return self.residue == 0

    def is_unit(self):
        return self.residue % self.p != 0

    def lift(self):
        """Canonical integer representative in [0, p^N)."""
        return self.residue

    def lift_signed(self):
        """Representative in (-p^N/2, p^N/2], handy for display."""
        return self.residue if self.residue * 2 <= self.modulus else self.residue - self.modulus

    def reduce(self, level):
        """Residue mod p^level (level <= precision)."""
        if level > self.precision:
            raise UsageError(f"cannot reduce to level {level} from precision {self.precision}")
        return self.residue % self.p ** level

    def with_precision(self, precision):
        """Truncate to a smaller precision."""
        if precision > self.precision:
            raise PrecisionExhausted(
                f"cannot raise precision {self.precision} -> {precision} on a coset")
        return PadicInt(self.p, precision, self.residue, _checked=True)

    def unit_part(self):
        """u with self = p^v * u; precision drops by v."""
        v = self.valuation()
        if v >= self.precision:
            raise NonUnitError("unit part of 0 at this precision")
        return PadicInt(self.p, self.precision - v, self.residue // self.p ** v, _checked=True)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise UsageError(f"mixed primes {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return PadicInt(self.p, self.precision, other, _checked=True)
        return None

    def _binop(self, other, fn):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.precision, o.precision)
        m = self.p ** n
        return PadicInt(self.p, n, fn(self.residue, o.residue) % m, _checked=True)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return self._make(-self.residue)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        return self._make(pow(self.residue, k, self.modulus))

    def invert(self):
        """Inverse of a unit mod p^N."""
        if not self.is_unit():
            raise NonUnitError(f"{self} is not a unit")
        return self._make(pow(self.residue, -1, self.modulus))

    def div_exact(self, k):
        """Exact division by a nonzero integer k = p^v * u.

        Requires valuation >= v; the result is known only mod p^(N - v).
        """
        if k == 0:
            raise ZeroDivisionError("division by zero")
        sign = -1 if k < 0 else 1
        k = abs(k)
        v = vp(k, self.p) if k % self.p == 0 else 0
        u = k // self.p ** v
        if v:
            if self.valuation() < v:
                raise NonUnitError(f"valuation {self.valuation()} < {v}: not divisible by p^{v}")
            if self.precision - v < 1:
                raise PrecisionExhausted(f"division by p^{v} leaves no digits")
        n = self.precision - v
        m = self.p ** n
        r = (self.residue // self.p ** v) * pow(u, -1, m) * sign % m
        return PadicInt(self.p, n, r, _checked=True)

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.precision, o.precision)
        m = self.p ** n
        return self.residue % m == o.residue % m

    def __hash__(self):
        # consistent with == only among equal-precision values; that is the
        # only context where we key containers by PadicInt
        return hash((self.p, self.precision, self.residue))

    def __repr__(self):
        return f"PadicInt({self.residue} + O({self.p}^{self.precision}))"


def teichmuller(a):
    """Teichmuller lift: the unique (p-1)-th root of unity congruent to a mod p.

    Newton/Frobenius iteration w <- w^p converges quadratically; p = 2 is
    refused (the lift is just the sign and the iteration below degenerates).
    """
    if not isinstance(a, PadicInt):
        raise UsageError("teichmuller expects a PadicInt")
    if a.p == 2:
        raise UnsupportedError("teichmuller lift not supported at p = 2")
    if not a.is_unit():
        raise NonUnitError("teichmuller lift of a non-unit")
    w = a.residue
    m = a.modulus
    for _ in range(a.precision + 1):
        w2 = pow(w, a.p, m)
        if w2 == w:
            break
        w = w2
    return PadicInt(a.p, a.precision, w, _checked=True)


GUARD_CAP = 4096  # digits; binomials needing more guard than this are refused


def binom_padic(t, k, guard_cap=GUARD_CAP):
    """Binomial coefficient C(t, k) of the canonical lift of t, mod p^N.

    The falling factorial is accumulated at guard precision N + v_p(k!) so
    the exact division by k! loses nothing: the result is C(lift(t), k)
    correct mod p^N.  (As a function of the coset t + p^N Z_p the binomial
    is only determined mod p^(N - v_p(k!)); callers that sum against terms
    of valuation >= c*k, as the flow engine does, absorb exactly that.)
    """
    if not isinstance(t, PadicInt):
        raise UsageError("binom_padic expects a PadicInt; use math.comb for exact ints")
    if k < 0:
        raise UsageError("k must be >= 0")
    if k == 0:
        return PadicInt(t.p, t.precision, 1, _checked=True)
    p, n = t.p, t.precision
    v = vp_factorial(k, p)
    if n + v > guard_cap:
        raise PrecisionExhausted(f"guard precision {n + v} exceeds cap {guard_cap}")
    big = p ** (n + v)
    ff = 1
    r = t.residue
    for j in range(k):
        ff = ff * ((r - j) % big) % big
    unit = math.factorial(k) // p ** v
    m = p ** n
    res = (ff // p ** v) * pow(unit, -1, m) % m
    return PadicInt(p, n, res, _checked=True)
