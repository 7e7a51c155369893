"""Sparse multivariate polynomials with exact integer coefficients.

The symbolic backbone for polynomial automorphisms: composition here is
exact (no truncation), so round-trip checks and degree sequences mean what
they say.  Evaluation is generic over any commutative ring whose elements
support + and * with ints (int, Fraction, PadicInt).
"""

from __future__ import annotations

from .errors import DegreeOverflow, UsageError


def _add_into(acc, key, c):
    v = acc.get(key)
    if v is None:
        acc[key] = c
    else:
        v += c
        if v:
            acc[key] = v
        else:
            del acc[key]


class ZPoly:
    """Polynomial in Z[x_0, ..., x_{nvars-1}], sparse dict of multi-indices."""

    __slots__ = ("nvars", "coeffs")

    def __init__(self, nvars, coeffs=None):
        self.nvars = nvars
        self.coeffs = {}
        if coeffs:
            for key, c in coeffs.items():
                if len(key) != nvars:
                    raise UsageError(f"multi-index {key} does not have {nvars} entries")
                if c:
                    self.coeffs[tuple(key)] = int(c)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        if not 0 <= i < nvars:
            raise UsageError(f"variable index {i} out of range for {nvars} variables")
        key = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {key: 1})

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        """Total degree; 0 for the zero polynomial and constants."""
        if not self.coeffs:
            return 0
        return max(sum(k) for k in self.coeffs)

    def _check(self, other):
        if self.nvars != other.nvars:
            raise UsageError(f"variable-count mismatch {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if isinstance(other, int):
            other = ZPoly.constant(self.nvars, other)
        self._check(other)
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            _add_into(acc, k, c)
        out = ZPoly(self.nvars)
        out.coeffs = acc
        return out

    __radd__ = __add__

    def __neg__(self):
        out = ZPoly(self.nvars)
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = ZPoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            out = ZPoly(self.nvars)
            if other:
                out.coeffs = {k: c * other for k, c in self.coeffs.items()}
            return out
        self._check(other)
        acc = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                _add_into(acc, key, c1 * c2)
        out = ZPoly(self.nvars)
        out.coeffs = acc
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise UsageError("negative power of a polynomial")
        out = ZPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = ZPoly.constant(self.nvars, other)
        if not isinstance(other, ZPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.coeffs.items()))))

    def compose(self, fs, degree_bound=None):
        """Substitute fs[i] for x_i, exactly.

        degree_bound guards runaway symbolic blow-up (DegreeOverflow).
        """
        if len(fs) != self.nvars:
            raise UsageError(f"need {self.nvars} substitution polynomials, got {len(fs)}")
        if degree_bound is not None:
            worst = self.degree() * max((f.degree() for f in fs), default=0)
            if worst > degree_bound:
                raise DegreeOverflow(f"composition degree {worst} exceeds bound {degree_bound}")
        nv = fs[0].nvars if fs else self.nvars
        pow_cache = [[ZPoly.constant(nv, 1)] for _ in range(self.nvars)]

        def power(i, e):
            cache = pow_cache[i]
            while len(cache) <= e:
                cache.append(cache[-1] * fs[i])
            return cache[e]

        acc = ZPoly(nv)
        for key, c in self.coeffs.items():
            term = ZPoly.constant(nv, c)
            for i, e in enumerate(key):
                if e:
                    term = term * power(i, e)
            acc = acc + term
        return acc

    def evaluate(self, vals):
        """Evaluate at a point in any ring with int-compatible + and *."""
        if len(vals) != self.nvars:
            raise UsageError(f"need {self.nvars} coordinates, got {len(vals)}")
        total = 0
        for key, c in self.coeffs.items():
            term = c
            for v, e in zip(vals, key):
                for _ in range(e):
                    term = term * v
            total = total + term
        return total

    def eval_mod(self, vals, m):
        """Evaluate at integer coordinates mod m (scalar fast path)."""
        total = 0
        for key, c in self.coeffs.items():
            term = c % m
            for v, e in zip(vals, key):
                if e:
                    term = term * pow(v, e, m) % m
            total = (total + term) % m
        return total

    def max_exponents(self):
        out = [0] * self.nvars
        for key in self.coeffs:
            for i, e in enumerate(key):
                if e > out[i]:
                    out[i] = e
        return out

    def reduce_coeffs(self, m):
        """Coefficients reduced mod m (still a ZPoly, for display/transport)."""
        out = ZPoly(self.nvars)
        out.coeffs = {k: c % m for k, c in self.coeffs.items() if c % m}
        return out

    def __repr__(self):
        if not self.coeffs:
            return "ZPoly(0)"
        names = "xyzuvw"
        parts = []
        for key in sorted(self.coeffs, key=lambda k: (sum(k), k), reverse=True):
            c = self.coeffs[key]
            mono = "*".join(
                (names[i] if i < 6 else f"x{i}") + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(key) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "ZPoly(" + " + ".join(parts) + ")"
