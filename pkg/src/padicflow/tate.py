"""Truncated multivariate power series over Z/p^N with norm bookkeeping.

A TatePoly keeps monomials of total degree <= degree_cap; whatever gets
discarded is not forgotten: trunc_val is a certified lower bound on the
valuation of every discarded contribution, so |value error| <= p^-trunc_val
on the closed unit polydisk.  Congruence checks are made on coefficients
(the Gauss norm), never by sampling values: pointwise smallness does not
certify a map, coefficient smallness does.
"""

from __future__ import annotations

from .errors import (PrecisionExhausted, UncontrolledTruncation, UsageError)
from .padic import PadicInt, vp
from .zpoly import ZPoly

INF = float("inf")


def _parse_trunc(text):
    if text == "inf":
        return INF
    f = float(text)
    return int(f) if f == int(f) else f


def _graded_lex_key(index):
    return (sum(index), index)


class TatePoly:
    """Sparse truncated series; coefficients stored as canonical residues."""

    __slots__ = ("p", "precision", "modulus", "nvars", "degree_cap", "coeffs", "trunc_val")

    def __init__(self, p, precision, nvars, degree_cap, coeffs=None, trunc_val=INF):
        self.p = p
        self.precision = precision
        self.modulus = p ** precision
        self.nvars = nvars
        self.degree_cap = degree_cap
        self.coeffs = {}
        self.trunc_val = trunc_val
        if coeffs:
            for key, c in coeffs.items():
                if len(key) != nvars:
                    raise UsageError(f"multi-index {key} does not have {nvars} entries")
                r = (c.residue if isinstance(c, PadicInt) else int(c)) % self.modulus
                if sum(key) > degree_cap:
                    self.trunc_val = min(self.trunc_val,
                                         vp(r, p) if r else precision)
                elif r:
                    self.coeffs[tuple(key)] = r

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, p, precision, nvars, degree_cap):
        return cls(p, precision, nvars, degree_cap)

    @classmethod
    def constant(cls, p, precision, nvars, degree_cap, c):
        return cls(p, precision, nvars, degree_cap, {(0,) * nvars: c})

    @classmethod
    def variable(cls, p, precision, nvars, degree_cap, i):
        key = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(p, precision, nvars, degree_cap, {key: 1})

    @classmethod
    def from_zpoly(cls, zp, p, precision, degree_cap):
        return cls(p, precision, zp.nvars, degree_cap, zp.coeffs)

    def _blank(self, trunc_val=INF):
        return TatePoly(self.p, self.precision, self.nvars, self.degree_cap,
                        None, trunc_val)

    # -- inspection ---------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        if not self.coeffs:
            return 0
        return max(sum(k) for k in self.coeffs)

    def gauss_valuation(self):
        """min coefficient valuation; saturates at precision for the zero series."""
        if not self.coeffs:
            return self.precision
        return min(vp(c, self.p) for c in self.coeffs.values())

    def coefficient(self, index):
        return PadicInt(self.p, self.precision,
                        self.coeffs.get(tuple(index), 0), _checked=True)

    def monomials(self):
        """(index, residue) pairs in graded-lexicographic order."""
        for key in sorted(self.coeffs, key=_graded_lex_key):
            yield key, self.coeffs[key]

    def is_exact(self):
        return self.trunc_val == INF

    # -- ring structure -----------------------------------------------------

    def _check(self, other):
        if (self.p, self.precision, self.nvars) != (other.p, other.precision, other.nvars):
            raise UsageError("prime/precision/shape mismatch between series")

    def __add__(self, other):
        if isinstance(other, int):
            other = TatePoly.constant(self.p, self.precision, self.nvars,
                                      self.degree_cap, other)
        self._check(other)
        out = self._blank(min(self.trunc_val, other.trunc_val))
        out.degree_cap = min(self.degree_cap, other.degree_cap)
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            r = (acc.get(k, 0) + c) % self.modulus
            if r:
                acc[k] = r
            else:
                acc.pop(k, None)
        out.coeffs = acc
        return out

    __radd__ = __add__

    def __neg__(self):
        out = self._blank(self.trunc_val)
        out.coeffs = {k: self.modulus - c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = TatePoly.constant(self.p, self.precision, self.nvars,
                                      self.degree_cap, other)
        return self + (-other)

    def scale(self, c):
        """Multiply by a scalar (int or PadicInt)."""
        r = (c.residue if isinstance(c, PadicInt) else int(c)) % self.modulus
        vc = self.precision if r == 0 else vp(r, self.p)
        out = self._blank(self.trunc_val + vc)  # inf + int stays inf
        if r == 0:
            return out
        acc = {}
        for k, a in self.coeffs.items():
            v = a * r % self.modulus
            if v:
                acc[k] = v
        out.coeffs = acc
        return out

    def __mul__(self, other):
        if isinstance(other, int) or isinstance(other, PadicInt):
            return self.scale(other)
        self._check(other)
        cap = min(self.degree_cap, other.degree_cap)
        acc = {}
        dropped = INF
        for k1, c1 in self.coeffs.items():
            d1 = sum(k1)
            v1 = vp(c1, self.p)
            for k2, c2 in other.coeffs.items():
                if d1 + sum(k2) > cap:
                    dropped = min(dropped, v1 + vp(c2, self.p))
                    continue
                key = tuple(a + b for a, b in zip(k1, k2))
                r = (acc.get(key, 0) + c1 * c2) % self.modulus
                if r:
                    acc[key] = r
                else:
                    acc.pop(key, None)
        # hidden tails: tail(self)*other and tail(other)*self
        t = min(dropped,
                self.trunc_val + other.gauss_valuation(),
                other.trunc_val + self.gauss_valuation())
        out = TatePoly(self.p, self.precision, self.nvars, cap, None, t)
        out.coeffs = acc
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = TatePoly.constant(self.p, self.precision, self.nvars,
                                      self.degree_cap, other)
        if not isinstance(other, TatePoly):
            return NotImplemented
        return ((self.p, self.precision, self.nvars) == (other.p, other.precision, other.nvars)
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.p, self.precision, tuple(sorted(self.coeffs.items()))))

    def reduce_precision(self, precision):
        if precision > self.precision:
            raise PrecisionExhausted(
                f"cannot raise precision {self.precision} -> {precision}")
        out = TatePoly(self.p, precision, self.nvars, self.degree_cap, None,
                       min(self.trunc_val, precision) if self.trunc_val != INF else INF)
        m = self.p ** precision
        out.coeffs = {k: c % m for k, c in self.coeffs.items() if c % m}
        return out

    # -- evaluation and composition -----------------------------------------

    def evaluate(self, point):
        """Value at a point of the closed unit polydisk (PadicInt or int
        coordinates).  |g(z)| <= Gauss norm of g, always."""
        if len(point) != self.nvars:
            raise UsageError(f"need {self.nvars} coordinates, got {len(point)}")
        prec = self.precision
        for z in point:
            if isinstance(z, PadicInt):
                if z.p != self.p:
                    raise UsageError("point prime differs from series prime")
                prec = min(prec, z.precision)
        m = self.p ** prec
        coords = [z.residue % m if isinstance(z, PadicInt) else z % m for z in point]
        maxes = [0] * self.nvars
        for key in self.coeffs:
            for i, e in enumerate(key):
                if e > maxes[i]:
                    maxes[i] = e
        pows = []
        for i, z in enumerate(coords):
            row = [1] * (maxes[i] + 1)
            for e in range(1, maxes[i] + 1):
                row[e] = row[e - 1] * z % m
            pows.append(row)
        total = 0
        for key, c in self.coeffs.items():
            term = c
            for i, e in enumerate(key):
                if e:
                    term = term * pows[i][e]
            total = (total + term) % m
        return PadicInt(self.p, prec, total, _checked=True)

    def compose(self, inner):
        """self o inner for a TateMap `inner`.

        Certified modes only:
          * exact: inner is an exact polynomial map and the degree cap
            accommodates deg(self) * deg(inner) — nothing is discarded;
          * flowable: ||inner - id|| <= p^-c with c >= 1 — every discarded
            monomial's valuation is tracked exactly and lands in trunc_val.
        Anything else raises UncontrolledTruncation.
        """
        if self.nvars != inner.nvars or self.degree_cap != inner.degree_cap:
            raise UsageError("shape or degree-cap mismatch in composition")
        exact_ok = (inner.is_exact() and self.is_exact()
                    and self.degree() * max(inner.degree(), 1) <= self.degree_cap)
        if not exact_ok and inner.congruence_level() < 1:
            raise UncontrolledTruncation(
                "composition needs an exact polynomial fit under the degree cap "
                "or ||inner - id|| <= 1/p")
        acc = TatePoly(self.p, self.precision, self.nvars, self.degree_cap)
        for key, c in self.coeffs.items():
            img = inner._monomial_image(key, self.degree_cap)
            acc = acc + img.scale(c)
        # hidden tail of self survives composition without norm growth;
        # inner's own tails enter through the Lipschitz bound |g(u)-g(v)| <= ||g||*max|u-v|
        tail = min(self.trunc_val,
                   min((f.trunc_val for f in inner.components), default=INF)
                   + self.gauss_valuation())
        acc.trunc_val = min(acc.trunc_val, tail)
        return acc

    # -- serialization ------------------------------------------------------

    def to_text(self):
        t = "inf" if self.trunc_val == INF else str(self.trunc_val)
        lines = [f"tate p={self.p} N={self.precision} nvars={self.nvars} "
                 f"D={self.degree_cap} trunc_val={t}"]
        for key, c in self.monomials():
            lines.append(f"{','.join(map(str, key))}: {c}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines()
                 if ln.strip() and not ln.startswith("#")]
        head = lines[0].split()
        if not head or head[0] != "tate":
            raise UsageError("not a tate series dump")
        kv = dict(part.split("=", 1) for part in head[1:])
        t = _parse_trunc(kv["trunc_val"])
        out = cls(int(kv["p"]), int(kv["N"]), int(kv["nvars"]), int(kv["D"]),
                  None, t)
        for ln in lines[1:]:
            idx, val = ln.split(":")
            key = tuple(int(s) for s in idx.strip().split(","))
            out.coeffs[key] = int(val) % out.modulus
        return out

    def __repr__(self):
        n = len(self.coeffs)
        return (f"TatePoly(p={self.p}, N={self.precision}, nvars={self.nvars}, "
                f"{n} monomials, trunc_val={self.trunc_val})")


class TateMap:
    """Tuple of TatePolys sharing prime, precision, arity and degree cap."""

    __slots__ = ("components", "_image_cache")

    def __init__(self, components):
        components = list(components)
        if not components:
            raise UsageError("empty map")
        first = components[0]
        for c in components[1:]:
            if (c.p, c.precision, c.nvars, c.degree_cap) != \
               (first.p, first.precision, first.nvars, first.degree_cap):
                raise UsageError("map components must share p, N, nvars, degree cap")
        if len(components) != first.nvars:
            raise UsageError(f"{len(components)} components for {first.nvars} variables")
        self.components = components
        self._image_cache = None

    @property
    def p(self):
        return self.components[0].p

    @property
    def precision(self):
        return self.components[0].precision

    @property
    def nvars(self):
        return self.components[0].nvars

    @property
    def degree_cap(self):
        return self.components[0].degree_cap

    @classmethod
    def identity(cls, p, precision, nvars, degree_cap):
        return cls([TatePoly.variable(p, precision, nvars, degree_cap, i)
                    for i in range(nvars)])

    @classmethod
    def from_zpolys(cls, polys, p, precision, degree_cap):
        return cls([TatePoly.from_zpoly(zp, p, precision, degree_cap) for zp in polys])

    def degree(self):
        return max(c.degree() for c in self.components)

    def is_exact(self):
        return all(c.is_exact() for c in self.components)

    def is_identity(self):
        return all(c == TatePoly.variable(self.p, self.precision, self.nvars,
                                          self.degree_cap, i)
                   for i, c in enumerate(self.components))

    def gauss_valuation(self):
        return min(c.gauss_valuation() for c in self.components)

    def min_trunc_val(self):
        return min(c.trunc_val for c in self.components)

    def congruence_level(self):
        """Largest c with ||f - id|| <= p^-c, capped at the precision.

        Measured on coefficients, never by sampling values.
        """
        lvl = self.precision
        for i, comp in enumerate(self.components):
            xi = TatePoly.variable(self.p, self.precision, self.nvars,
                                   self.degree_cap, i)
            lvl = min(lvl, (comp - xi).gauss_valuation())
        return lvl

    def minus_identity(self):
        return [comp - TatePoly.variable(self.p, self.precision, self.nvars,
                                         self.degree_cap, i)
                for i, comp in enumerate(self.components)]

    def _monomial_image(self, key, cap):
        """Image of the monomial x^key under this map, truncated at cap.

        Built by dynamic programming down the exponent lattice and cached:
        the flow engine composes many series with the same inner map.
        """
        if self._image_cache is None:
            one = TatePoly.constant(self.p, self.precision, self.nvars, cap, 1)
            self._image_cache = {(0,) * self.nvars: one}
        cache = self._image_cache
        key = tuple(key)
        got = cache.get(key)
        if got is not None:
            return got
        # peel one exponent off the first active variable
        i = next(j for j, e in enumerate(key) if e)
        prev = list(key)
        prev[i] -= 1
        img = self._monomial_image(tuple(prev), cap) * self.components[i]
        cache[key] = img
        return img

    def compose(self, inner):
        """self o inner, componentwise (certification as in TatePoly.compose)."""
        return TateMap([c.compose(inner) for c in self.components])

    def subtract(self, other):
        return TateMap([a - b for a, b in zip(self.components, other.components)])

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def evaluate(self, point):
        return tuple(c.evaluate(point) for c in self.components)

    def reduce_precision(self, precision):
        return TateMap([c.reduce_precision(precision) for c in self.components])

    def to_text(self):
        first = self.components[0]
        lines = [f"tatemap p={first.p} N={first.precision} nvars={first.nvars} "
                 f"D={first.degree_cap} ncomp={len(self.components)}"]
        for i, comp in enumerate(self.components):
            t = "inf" if comp.trunc_val == INF else str(comp.trunc_val)
            lines.append(f"component {i} trunc_val={t}")
            for key, c in comp.monomials():
                lines.append(f"{','.join(map(str, key))}: {c}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines()
                 if ln.strip() and not ln.startswith("#")]
        head = lines[0].split()
        if not head or head[0] != "tatemap":
            raise UsageError("not a tate map dump")
        kv = dict(part.split("=", 1) for part in head[1:])
        p, n, nv, cap = int(kv["p"]), int(kv["N"]), int(kv["nvars"]), int(kv["D"])
        comps, cur = [], None
        for ln in lines[1:]:
            if ln.startswith("component"):
                parts = ln.split()
                t = parts[2].split("=", 1)[1]
                cur = TatePoly(p, n, nv, cap, None, _parse_trunc(t))
                comps.append(cur)
            else:
                idx, val = ln.split(":")
                key = tuple(int(s) for s in idx.strip().split(","))
                cur.coeffs[key] = int(val) % cur.modulus
        return cls(comps)

    def __repr__(self):
        return f"TateMap({len(self.components)} components, p={self.p}, N={self.precision})"
