"""Polynomial automorphisms, cubic-surface involutions, and torus maps.

Everything here is exact: automorphisms carry both directions as integer
polynomials and are round-trip checked symbolically at construction, so a
bad inverse cannot slip through and silently corrupt orbit computations.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (ConfigError, MapSpecError, NeedsQuadraticExtension,
                     NonUnitError, UnsupportedError, UsageError)
from .padic import PadicInt
from .tate import TateMap
from .zpoly import ZPoly

DEGREE_BOUND = 4096  # symbolic-composition guard


class PolyAuto:
    """Invertible polynomial map of affine space over Z, both directions."""

    __slots__ = ("forward", "backward", "nvars", "label", "elliptic")

    def __init__(self, forward, backward, label="", check=True, elliptic=False):
        self.forward = list(forward)
        self.backward = None if backward is None else list(backward)
        self.nvars = len(self.forward)
        self.label = label
        self.elliptic = elliptic
        if self.backward is None:
            return  # one-sided endomorphism; inverse operations will refuse
        if len(self.backward) != self.nvars:
            raise UsageError("forward/backward arity mismatch")
        if check:
            self._check_roundtrip()

    def _need_backward(self):
        if self.backward is None:
            raise UsageError(f"{self.label or 'map'} has no exact polynomial inverse")

    def _check_roundtrip(self):
        for polys_a, polys_b in ((self.forward, self.backward),
                                 (self.backward, self.forward)):
            for i in range(self.nvars):
                comp = polys_a[i].compose(polys_b, degree_bound=DEGREE_BOUND)
                if comp != ZPoly.variable(self.nvars, i):
                    raise ConfigError(
                        f"round-trip check failed on component {i} of {self.label or 'map'}")

    def inverse(self):
        self._need_backward()
        return PolyAuto(self.backward, self.forward,
                        label=f"{self.label}^-1" if self.label else "", check=False,
                        elliptic=self.elliptic)

    def degree(self):
        return max(f.degree() for f in self.forward)

    def apply(self, point, modulus=None):
        """Forward image; exact ring arithmetic, or mod `modulus` for ints."""
        if modulus is None:
            return tuple(f.evaluate(point) for f in self.forward)
        return tuple(f.eval_mod(point, modulus) for f in self.forward)

    def apply_inverse(self, point, modulus=None):
        self._need_backward()
        if modulus is None:
            return tuple(f.evaluate(point) for f in self.backward)
        return tuple(f.eval_mod(point, modulus) for f in self.backward)

    def compose(self, other):
        """self o other (apply other first)."""
        if self.nvars != other.nvars:
            raise UsageError("arity mismatch in composition")
        fwd = [f.compose(other.forward, degree_bound=DEGREE_BOUND) for f in self.forward]
        if self.backward is None or other.backward is None:
            bwd = None
        else:
            bwd = [g.compose(self.backward, degree_bound=DEGREE_BOUND)
                   for g in other.backward]
        lbl = f"{self.label}*{other.label}" if self.label and other.label else ""
        return PolyAuto(fwd, bwd, label=lbl, check=False)

    def iterate(self, point, n, modulus=None):
        """f^n(point); negative n runs the inverse."""
        if n < 0:
            self._need_backward()
        polys = self.forward if n >= 0 else self.backward
        cur = tuple(point)
        for _ in range(abs(n)):
            if modulus is None:
                cur = tuple(f.evaluate(cur) for f in polys)
            else:
                cur = tuple(f.eval_mod(cur, modulus) for f in polys)
        return cur

    def to_tate_map(self, p, precision, degree_cap=None):
        cap = degree_cap if degree_cap is not None else max(2, self.degree())
        return TateMap.from_zpolys(self.forward, p, precision, cap)

    def backward_tate_map(self, p, precision, degree_cap=None):
        self._need_backward()
        cap = degree_cap if degree_cap is not None else max(2, self.degree())
        return TateMap.from_zpolys(self.backward, p, precision, cap)

    def __repr__(self):
        return f"PolyAuto({self.label or 'unnamed'}, nvars={self.nvars}, deg={self.degree()})"


def compose_word(word, nvars=None):
    """Compose a list of PolyAuto as written: word[0] o word[1] o ...

    The rightmost map is applied first.  An empty word needs nvars and
    gives the identity.
    """
    if not word:
        if nvars is None:
            raise UsageError("empty word needs an explicit arity")
        return identity_auto(nvars)
    out = word[-1]
    for g in reversed(word[:-1]):
        out = g.compose(out)
    return out


def identity_auto(nvars):
    xs = [ZPoly.variable(nvars, i) for i in range(nvars)]
    return PolyAuto(xs, list(xs), label="id", check=False)


def henon(p_coeffs, label=""):
    """Henon-type automorphism (x, y) -> (y + P(x), x), P given low-to-high.

    deg P < 2 is allowed but flagged elliptic (degenerate degree growth).
    """
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    p_of_x = sum((c * x ** i for i, c in enumerate(p_coeffs)), ZPoly(2))
    p_of_y = sum((c * y ** i for i, c in enumerate(p_coeffs)), ZPoly(2))
    fwd = [y + p_of_x, x]
    bwd = [y, x - p_of_y]
    return PolyAuto(fwd, bwd, label=label or "henon", elliptic=p_of_x.degree() < 2)


def linear_auto(a, b, c, d, label=""):
    """(x, y) -> (ax+by, cx+dy) with det = +-1 so the inverse is integral."""
    det = a * d - b * c
    if det not in (1, -1):
        raise ConfigError(f"linear map must have determinant +-1, got {det}")
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    fwd = [a * x + b * y, c * x + d * y]
    bwd = [det * (d * x - b * y), det * (a * y - c * x)]
    return PolyAuto(fwd, bwd, label=label or "linear")


def elementary_univariate(zp, label=""):
    """A univariate polynomial endomorphism x -> g(x).

    Not necessarily invertible; flows only need an endomorphism of the disk.
    Degree-1 maps with unit leading coefficient get an exact inverse.
    """
    if zp.nvars != 1:
        raise UsageError("univariate map expected")
    elliptic = zp.degree() < 2
    if zp.degree() == 1:
        a = zp.coeffs.get((1,), 0)
        b = zp.coeffs.get((0,), 0)
        if a in (1, -1):
            x = ZPoly.variable(1, 0)
            return PolyAuto([zp], [a * (x - b)], label=label or "elem",
                            elliptic=elliptic)
    return PolyAuto([zp], None, label=label or "elem", check=False,
                    elliptic=elliptic)


# -- the cubic surface x^2+y^2+z^2+xyz = Ax+By+Cz+D and its involutions -------


class MarkovSurface:
    """x^2 + y^2 + z^2 + xyz = Ax + By + Cz + D with integer parameters."""

    __slots__ = ("A", "B", "C", "D")

    def __init__(self, A, B, C, D):
        self.A, self.B, self.C, self.D = A, B, C, D

    @property
    def params(self):
        return (self.A, self.B, self.C, self.D)

    def equation_value(self, point):
        x, y, z = point
        return (x * x + y * y + z * z + x * y * z
                - self.A * x - self.B * y - self.C * z - self.D)

    def on_surface(self, point, modulus=None):
        v = self.equation_value(point)
        if modulus is None:
            if isinstance(v, PadicInt):
                return v.is_zero()
            return v == 0
        return v % modulus == 0

    def equation_zpoly(self):
        x, y, z = (ZPoly.variable(3, i) for i in range(3))
        return (x * x + y * y + z * z + x * y * z
                - self.A * x - self.B * y - self.C * z - self.D)

    def chart_denominators(self, point):
        """The three area-form denominators (2x-A+yz, 2y-B+zx, 2z-C+xy)."""
        x, y, z = point
        return (2 * x - self.A + y * z,
                2 * y - self.B + z * x,
                2 * z - self.C + x * y)

    def __repr__(self):
        return f"MarkovSurface(A={self.A}, B={self.B}, C={self.C}, D={self.D})"


def vieta(surface, i):
    """The i-th Vieta involution (i in {1,2,3}): swap the two roots of the
    surface equation read as a quadratic in the i-th coordinate."""
    if i not in (1, 2, 3):
        raise UsageError("involution index must be 1, 2 or 3")
    x, y, z = (ZPoly.variable(3, j) for j in range(3))
    a, b, c = surface.A, surface.B, surface.C
    if i == 1:
        fwd = [a - x - y * z, y, z]
    elif i == 2:
        fwd = [x, b - y - z * x, z]
    else:
        fwd = [x, y, c - z - x * y]
    return PolyAuto(fwd, list(fwd), label=f"s{i}")


def vieta_word(surface, indices):
    """Compose Vieta involutions by index, rightmost applied first."""
    return compose_word([vieta(surface, i) for i in indices], nvars=3)


def parabolic_matrix(surface, z):
    """Matrix and translation of the z-fiber action of s1 o s2 (s2 first).

    Returns (M, T, trace, det) with M = ((z^2-1, z), (-z, -1)) flattened to
    (m11, m12, m21, m22) and T = (A - Bz, B).  det = 1 and trace = z^2 - 2
    are recomputed from the entries as a guard.
    """
    a, b = surface.A, surface.B
    one = 1 if not isinstance(z, PadicInt) else PadicInt(z.p, z.precision, 1, _checked=True)
    m11 = z * z - one
    m12 = z
    m21 = -z
    m22 = -one
    det = m11 * m22 - m12 * m21
    trace = m11 + m22
    if det != 1:
        raise ConfigError("fiber matrix determinant is not 1")
    if trace != z * z - 2:
        raise ConfigError("fiber matrix trace is not z^2 - 2")
    t = (a * one - b * z, b * one)
    return ((m11, m12, m21, m22), t, trace, det)


def fiber_affine_apply(surface, z, point2):
    """Apply the z-fiber affine action to (x, y)."""
    (m11, m12, m21, m22), (t1, t2), _, _ = parabolic_matrix(surface, z)
    x, y = point2
    return (m11 * x + m12 * y + t1, m21 * x + m22 * y + t2)


def eigenvalue_alpha(z):
    """A root alpha of alpha^2 - (z^2-2) alpha + 1 = 0 in Z_p, if one exists.

    These are the eigenvalues of the fiber matrix; the discriminant is
    z^2 (z^2 - 4).  Both roots are units (their product is 1), so absolute
    value never disambiguates; ties break to the smaller canonical residue.
    Odd-valuation or non-square discriminants raise NeedsQuadraticExtension;
    p = 2 is refused (the square criterion at 2 is different).
    """
    if not isinstance(z, PadicInt):
        raise UsageError("eigenvalue_alpha expects a PadicInt")
    p, n = z.p, z.precision
    if p == 2:
        raise UnsupportedError("eigenvalue extraction at p = 2 is not supported")
    disc = z * z * (z * z - 4)
    tr = z * z - 2
    if disc.is_zero():
        # double root (z is 0 or +-2 to this precision): alpha = trace/2
        half = pow(2, -1, p ** n)
        return PadicInt(p, n, tr.residue * half, _checked=True)
    v = disc.valuation()
    if v % 2 == 1:
        raise NeedsQuadraticExtension(f"discriminant valuation {v} is odd")
    unit = disc.residue // p ** v
    if pow(unit % p, (p - 1) // 2, p) != 1:
        raise NeedsQuadraticExtension("discriminant unit part is a non-square")
    root_unit = _sqrt_unit_mod(unit, p, n - v)
    s = root_unit * p ** (v // 2)
    prec_out = n - v // 2
    m_out = p ** prec_out
    half = pow(2, -1, m_out)
    cand = sorted(((tr.residue + s) * half % m_out,
                   (tr.residue - s) * half % m_out))
    return PadicInt(p, prec_out, cand[0], _checked=True)


def _sqrt_unit_mod(u, p, n):
    """Square root of a unit square mod p^n, p odd, by quadratic lifting."""
    r = None
    for x in range(1, p):
        if x * x % p == u % p:
            r = x
            break
    if r is None:
        raise NeedsQuadraticExtension("unit is not a square mod p")
    level = 1
    while level < n:
        level = min(2 * level, n)
        m = p ** level
        r = (r + (u - r * r) * pow(2 * r, -1, m)) % m
    return r % p ** n


def dickson_value(r, n, modulus):
    """D_n(r) with D_0 = 2, D_1 = r, D_{k+1} = r D_k - D_{k-1} (mod modulus).

    D_n(w + 1/w) = w^n + w^-n, the workhorse for finite-order tests.
    """
    a, b = 2 % modulus, r % modulus
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, (r * b - a) % modulus
    return b


def finite_order_candidates(p):
    """Divisors of lcm(p^2 - 1, 2p): every root-of-unity order available in
    a quadratic extension of the p-adic field divides this."""
    l = math.lcm(p * p - 1, 2 * p)
    divs = set()
    d = 1
    while d * d <= l:
        if l % d == 0:
            divs.add(d)
            divs.add(l // d)
        d += 1
    return sorted(divs)


def is_finite_order_mobius(r):
    """Is r of the form w + 1/w for a root of unity w, at precision N?

    Checks D_n(r) = 2 mod p^N over all candidate orders n.  A non-match is
    a certified "no": the true value of D_n at a root-of-unity trace is
    exactly 2, which would survive reduction.  A match is a precision-N
    statement; the returned dict carries the matched order and the precision
    so callers can raise N when they need a stronger claim.
    """
    if not isinstance(r, PadicInt):
        raise UsageError("is_finite_order_mobius expects a PadicInt")
    m = r.modulus
    for n in finite_order_candidates(r.p):
        if dickson_value(r.residue, n, m) == 2 % m:
            return {"finite": True, "order": n, "precision": r.precision}
    return {"finite": False, "order": None, "precision": r.precision}


# -- monomial maps on the unit torus -------------------------------------------


class MonomialAuto:
    """(v1, v2) -> (alpha v1^a v2^b, beta v1^c v2^d) with det +-1 exponents."""

    __slots__ = ("matrix", "alpha", "beta")

    def __init__(self, matrix, alpha=1, beta=1):
        (a, b), (c, d) = matrix
        if abs(a * d - b * c) != 1:
            raise ConfigError("exponent matrix must have determinant +-1")
        if isinstance(alpha, PadicInt) and not alpha.is_unit():
            raise NonUnitError("alpha must be a unit")
        if isinstance(beta, PadicInt) and not beta.is_unit():
            raise NonUnitError("beta must be a unit")
        self.matrix = ((a, b), (c, d))
        self.alpha = alpha
        self.beta = beta

    def apply(self, v):
        v1, v2 = v
        for coord in (v1, v2):
            if isinstance(coord, PadicInt) and not coord.is_unit():
                raise NonUnitError("monomial maps act on unit coordinates only")
        (a, b), (c, d) = self.matrix
        return (self.alpha * v1 ** a * v2 ** b,
                self.beta * v1 ** c * v2 ** d)

    def apply_inverse(self, w):
        """Solve w = apply(v) for v using the inverse exponent matrix."""
        w1, w2 = w
        (a, b), (c, d) = self.matrix
        det = a * d - b * c
        u1 = w1 * _unit_inverse(self.alpha)
        u2 = w2 * _unit_inverse(self.beta)
        return (u1 ** (det * d) * u2 ** (-det * b),
                u1 ** (-det * c) * u2 ** (det * a))

    def __repr__(self):
        (a, b), (c, d) = self.matrix
        return f"MonomialAuto([[{a},{b}],[{c},{d}]], alpha={self.alpha}, beta={self.beta})"


def _unit_inverse(x):
    if isinstance(x, PadicInt):
        return x.invert()
    if isinstance(x, int):
        if abs(x) != 1:
            raise NonUnitError(f"integer scale {x} has no integral inverse")
        return x
    return Fraction(1, 1) / x


def monomial_apply(mono, v):
    """Forward action of a MonomialAuto on a coordinate pair."""
    return mono.apply(v)


def torsion_test(u):
    """Is the unit u a (p-1)-th root of unity mod p^N (a Teichmuller value)?"""
    if not isinstance(u, PadicInt):
        raise UsageError("torsion_test expects a PadicInt")
    if u.p == 2:
        raise UnsupportedError("torsion test at p = 2 is not supported")
    if not u.is_unit():
        raise NonUnitError("torsion test needs a unit")
    return (u ** (u.p - 1)).residue == 1 % u.modulus


def cayley_project(v):
    """Send unit torus coordinates onto the cubic surface with D = 4:

    (v1, v2) -> -(v1 + 1/v1, v2 + 1/v2, v1 v2 + 1/(v1 v2)).
    """
    v1, v2 = v
    w = v1 * v2
    return (-(v1 + _unit_inverse(v1)),
            -(v2 + _unit_inverse(v2)),
            -(w + _unit_inverse(w)))


def degree_sequence(auto, n_max, degree_bound=DEGREE_BOUND):
    """[deg f, deg f^2, ..., deg f^n_max] by exact symbolic composition."""
    seq = []
    cur = [ZPoly.variable(auto.nvars, i) for i in range(auto.nvars)]
    for _ in range(n_max):
        cur = [f.compose(cur, degree_bound=degree_bound) for f in auto.forward]
        seq.append(max(f.degree() for f in cur))
    return seq


# -- named maps -----------------------------------------------------------------


def bgs_g1():
    """(x, y) -> (y + x^2 + 5, -x): the quadratic generator of the scan group."""
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    return PolyAuto([y + x * x + 5, -x],
                    [-y, x - y * y - 5], label="g1")


def bgs_h0():
    """The hyperbolic linear map (x, y) -> (2x + y, x + y)."""
    return linear_auto(2, 1, 1, 1, label="h0")


def bgs_g2():
    """(x, y) -> (-y, x + y^3 + 2): the cubic scan generator."""
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    return PolyAuto([-y, x + y * y * y + 2],
                    [y + x * x * x - 2, -x], label="g2")


def bgs_g3():
    """g2 o h0 o g1 (apply g1 first)."""
    g = compose_word([bgs_g2(), bgs_h0(), bgs_g1()])
    g.label = "g3"
    return g


def bgs_group():
    """The two-generator group of the transitivity scans: <g1, h0 g1 h0^-1>."""
    g = bgs_g1()
    h = bgs_h0()
    conj = compose_word([h, g, h.inverse()])
    conj.label = "h0*g1*h0^-1"
    return [g, conj]


_NAMED = {
    "bgs-g1": bgs_g1,
    "bgs-g2": bgs_g2,
    "bgs-g3": bgs_g3,
    "bgs-h0": bgs_h0,
}


# -- map-spec mini-grammar --------------------------------------------------------
#
#   henon:<c0,c1,...>        Henon with P(x) = c0 + c1 x + ... (low-to-high)
#   linear:<a,b,c,d>         (ax+by, cx+dy), det +-1
#   elem:<poly in x>         univariate, e.g. elem:x+9 or elem:x^2+3*x
#   vieta:<i>@markov:<A,B,C,D>
#   word:<spec o spec o ...> composition, rightmost applied first
#                            (separator: standalone 'o' or the ring symbol)
#   bgs-g1 | bgs-g2 | bgs-g3 | bgs-h0
#
# Parse errors carry the character position within the original string.


def parse_map_spec(text):
    """Parse one map-spec string into a PolyAuto; errors carry the position."""
    return _parse_spec(text, 0)


def _parse_spec(text, base):
    s = text.strip()
    base += len(text) - len(text.lstrip())
    if not s:
        raise MapSpecError("empty map spec", base)
    if s in _NAMED:
        return _NAMED[s]()
    if ":" not in s:
        raise MapSpecError(f"unknown map name {s!r}", base)
    head, rest = s.split(":", 1)
    rest_base = base + len(head) + 1
    if head == "henon":
        return henon(_parse_int_list(rest, rest_base), label=s)
    if head == "linear":
        vals = _parse_int_list(rest, rest_base)
        if len(vals) != 4:
            raise MapSpecError("linear needs exactly 4 integers", rest_base)
        try:
            return linear_auto(*vals, label=s)
        except ConfigError as e:
            raise MapSpecError(str(e), rest_base) from None
    if head == "elem":
        return elementary_univariate(_parse_poly_expr(rest, rest_base), label=s)
    if head == "vieta":
        return _parse_vieta(rest, rest_base)
    if head == "word":
        return _parse_word(rest, rest_base)
    raise MapSpecError(f"unknown map kind {head!r}", base)


def _parse_vieta(rest, rest_base):
    if "@" not in rest:
        raise MapSpecError("vieta needs @markov:<A,B,C,D>", rest_base)
    idx_s, surf_s = rest.split("@", 1)
    surf_base = rest_base + len(idx_s) + 1
    try:
        idx = int(idx_s)
    except ValueError:
        raise MapSpecError(f"bad involution index {idx_s!r}", rest_base) from None
    if idx not in (1, 2, 3):
        raise MapSpecError("involution index must be 1, 2 or 3", rest_base)
    if not surf_s.startswith("markov:"):
        raise MapSpecError("expected markov:<A,B,C,D> after @", surf_base)
    params = _parse_int_list(surf_s[len("markov:"):], surf_base + len("markov:"))
    if len(params) != 4:
        raise MapSpecError("markov needs exactly 4 integers", surf_base + len("markov:"))
    return vieta(MarkovSurface(*params), idx)


def _parse_word(rest, rest_base):
    norm = rest.replace("∘", "o")
    parts = []
    token_start = 0
    i = 0
    while i <= len(norm):
        at_sep = i < len(norm) and norm[i] == "o" and _is_operator_o(norm, i)
        if i == len(norm) or at_sep:
            token = norm[token_start:i]
            if token.strip():
                parts.append((token, rest_base + token_start))
            elif at_sep or parts:
                # every separator needs a map on both sides
                raise MapSpecError("dangling composition separator",
                                   rest_base + (i if at_sep else token_start))
            token_start = i + 1
        i += 1
    if not parts:
        raise MapSpecError("empty word", rest_base)
    maps = [_parse_spec(t, b) for t, b in parts]
    arity = maps[0].nvars
    for mp, (t, b) in zip(maps, parts):
        if mp.nvars != arity:
            raise MapSpecError(f"arity mismatch in word at {t.strip()!r}", b)
    return compose_word(maps)


def _is_operator_o(s, i):
    # a separator 'o' stands alone: not glued to a name like 'henon'
    prev_ok = i == 0 or not (s[i - 1].isalnum() or s[i - 1] in "-_")
    nxt_ok = i + 1 >= len(s) or not (s[i + 1].isalnum() or s[i + 1] in "-_")
    return prev_ok and nxt_ok


def _parse_int_list(s, base):
    out = []
    pos = base
    for part in s.split(","):
        t = part.strip()
        if not t:
            raise MapSpecError("empty integer entry", pos)
        try:
            out.append(int(t))
        except ValueError:
            raise MapSpecError(f"bad integer {t!r}", pos) from None
        pos += len(part) + 1
    return out


def _parse_poly_expr(s, base):
    """Tiny univariate polynomial parser: ints, x, + - * ^ and parentheses."""
    tokens = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            tokens.append(("int", int(s[i:j]), base + i))
            i = j
        elif ch == "x":
            tokens.append(("var", "x", base + i))
            i += 1
        elif ch in "+-*^()":
            tokens.append((ch, ch, base + i))
            i += 1
        else:
            raise MapSpecError(f"unexpected character {ch!r}", base + i)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else (None, None, base + len(s))

    def take():
        tok = peek()
        pos[0] += 1
        return tok

    def atom():
        kind, val, at = peek()
        if kind == "int":
            take()
            return ZPoly.constant(1, val)
        if kind == "var":
            take()
            return ZPoly.variable(1, 0)
        if kind == "(":
            take()
            e = expr()
            if peek()[0] != ")":
                raise MapSpecError("missing closing parenthesis", peek()[2])
            take()
            return e
        if kind == "-":
            take()
            return -atom()
        raise MapSpecError("expected a number, x, or parenthesis", at)

    def factor():
        e = atom()
        while peek()[0] == "^":
            take()
            kind, val, at = take()
            if kind != "int":
                raise MapSpecError("exponent must be an integer literal", at)
            e = e ** val
        return e

    def term():
        e = factor()
        while peek()[0] == "*":
            take()
            e = e * factor()
        return e

    def expr():
        e = term()
        while peek()[0] in ("+", "-"):
            op = take()[0]
            rhs = term()
            e = e + rhs if op == "+" else e - rhs
        return e

    out = expr()
    if pos[0] != len(tokens):
        raise MapSpecError("trailing input", peek()[2])
    return out
