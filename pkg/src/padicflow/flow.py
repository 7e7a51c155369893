"""One-parameter p-adic interpolation of iteration (analytic flows).

For an endomorphism f of the unit polydisk with ||f - id|| <= p^-c and
c > 1/(p-1), the iterates n -> f^n extend to a Z_p-analytic flow
Phi^t = sum_k C(t,k) Delta_k with Delta_0 = id and
Delta_k = Delta_{k-1} o f - Delta_{k-1}.  The operator norm gives
||Delta_k|| <= p^-ck, so truncating at K with (c - 1/(p-1)) K >= N leaves
errors below the target precision; binomial denominators and the log-series
division by k are absorbed by guard digits added up front.
"""

from __future__ import annotations

import itertools

from .errors import (FlowInvariantError, NotFlowable, NotRescalable,
                     PrecisionExhausted, UsageError)
from .padic import PadicInt, vp, vp_factorial
from .tate import INF, TateMap, TatePoly


def congruence_level(f):
    """Largest c with ||f - id|| <= p^-c, capped at the working precision."""
    return f.congruence_level()


def is_flowable(f):
    """c >= 1 suffices for p >= 3; p = 2 needs c >= 2 (else 1/(p-1) is not beaten)."""
    c = f.congruence_level()
    return c >= (2 if f.p == 2 else 1)


def series_length(n_target, c, p):
    """Smallest K with (c - 1/(p-1)) * K >= N, in exact rationals."""
    num = n_target * (p - 1)
    den = c * (p - 1) - 1
    if den <= 0:
        raise NotFlowable(f"congruence level {c} does not beat 1/(p-1) at p={p}")
    return -(-num // den)


def guard_digits(k_top, p):
    """Digits lost to binomial denominators and the log-series division by k."""
    logk = 0
    q = 1
    while q < k_top:
        q *= p
        logk += 1
    return logk + -(-k_top // (p - 1))


def flow_degree_cap(n_work, c, deg_f):
    """Degree cap making every discarded monomial provably negligible.

    Through flowable compositions a monomial of degree d picks up valuation
    >= c * (d-1)/(deg_f - 1), so capping at D with c*D/(deg_f-1) > n_work
    keeps all discarded terms below the radar.  Affine maps never raise
    degree; any cap >= 1 works there.
    """
    if deg_f <= 1:
        return 2
    return (deg_f - 1) * (-(-n_work // c)) + 1


def rescale(f, r):
    """Conjugate by x -> p^r x:  g(x) = p^-r f(p^r x).

    Preconditions (checked on coefficients): the constant part A_0 and the
    linear-part defect A_1 - id both have valuation >= 2r.  The result then
    has congruence level >= r and is returned at precision N - r (dividing
    the constant term by p^r costs r digits).
    """
    if r < 1:
        raise UsageError("rescale needs r >= 1")
    p = f.p
    n_out = f.precision - r
    if n_out < 1:
        raise PrecisionExhausted(f"precision {f.precision} too small to rescale by r={r}")
    comps = []
    for i, comp in enumerate(f.components):
        for key, c in comp.coeffs.items():
            deg = sum(key)
            if deg == 0 and vp(c, p) < 2 * r:
                raise NotRescalable(
                    f"constant part of component {i} has valuation {vp(c, p)} < {2*r}; "
                    "restrict to a smaller disk or a finite-index subgroup first")
            if deg == 1:
                is_diag = key[i] == 1
                defect = (c - 1) % comp.modulus if is_diag else c
                if defect and vp(defect, p) < 2 * r:
                    raise NotRescalable(
                        f"linear part of component {i} is not id mod p^{2*r}")
        out = TatePoly(p, n_out, f.nvars, comp.degree_cap)
        m_out = p ** n_out
        for key, c in comp.coeffs.items():
            deg = sum(key)
            if deg == 0:
                res = (c // p ** r) % m_out
            else:
                res = c * p ** (r * (deg - 1)) % m_out
            if res:
                out.coeffs[key] = res
        t = comp.trunc_val
        out.trunc_val = t - r if t != INF else INF
        comps.append(out)
    return TateMap(comps)


class FlowSeries:
    """The finite Mahler data of a flow: f, its Delta_k, and the bookkeeping.

    target_precision is what evaluations certify; work_precision carries the
    guard digits that pay for binomial and log denominators.
    """

    __slots__ = ("f", "inverse", "c", "K", "deltas", "target_precision",
                 "work_precision", "guard", "loss")

    def __init__(self, f, inverse, c, deltas, target_precision, work_precision, loss):
        self.f = f
        self.inverse = inverse
        self.c = c
        self.deltas = deltas
        self.K = len(deltas) - 1
        self.target_precision = target_precision
        self.work_precision = work_precision
        self.guard = work_precision - target_precision
        self.loss = loss

    @property
    def p(self):
        return self.f.p

    def at_point(self, point):
        """Freeze the Delta_k values at one point; evaluations in t are then cheap."""
        return PointFlow(self, point)

    def __repr__(self):
        return (f"FlowSeries(p={self.p}, c={self.c}, K={self.K}, "
                f"N={self.target_precision}+{self.guard})")


def build_flow(f, target_precision, inverse=None):
    """Construct the flow of a flowable TateMap.

    f must be built with at least target_precision + guard digits (the
    guard is computable from the congruence level; `flow_from_zpolys` does
    the bookkeeping for exact polynomial inputs).  Each Delta_k is checked
    against the certified valuation floor c*k on coefficients; a failure is
    a build bug, not bad input.
    """
    c = f.congruence_level()
    if c < (2 if f.p == 2 else 1):
        raise NotFlowable(
            f"congruence level {c} at p={f.p} (need >= {'2' if f.p == 2 else '1'}); "
            "rescale or restrict first")
    if c >= f.precision:
        # f is the identity to the working precision: trivial flow
        ident = TateMap.identity(f.p, f.precision, f.nvars, f.degree_cap)
        n = min(target_precision, f.precision)
        return FlowSeries(f, inverse, c, [ident], n, f.precision, 0)
    k_top = series_length(target_precision, c, f.p)
    guard = guard_digits(k_top, f.p)
    n_work = target_precision + guard
    if f.precision < n_work:
        raise PrecisionExhausted(
            f"flow at target {target_precision} needs the map at precision "
            f">= {n_work} (= target + guard {guard}); got {f.precision}")
    fw = f if f.precision == n_work else f.reduce_precision(n_work)
    deltas = [TateMap.identity(fw.p, n_work, fw.nvars, fw.degree_cap)]
    prev = deltas[0]
    for k in range(1, k_top + 1):
        cur = prev.compose(fw).subtract(prev)
        floor = min(c * k, n_work)
        got = cur.gauss_valuation()
        if got < floor:
            raise FlowInvariantError(
                f"Delta_{k} has Gauss valuation {got} < certified floor {floor}")
        if cur.min_trunc_val() < target_precision:
            raise PrecisionExhausted(
                f"degree cap {fw.degree_cap} too small: truncation error "
                f"p^-{cur.min_trunc_val()} above target at Delta_{k}")
        deltas.append(cur)
        if cur.is_zero():
            break
        prev = cur
    return FlowSeries(fw, inverse, c, deltas, target_precision, n_work, 0)


def flow_from_zpolys(forward, p, target_precision, backward=None):
    """Flow of an exact integer polynomial map; handles guard sizing.

    backward, if given, is the exact inverse (used by negative-time checks).
    """
    probe = TateMap.from_zpolys(forward, p, target_precision,
                                max(2, max(f.degree() for f in forward)))
    c = probe.congruence_level()
    if c < (2 if p == 2 else 1):
        raise NotFlowable(f"congruence level {c} at p={p}")
    if c >= target_precision:
        return build_flow(probe, target_precision,
                          _zpolys_to_map(backward, p, target_precision, probe.degree_cap))
    k_top = series_length(target_precision, c, p)
    n_work = target_precision + guard_digits(k_top, p)
    deg = max(f.degree() for f in forward)
    cap = flow_degree_cap(n_work, c, deg)
    fmap = TateMap.from_zpolys(forward, p, n_work, cap)
    return build_flow(fmap, target_precision,
                      _zpolys_to_map(backward, p, n_work, cap))


def _zpolys_to_map(polys, p, precision, cap):
    if polys is None:
        return None
    return TateMap.from_zpolys(polys, p, precision, cap)


class PointFlow:
    """Delta_k values frozen at a point; eval(t) is a short dot product."""

    __slots__ = ("flow", "point", "values", "point_precision")

    def __init__(self, flow, point):
        self.flow = flow
        self.point = point
        prec = flow.work_precision
        for z in point:
            if isinstance(z, PadicInt):
                prec = min(prec, z.precision)
        self.point_precision = prec
        self.values = [tuple(v.residue for v in d.evaluate(point))
                       for d in flow.deltas]

    def eval(self, t):
        """Phi^t(point).

        t may be an int (negative fine: binomials are exact integers) or a
        PadicInt; the result precision is min(target, precision of t and of
        the point coordinates).
        """
        fl = self.flow
        p, n_work = fl.p, fl.work_precision
        out_prec = min(fl.target_precision, self.point_precision)
        if isinstance(t, PadicInt):
            if t.p != p:
                raise UsageError("time parameter has the wrong prime")
            out_prec = min(out_prec, t.precision)
            r = t.residue
        elif isinstance(t, int):
            r = t
        else:
            raise UsageError("time must be an int or PadicInt")
        k_top = fl.K
        big = p ** (n_work + vp_factorial(k_top, p))
        m = p ** n_work
        acc = list(self.values[0])
        ff = 1           # falling factorial r(r-1)...(r-k+1) mod big
        v_fact = 0       # v_p(k!)
        unit = 1         # k! / p^v_fact mod m
        for k in range(1, k_top + 1):
            ff = ff * ((r - k + 1) % big) % big
            vk = vp(k, p) if k % p == 0 else 0
            v_fact += vk
            unit = unit * (k // p ** vk) % m
            binom = (ff // p ** v_fact) * pow(unit, -1, m) % m
            if binom == 0:
                continue
            vals = self.values[k]
            for i in range(len(acc)):
                acc[i] = (acc[i] + binom * vals[i]) % m
        mod_out = p ** out_prec
        return tuple(PadicInt(p, out_prec, a % mod_out, _checked=True) for a in acc)


def flow_eval(flow, t, point):
    """Phi^t(point) — convenience wrapper; loops should use flow.at_point."""
    return flow.at_point(point).eval(t)


def theta_field(flow):
    """The generating vector field Theta = sum_{k>=1} ((-1)^{k-1}/k) Delta_k.

    Division by k costs v_p(k) digits per term; the guard absorbs it, so the
    result is returned at the flow's target precision.  Theta vanishes (is
    zero) for the identity flow.
    """
    fl = flow
    p = fl.p
    nvars = fl.f.nvars
    if fl.K == 0:
        return TateMap([TatePoly.zero(p, fl.target_precision, nvars, fl.f.degree_cap)
                        for _ in range(nvars)])
    max_v = max((vp(k, p) if k % p == 0 else 0) for k in range(1, fl.K + 1))
    n_min = fl.work_precision - max_v
    out_prec = min(fl.target_precision, n_min)
    m_min = p ** n_min
    comps = None
    for k in range(1, fl.K + 1):
        sign = 1 if k % 2 == 1 else -1
        vk = vp(k, p) if k % p == 0 else 0
        scaled = []
        for comp in fl.deltas[k].components:
            # divide at full work precision, then state the result at n_min
            tp = TatePoly(p, n_min, comp.nvars, comp.degree_cap, None,
                          comp.trunc_val - vk)  # inf stays inf
            for key, c in comp.coeffs.items():
                q = PadicInt(p, fl.work_precision, c, _checked=True).div_exact(sign * k)
                r = q.residue % m_min
                if r:
                    tp.coeffs[key] = r
            scaled.append(tp)
        if comps is None:
            comps = scaled
        else:
            comps = [a + b for a, b in zip(comps, scaled)]
    return TateMap([c.reduce_precision(out_prec) for c in comps])


def trajectory(flow, point, level):
    """{Phi^t(point) mod p^level : t in Z/p^level} as a set of residue tuples.

    With c >= 1 the flow mod p^level only depends on t mod p^level, so this
    is the full closure of the iteration orbit at that resolution.
    """
    if level > flow.target_precision:
        raise UsageError(f"level {level} above flow target precision")
    pf = flow.at_point(point)
    out = set()
    for t in range(flow.p ** level):
        out.add(tuple(z.reduce(level) for z in pf.eval(t)))
    return out


def verify_interpolation(flow, point, n_max, level):
    """Check Phi^n = f^n mod p^level for n in [-n_max, n_max].

    Forward times compare against plain iteration of f.  Negative times use
    the stored inverse map when available, and otherwise the representative
    consistency check Phi^{-n}(f^n(x)) = x.  Returns (ok, mismatches).
    """
    pf = flow.at_point(point)
    mismatches = []
    cur = tuple(point)
    for n in range(n_max + 1):
        got = tuple(z.reduce(level) for z in pf.eval(n))
        want = tuple(z.reduce(level) if isinstance(z, PadicInt) else z % flow.p ** level
                     for z in cur)
        if got != want:
            mismatches.append((n, got, want))
        cur = flow.f.evaluate(cur)
    if flow.inverse is not None:
        cur = tuple(point)
        for n in range(1, n_max + 1):
            cur = flow.inverse.evaluate(cur)
            got = tuple(z.reduce(level) for z in pf.eval(-n))
            want = tuple(z.reduce(level) for z in cur)
            if got != want:
                mismatches.append((-n, got, want))
    else:
        fwd = tuple(point)
        for n in range(1, n_max + 1):
            fwd = flow.f.evaluate(fwd)
            back = tuple(z.reduce(level) for z in flow.at_point(fwd).eval(-n))
            want = tuple(z.reduce(level) if isinstance(z, PadicInt) else z % flow.p ** level
                         for z in point)
            if back != want:
                mismatches.append((-n, back, want))
    return (not mismatches, mismatches)


def tangent_rank(thetas, cert_precision):
    """Certified lower bound on the Q_p-rank of a list of tangent vectors.

    Rank r is certified when some r x r minor has valuation strictly below
    cert_precision; residues that vanish to the working precision can hide
    anything, so only lower bounds are ever certified.  Returns a dict
    {"rank_lower_bound": r, "certified": bool} where certified means the
    bound equals the full possible rank min(#vectors, dim).
    """
    if not thetas:
        return {"rank_lower_bound": 0, "certified": False}
    dim = len(thetas[0])
    rows, p = [], None
    for vec in thetas:
        if len(vec) != dim:
            raise UsageError("tangent vectors of mixed dimension")
        row = []
        for z in vec:
            if isinstance(z, PadicInt):
                if z.precision < cert_precision:
                    raise PrecisionExhausted(
                        f"vector entry at precision {z.precision} < {cert_precision}")
                p = z.p
                row.append(z.residue)
            else:
                row.append(int(z))
        rows.append(row)
    if p is None:
        raise UsageError("tangent vectors must contain PadicInt entries")
    m = p ** cert_precision
    best = 0
    # minors of size 1..min(#vectors, dim); if every r-minor vanishes mod m,
    # cofactor expansion kills every (r+1)-minor too, so stopping is sound
    for r in range(1, min(len(rows), dim) + 1):
        found = False
        for ri in itertools.combinations(range(len(rows)), r):
            for ci in itertools.combinations(range(dim), r):
                sub = [[rows[i][j] for j in ci] for i in ri]
                if _det_int(sub) % m != 0:
                    found = True
                    break
            if found:
                break
        if found:
            best = r
        else:
            break
    return {"rank_lower_bound": best,
            "certified": best == min(len(rows), dim)}


def _det_int(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * _det_int(minor)
    return total
