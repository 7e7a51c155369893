"""Residue-disk measure on cubic surfaces, Vieta random walks, escape traces.

The area form on the surface x^2+y^2+z^2+xyz = Ax+By+Cz+D has three chart
expressions whose denominators are the partial derivatives of the defining
equation; the weight of a residue disk mod p^l is p^(v-2l) where v is the
smallest denominator valuation at the point (the charts agree wherever two
apply, so the minimum is just the most-defined chart).  All weights are exact
Fractions; floats appear only in reports.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import BudgetError, ChartSingular, UsageError
from .padic import vp

_WALK_BATCH = 1 << 16


def chart_valuation(surface, point, p, level):
    """Minimum valuation of the three chart denominators at a residue point.

    Saturates at `level`: a return of `level` means every denominator is
    congruent to 0 mod p^level and the weight is undetermined at this level.
    """
    m = p ** level
    best = level
    for den in surface.chart_denominators(point):
        r = den % m
        if r:
            v = vp(r, p)
            if v < best:
                best = v
    return best


def symplectic_weight(point, surface, p, level):
    """Exact weight p^(v - 2*level) of a residue disk, v the chart valuation."""
    v = chart_valuation(surface, point, p, level)
    if v >= level:
        raise ChartSingular(
            f"all chart denominators vanish mod {p}^{level} at {tuple(point)}; "
            "refine the level", tuple(point))
    return Fraction(p ** v, p ** (2 * level))


class ResidueWeighting:
    """Normalized weights over a finite residue set, exact rationals."""

    __slots__ = ("level", "weights", "total", "exclusions")

    def __init__(self, level, weights, total, exclusions=()):
        self.level = level
        self.weights = weights
        self.total = total
        self.exclusions = tuple(exclusions)
        s = sum(weights.values(), Fraction(0))
        if weights and s != 1:
            raise UsageError(f"weights sum to {s}, not 1")

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, point):
        return self.weights[point]

    def __repr__(self):
        return (f"ResidueWeighting(level={self.level}, {len(self.weights)} residues, "
                f"{len(self.exclusions)} excluded)")


def reference_measure(residues, surface, p, level, strict=True):
    """Normalized chart weights over a residue set (typically one orbit).

    strict=True refuses singular points (ChartSingular, with the witness);
    strict=False excises them, normalizes over the rest, and lists the
    exclusions in the result.
    """
    pts = sorted(tuple(int(c) for c in r) for r in residues)
    weights = {}
    excluded = []
    for pt in pts:
        try:
            weights[pt] = symplectic_weight(pt, surface, p, level)
        except ChartSingular:
            if strict:
                raise
            excluded.append(pt)
    total = sum(weights.values(), Fraction(0))
    if total == 0:
        raise ChartSingular("no weighted residues remain after exclusions",
                            None)
    normalized = {pt: w / total for pt, w in weights.items()}
    return ResidueWeighting(level, normalized, total, excluded)


class WalkConfig:
    """Parameters of a Vieta random walk on a surface mod p^level."""

    __slots__ = ("surface", "p", "level", "start", "steps", "seed", "mu",
                 "burn_in")

    def __init__(self, surface, p, level, start, steps, seed, mu=None,
                 burn_in=None):
        self.surface = surface
        self.p = p
        self.level = level
        self.start = tuple(int(c) % p ** level for c in start)
        self.steps = int(steps)
        self.seed = int(seed)
        mu = tuple(Fraction(x) for x in (mu or (Fraction(1, 3),) * 3))
        if len(mu) != 3 or any(x <= 0 for x in mu) or sum(mu) != 1:
            raise UsageError("generator weights must be 3 positive rationals "
                             "summing to 1")
        self.mu = mu
        self.burn_in = self.steps // 10 if burn_in is None else int(burn_in)
        if not 0 <= self.burn_in <= self.steps:
            raise UsageError("burn-in must lie within the step count")
        if self.steps < 0:
            raise UsageError("step count must be nonnegative")
        if not surface.on_surface(self.start, p ** level):
            raise UsageError(f"start point {self.start} is not on the surface "
                             f"mod {p}^{level}")


def random_walk(cfg, report_level):
    """Empirical distribution of the walk over residues mod p^report_level.

    Positions x_0 (the start) through x_steps are generated by picking a
    Vieta involution per step with probabilities mu (thresholds on 64-bit
    draws from a counter-based generator, so reruns are bit-identical);
    positions from index burn_in onward are tallied.  Returns a dict
    residue-triple -> Fraction frequency.
    """
    if report_level > cfg.level:
        raise UsageError("report level exceeds the walk's working level")
    p = cfg.p
    m = p ** cfg.level
    mr = p ** report_level
    a, b, c, _ = (v % m for v in cfg.surface.params)

    t1 = (cfg.mu[0] * (1 << 64)).__floor__()
    t2 = ((cfg.mu[0] + cfg.mu[1]) * (1 << 64)).__floor__()

    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    x, y, z = cfg.start
    counts = {}
    recorded = 0
    if cfg.burn_in == 0:
        key = (x % mr, y % mr, z % mr)
        counts[key] = counts.get(key, 0) + 1
        recorded += 1
    done = 0
    while done < cfg.steps:
        batch = min(_WALK_BATCH, cfg.steps - done)
        draws = rng.integers(0, 1 << 64, size=batch, dtype=np.uint64).tolist()
        for u in draws:
            if u < t1:
                x = (a - x - y * z) % m
            elif u < t2:
                y = (b - y - z * x) % m
            else:
                z = (c - z - x * y) % m
            done += 1
            if done >= cfg.burn_in:
                key = (x % mr, y % mr, z % mr)
                counts[key] = counts.get(key, 0) + 1
                recorded += 1
    return {pt: Fraction(n, recorded) for pt, n in sorted(counts.items())}


def tv_distance(a, b):
    """Half the L1 distance between two distributions on the same universe."""
    if set(a) != set(b):
        raise UsageError("distributions live on different residue universes")
    tot = sum(abs(a[k] - b[k]) for k in a)
    return Fraction(tot, 2) if isinstance(tot, int) else tot / 2


def pad_to_universe(freqs, universe):
    """Extend a frequency dict with zeros over a full universe of residues."""
    out = {tuple(int(c) for c in pt): Fraction(0) for pt in universe}
    for pt, w in freqs.items():
        key = tuple(int(c) for c in pt)
        if key not in out:
            raise UsageError(f"frequency at {key} outside the universe")
        out[key] = Fraction(w)
    return out


def fraction_valuation(q, p):
    """p-adic valuation of a Fraction or int; math.inf for zero."""
    q = Fraction(q)
    if q == 0:
        return math.inf
    return vp(q.numerator, p) - vp(q.denominator, p)


def vieta_step_exact(surface, point, indices=(2, 1)):
    """Apply Vieta involutions by index over exact Fractions.

    Default (2, 1) is the parabolic composite: flip y, then flip x; the z
    coordinate is untouched.
    """
    a, b, c, _ = surface.params
    x, y, z = (Fraction(v) for v in point)
    for i in indices:
        if i == 1:
            x = a - x - y * z
        elif i == 2:
            y = b - y - z * x
        elif i == 3:
            z = c - z - x * y
        else:
            raise UsageError("involution index must be 1, 2 or 3")
    return (x, y, z)


def escape_test(start, surface, p, steps, digit_cap=1_000_000):
    """Minimum coordinate valuation along the exact parabolic trajectory.

    Iterates the composite of the y-flip and x-flip involutions in exact
    rational arithmetic; returns the list of min valuations at positions
    0..steps.  A point of the integral surface never dips below 0; a point
    with a negatively-valued coordinate on a suitable fiber escapes with
    strictly decreasing minima.  Numerator/denominator growth beyond
    digit_cap bits raises BudgetError.
    """
    pt = tuple(Fraction(v) for v in start)
    if surface.equation_value(pt) != 0:
        raise UsageError("start point does not satisfy the surface equation")
    trace = [min(fraction_valuation(v, p) for v in pt)]
    for _ in range(steps):
        pt = vieta_step_exact(surface, pt)
        for v in pt:
            if (abs(v.numerator).bit_length() > digit_cap
                    or v.denominator.bit_length() > digit_cap):
                raise BudgetError("escape iteration exceeded the digit budget")
        trace.append(min(fraction_valuation(v, p) for v in pt))
    return trace
