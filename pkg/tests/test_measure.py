"""Chart weights, reference measures, random walks, and escape traces."""

import math
import random
from fractions import Fraction

import pytest

from padicflow.errors import BudgetError, ChartSingular, UsageError
from padicflow.measure import (
    WalkConfig,
    chart_valuation,
    escape_test,
    fraction_valuation,
    pad_to_universe,
    random_walk,
    reference_measure,
    symplectic_weight,
    tv_distance,
    vieta_step_exact,
    ResidueWeighting,
)
from padicflow.orbits import enumerate_surface_points
from padicflow.surfaces import MarkovSurface, vieta


# -- chart valuations and disk weights -------------------------------------------


def test_chart_valuation_basic():
    s = MarkovSurface(0, 0, 0, 20)
    # denominators at (1,2,3): 2+6=8, 4+3=7, 6+2=8 -> min valuation 0 at p=7
    assert chart_valuation(s, (1, 2, 3), 7, 1) == 0
    assert chart_valuation(s, (1, 2, 3), 2, 3) == 0  # 7 is odd
    assert chart_valuation(s, (2, 0, 0), 2, 2) == 2  # dens 4, 0, 0: saturates


def test_chart_valuation_saturates_at_level():
    s = MarkovSurface(0, 0, 0, 0)
    for level in (1, 2, 3):
        assert chart_valuation(s, (0, 0, 0), 5, level) == level


def test_symplectic_weight_values():
    s = MarkovSurface(0, 0, 0, 20)
    assert symplectic_weight((1, 2, 3), s, 7, 1) == Fraction(1, 49)
    assert symplectic_weight((1, 2, 3), s, 7, 2) == Fraction(1, 7 ** 4)
    with pytest.raises(ChartSingular) as exc:
        symplectic_weight((0, 0, 0), MarkovSurface(0, 0, 0, 0), 5, 2)
    assert exc.value.witness == (0, 0, 0)


def test_symplectic_weight_sees_deeper_charts():
    # (3,0,0) mod 9 on the D=0 cone: denominators (6, 0, 0), valuation 1
    s = MarkovSurface(0, 0, 0, 0)
    assert s.on_surface((3, 0, 0), modulus=9)
    assert chart_valuation(s, (3, 0, 0), 3, 2) == 1
    assert symplectic_weight((3, 0, 0), s, 3, 2) == Fraction(3, 3 ** 4)


# -- reference measures ------------------------------------------------------------


def _surface_residues(s, p, level):
    xs, ys, zs = enumerate_surface_points(s, p, level)
    return list(zip(xs.tolist(), ys.tolist(), zs.tolist()))


def test_reference_measure_normalizes():
    s = MarkovSurface(0, 0, 0, 20)
    residues = _surface_residues(s, 7, 2)
    assert len(residues) == 3136
    ref = reference_measure(residues, s, 7, 2)
    assert ref.total == Fraction(64, 49)
    assert sum(ref.weights.values(), Fraction(0)) == 1
    assert len(ref) == 3136 and not ref.exclusions
    assert ref[(1, 2, 3)] == Fraction(1, 7 ** 4) / ref.total


def test_reference_measure_is_generator_invariant():
    s = MarkovSurface(0, 0, 0, 20)
    residues = _surface_residues(s, 7, 2)
    ref = reference_measure(residues, s, 7, 2)
    for i in (1, 2, 3):
        g = vieta(s, i)
        for pt, w in ref.weights.items():
            img = g.apply(pt, modulus=49)
            assert ref[img] == w


def test_reference_measure_strict_vs_excise():
    s = MarkovSurface(0, 0, 0, 0)
    residues = _surface_residues(s, 3, 2)
    assert (0, 0, 0) in residues
    with pytest.raises(ChartSingular):
        reference_measure(residues, s, 3, 2, strict=True)
    ref = reference_measure(residues, s, 3, 2, strict=False)
    assert (0, 0, 0) in ref.exclusions
    assert sum(ref.weights.values(), Fraction(0)) == 1
    assert all(pt not in ref.weights for pt in ref.exclusions)


def test_reference_measure_nothing_left():
    s = MarkovSurface(0, 0, 0, 0)
    with pytest.raises(ChartSingular):
        reference_measure([(0, 0, 0)], s, 5, 1, strict=False)


def test_weighting_must_sum_to_one():
    with pytest.raises(UsageError):
        ResidueWeighting(1, {(0, 0, 0): Fraction(1, 2)}, Fraction(1, 2))


# -- walk configuration ------------------------------------------------------------


def test_walk_config_defaults_and_validation():
    s = MarkovSurface(0, 0, 0, 20)
    cfg = WalkConfig(s, 7, 2, (1, 2, 3), steps=1000, seed=1)
    assert cfg.mu == (Fraction(1, 3),) * 3
    assert cfg.burn_in == 100
    assert cfg.start == (1, 2, 3)
    with pytest.raises(UsageError):
        WalkConfig(s, 7, 2, (1, 2, 3), 100, 1, mu=(1, 1, 1))
    with pytest.raises(UsageError):
        WalkConfig(s, 7, 2, (1, 2, 3), 100, 1,
                   mu=(Fraction(1, 2), Fraction(1, 2), Fraction(0)))
    with pytest.raises(UsageError):
        WalkConfig(s, 7, 2, (1, 2, 3), 100, 1, burn_in=101)
    with pytest.raises(UsageError):
        WalkConfig(s, 7, 2, (1, 1, 1), 100, 1)  # off the surface


def test_walk_config_reduces_start():
    s = MarkovSurface(0, 0, 0, 20)
    cfg = WalkConfig(s, 7, 1, (8, 9, 10), steps=10, seed=0)
    assert cfg.start == (1, 2, 3)


# -- the walk itself ---------------------------------------------------------------


def test_walk_zero_steps_is_point_mass():
    s = MarkovSurface(0, 0, 0, 20)
    cfg = WalkConfig(s, 7, 2, (1, 2, 3), steps=0, seed=5)
    freqs = random_walk(cfg, 2)
    assert freqs == {(1, 2, 3): Fraction(1)}


def test_walk_is_seed_deterministic():
    s = MarkovSurface(0, 0, 0, 20)
    cfg_a = WalkConfig(s, 7, 2, (1, 2, 3), steps=4000, seed=42)
    cfg_b = WalkConfig(s, 7, 2, (1, 2, 3), steps=4000, seed=42)
    assert random_walk(cfg_a, 2) == random_walk(cfg_b, 2)
    cfg_c = WalkConfig(s, 7, 2, (1, 2, 3), steps=4000, seed=43)
    assert random_walk(cfg_c, 2) != random_walk(cfg_a, 2)


def test_walk_stays_on_surface_and_sums_to_one():
    s = MarkovSurface(0, 0, 0, 20)
    cfg = WalkConfig(s, 7, 2, (1, 2, 3), steps=3000, seed=9)
    freqs = random_walk(cfg, 2)
    assert sum(freqs.values(), Fraction(0)) == 1
    for pt in freqs:
        assert s.on_surface(pt, modulus=49)


def test_walk_report_level_aggregates():
    s = MarkovSurface(0, 0, 0, 20)
    fine = random_walk(WalkConfig(s, 7, 2, (1, 2, 3), 5000, seed=3), 2)
    coarse = random_walk(WalkConfig(s, 7, 2, (1, 2, 3), 5000, seed=3), 1)
    agg = {}
    for (x, y, z), w in fine.items():
        key = (x % 7, y % 7, z % 7)
        agg[key] = agg.get(key, Fraction(0)) + w
    assert agg == coarse
    with pytest.raises(UsageError):
        random_walk(WalkConfig(s, 7, 1, (1, 2, 3), 10, seed=0), 2)


def test_walk_respects_generator_weights():
    # mu concentrated on the z-flip keeps x and y frozen
    s = MarkovSurface(0, 0, 0, 20)
    cfg = WalkConfig(s, 7, 2, (1, 2, 3), steps=500, seed=8,
                     mu=(Fraction(1, 10 ** 9),
                         Fraction(1, 10 ** 9),
                         1 - Fraction(2, 10 ** 9)))
    freqs = random_walk(cfg, 2)
    assert all(x == 1 and y == 2 for x, y, _ in freqs)
    assert set(z for _, _, z in freqs) == {3, 44}  # z and its flip -3-1*2


# -- distances and padding ---------------------------------------------------------


def test_tv_distance_exact():
    a = {(0,): Fraction(1, 2), (1,): Fraction(1, 2)}
    b = {(0,): Fraction(3, 4), (1,): Fraction(1, 4)}
    assert tv_distance(a, b) == Fraction(1, 4)
    assert tv_distance(a, a) == 0
    with pytest.raises(UsageError):
        tv_distance(a, {(0,): Fraction(1)})


def test_pad_to_universe():
    universe = [(0, 0, 0), (1, 2, 3), (4, 5, 6)]
    padded = pad_to_universe({(1, 2, 3): Fraction(1)}, universe)
    assert padded == {(0, 0, 0): Fraction(0), (1, 2, 3): Fraction(1),
                      (4, 5, 6): Fraction(0)}
    with pytest.raises(UsageError):
        pad_to_universe({(9, 9, 9): Fraction(1)}, universe)


def test_fraction_valuation():
    assert fraction_valuation(Fraction(49, 3), 7) == 2
    assert fraction_valuation(Fraction(3, 49), 7) == -2
    assert fraction_valuation(14, 7) == 1
    assert fraction_valuation(Fraction(0), 7) == math.inf


# -- exact Vieta steps and escape traces -------------------------------------------


def test_vieta_step_matches_polynomial_involutions():
    rng = random.Random(77)
    s = MarkovSurface(1, -2, 3, 20)
    s1, s2, s3 = (vieta(s, i) for i in (1, 2, 3))
    for _ in range(40):
        pt = tuple(rng.randint(-30, 30) for _ in range(3))
        assert vieta_step_exact(s, pt, (1,)) == s1.apply(pt)
        assert vieta_step_exact(s, pt, (3,)) == s3.apply(pt)
        # default order (2, 1): flip y first, then x
        assert vieta_step_exact(s, pt) == s1.apply(s2.apply(pt))
    with pytest.raises(UsageError):
        vieta_step_exact(s, (0, 0, 0), (4,))


def test_vieta_step_exact_fractions():
    s = MarkovSurface(0, 0, 0, 4)
    pt = (Fraction(1, 7), -2, Fraction(1, 7))
    assert s.equation_value(pt) == 0
    img = vieta_step_exact(s, pt)
    assert s.equation_value(img) == 0


@pytest.mark.parametrize("p,k", [(7, 0), (3, 1), (5, 2)])
def test_escape_trace_strictly_decreases(p, k):
    y0 = -2 + p * p * k
    s = MarkovSurface(0, 0, 0, y0 * y0 + k)
    start = (Fraction(1, p), y0, Fraction(1, p))
    trace = escape_test(start, s, p, steps=10)
    assert trace[0] == -1
    assert all(b < a for a, b in zip(trace, trace[1:]))


def test_escape_integral_points_stay_integral():
    s = MarkovSurface(0, 0, 0, 20)
    trace = escape_test((1, 2, 3), s, 7, steps=100)
    assert len(trace) == 101
    assert all(v >= 0 for v in trace)


def test_escape_guards():
    s = MarkovSurface(0, 0, 0, 20)
    with pytest.raises(UsageError):
        escape_test((1, 1, 1), s, 7, steps=5)  # not on the surface
    esc = MarkovSurface(0, 0, 0, 4)
    with pytest.raises(BudgetError):
        escape_test((Fraction(1, 7), -2, Fraction(1, 7)), esc, 7,
                    steps=200, digit_cap=60)


def test_walk_matches_reference_roughly():
    # short sanity run; the tight tolerance lives in the acceptance suite
    s = MarkovSurface(0, 0, 0, 20)
    residues = _surface_residues(s, 7, 1)
    ref = reference_measure(residues, s, 7, 1)
    cfg = WalkConfig(s, 7, 1, (1, 2, 3), steps=60_000, seed=4, burn_in=5_000)
    freqs = pad_to_universe(random_walk(cfg, 1), ref.weights)
    assert tv_distance(freqs, dict(ref.weights)) < Fraction(1, 5)
