"""Sparse integer polynomials: ring laws via random evaluation."""

import random

import pytest

from padicflow import ZPoly
from padicflow.errors import DegreeOverflow, UsageError


def _random_poly(rng, nvars, max_deg=3, terms=5, coeff=20):
    z = ZPoly.constant(nvars, 0)
    for _ in range(terms):
        key = tuple(rng.randint(0, max_deg) for _ in range(nvars))
        mono = ZPoly.constant(nvars, rng.randint(-coeff, coeff))
        for i, e in enumerate(key):
            mono = mono * ZPoly.variable(nvars, i) ** e
        z = z + mono
    return z


def test_constant_and_variable():
    c = ZPoly.constant(2, 7)
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    assert c.evaluate((3, 4)) == 7
    assert x.evaluate((3, 4)) == 3
    assert (x * y + c).evaluate((3, 4)) == 19
    assert c.degree() == 0
    assert (x * y).degree() == 2
    assert ZPoly.constant(2, 0).degree() == 0


def test_ring_ops_respect_evaluation():
    rng = random.Random(5)
    for _ in range(100):
        nvars = rng.choice((1, 2, 3))
        f = _random_poly(rng, nvars)
        g = _random_poly(rng, nvars)
        pt = tuple(rng.randint(-9, 9) for _ in range(nvars))
        assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)
        assert (f - g).evaluate(pt) == f.evaluate(pt) - g.evaluate(pt)
        assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)
        assert (f + 3).evaluate(pt) == f.evaluate(pt) + 3
        assert (2 - f).evaluate(pt) == 2 - f.evaluate(pt)
        assert (5 * f).evaluate(pt) == 5 * f.evaluate(pt)
        assert (f ** 3).evaluate(pt) == f.evaluate(pt) ** 3


def test_eval_mod_matches_evaluate():
    rng = random.Random(6)
    for _ in range(100):
        nvars = rng.choice((1, 2))
        f = _random_poly(rng, nvars)
        pt = tuple(rng.randint(0, 100) for _ in range(nvars))
        m = rng.choice((9, 25, 343, 2 ** 20))
        assert f.eval_mod(pt, m) == f.evaluate(pt) % m


def test_compose_matches_pointwise():
    rng = random.Random(7)
    for _ in range(50):
        f = _random_poly(rng, 2, max_deg=2)
        gs = [_random_poly(rng, 2, max_deg=2), _random_poly(rng, 2, max_deg=2)]
        comp = f.compose(gs, degree_bound=64)
        pt = tuple(rng.randint(-5, 5) for _ in range(2))
        inner = tuple(g.evaluate(pt) for g in gs)
        assert comp.evaluate(pt) == f.evaluate(inner)


def test_compose_identity_and_constants():
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    f = x * x - 3 * y + 1
    assert f.compose([x, y], degree_bound=16) == f
    c = f.compose([ZPoly.constant(2, 2), ZPoly.constant(2, 5)], degree_bound=16)
    assert c == ZPoly.constant(2, f.evaluate((2, 5)))


def test_compose_degree_bound():
    x = ZPoly.variable(1, 0)
    f = x ** 4
    with pytest.raises(DegreeOverflow):
        f.compose([x ** 4], degree_bound=15)
    assert f.compose([x ** 4], degree_bound=16).degree() == 16


def test_max_exponents():
    x = ZPoly.variable(2, 0)
    y = ZPoly.variable(2, 1)
    f = x ** 3 * y + y ** 2
    assert f.max_exponents() == [3, 2]


def test_arity_checks():
    f = ZPoly.variable(2, 0)
    with pytest.raises(UsageError):
        f.evaluate((1,))
    with pytest.raises(UsageError):
        ZPoly.variable(2, 2)
