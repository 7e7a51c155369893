"""Fixed-precision p-adic integer arithmetic against integer oracles."""

import math
import random

import pytest

from padicflow import PadicInt, binom_padic, is_prime, teichmuller, vp
from padicflow.errors import (ConfigError, NonUnitError, PrecisionExhausted,
                              UnsupportedError, UsageError)
from padicflow.padic import vp_factorial


def test_is_prime_small_and_pseudoprimes():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}
    for n in range(2, 43):
        assert is_prime(n) == (n in primes)
    # Carmichael numbers and strong-pseudoprime bait
    for n in (561, 1105, 1729, 2047, 3215031751, 3825123056546413051):
        assert not is_prime(n)
    for n in (2 ** 31 - 1, 10 ** 9 + 7, 10 ** 9 + 9):
        assert is_prime(n)


def test_vp_basics():
    assert vp(12, 2) == 2
    assert vp(12, 3) == 1
    assert vp(-27, 3) == 3
    assert vp(1, 7) == 0
    with pytest.raises(ValueError):
        vp(0, 5)


def test_vp_factorial_matches_direct():
    for p in (2, 3, 5, 7):
        for n in range(1, 200):
            assert vp_factorial(n, p) == vp(math.factorial(n), p)
    assert vp_factorial(0, 3) == 0


def test_construction_canonicalizes():
    x = PadicInt(3, 4, -1)
    assert x.residue == 80
    assert x.modulus == 81
    assert PadicInt(3, 4, 81).residue == 0
    with pytest.raises(ConfigError):
        PadicInt(4, 3, 1)
    with pytest.raises(ConfigError):
        PadicInt(3, 0, 1)


def test_valuation_saturates_on_zero():
    z = PadicInt(5, 6, 0)
    assert z.valuation() == 6
    assert z.is_zero()
    assert PadicInt(5, 6, 25).valuation() == 2


def test_arithmetic_matches_integers_mod_pn():
    rng = random.Random(11)
    for _ in range(300):
        p = rng.choice((2, 3, 5, 7, 13))
        n = rng.randint(1, 12)
        m = p ** n
        a, b = rng.randrange(-m, m), rng.randrange(-m, m)
        x, y = PadicInt(p, n, a), PadicInt(p, n, b)
        assert (x + y).residue == (a + b) % m
        assert (x - y).residue == (a - b) % m
        assert (x * y).residue == (a * b) % m
        assert (-x).residue == (-a) % m
        assert (x + 5).residue == (a + 5) % m
        assert (3 * x).residue == (3 * a) % m
        assert (x ** 3).residue == pow(a, 3, m)


def test_mixed_precision_reduces_to_min():
    x = PadicInt(3, 6, 7)
    y = PadicInt(3, 2, 1)
    assert (x + y).precision == 2
    assert (x * y).precision == 2
    assert x.reduce(2) == 7 % 9
    with pytest.raises(UsageError):
        x + PadicInt(5, 6, 7)
    with pytest.raises(UsageError):
        x.reduce(7)


def test_equality_at_shared_precision():
    assert PadicInt(3, 5, 4) == PadicInt(3, 2, 4)
    assert PadicInt(3, 5, 4) == PadicInt(3, 2, 13)   # 4 = 13 mod 9
    assert PadicInt(3, 5, 4) != PadicInt(3, 5, 13)
    assert PadicInt(3, 5, 4) == 4


def test_invert_oracle_and_random():
    assert PadicInt(3, 5, 2).invert().residue == 122
    rng = random.Random(23)
    for _ in range(200):
        p = rng.choice((3, 5, 7))
        n = rng.randint(1, 10)
        a = rng.randrange(1, p ** n)
        if a % p == 0:
            with pytest.raises(NonUnitError):
                PadicInt(p, n, a).invert()
        else:
            inv = PadicInt(p, n, a).invert()
            assert a * inv.residue % p ** n == 1
    assert (PadicInt(7, 4, 3) * PadicInt(7, 4, 5).invert()).residue == \
        3 * pow(5, -1, 7 ** 4) % 7 ** 4


def test_div_exact_loses_valuation_digits():
    x = PadicInt(3, 6, 18)        # 2 * 3^2
    q = x.div_exact(9)
    assert q.residue == 2
    assert q.precision == 4       # lost v_3(9) = 2 digits
    q2 = PadicInt(3, 6, 45).div_exact(-3)
    assert q2.precision == 5
    assert q2.residue == (-15) % 3 ** 5
    with pytest.raises(ZeroDivisionError):
        x.div_exact(0)
    with pytest.raises(NonUnitError):
        PadicInt(3, 6, 1).div_exact(3)


def test_pow_negative_uses_inverse():
    x = PadicInt(5, 4, 2)
    assert (x ** -1).residue == pow(2, -1, 5 ** 4)
    assert (x ** -3).residue == pow(2, -3, 5 ** 4)
    with pytest.raises(NonUnitError):
        PadicInt(5, 4, 10) ** -1


def test_unit_part_splits_valuation():
    x = PadicInt(3, 7, 54)        # 2 * 27
    v, u = x.valuation(), x.unit_part()
    assert v == 3
    assert u.residue * 27 % 3 ** u.precision == (54 % 3 ** u.precision)


# -- Teichmuller ------------------------------------------------------------


def test_teichmuller_oracle():
    assert teichmuller(PadicInt(5, 2, 2)).residue == 7


def test_teichmuller_is_torsion_and_congruent():
    for p in (3, 5, 7, 11):
        n = 6
        m = p ** n
        for a in range(1, p):
            w = teichmuller(PadicInt(p, n, a))
            assert pow(w.residue, p - 1, m) == 1
            assert w.residue % p == a


def test_teichmuller_rejects_p2_and_nonunits():
    with pytest.raises(UnsupportedError):
        teichmuller(PadicInt(2, 5, 1))
    with pytest.raises(NonUnitError):
        teichmuller(PadicInt(5, 3, 10))


# -- binomial coefficients ---------------------------------------------------


def test_binom_oracles():
    assert binom_padic(PadicInt(5, 6, 6), 2).residue == 15
    assert binom_padic(PadicInt(5, 6, 5), 2).residue == 10
    assert binom_padic(PadicInt(5, 6, 7), 0).residue == 1


def test_binom_is_comb_of_canonical_lift():
    # C(t, k) of the canonical residue in [0, p^N): exact mod p^N
    rng = random.Random(37)
    for _ in range(200):
        p = rng.choice((2, 3, 5, 7))
        n = rng.randint(2, 10)
        k = rng.randint(0, 12)
        t = rng.randrange(0, p ** n)
        got = binom_padic(PadicInt(p, n, t), k)
        assert got.precision == n
        assert got.residue == math.comb(t, k) % p ** n


def test_binom_is_mahler_continuous():
    # as a coset function the binomial is determined mod p^(N - v_p(k!))
    rng = random.Random(41)
    from padicflow.padic import vp_factorial
    for _ in range(100):
        p = rng.choice((3, 5))
        n = rng.randint(3, 8)
        k = rng.randint(1, 10)
        t = rng.randint(0, 10 ** 6)
        got = binom_padic(PadicInt(p, n, t), k)
        v = vp_factorial(k, p)
        if v >= n:
            continue  # the coset pins down no digits of C(t, k)
        mod = p ** (n - v)
        assert got.residue % mod == math.comb(t, k) % mod


def test_binom_guard_exhaustion():
    with pytest.raises(PrecisionExhausted):
        binom_padic(PadicInt(2, 4, 3), 5000)
