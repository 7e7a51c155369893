"""Orbit enumeration for group actions on finite p-adic residue sets.

Points live in flat index spaces so generators become permutation arrays and
partitioning becomes vectorized label propagation: per generator, the minimum
label on each permutation cycle is spread by pointer doubling; sweeps over the
generators repeat until no label moves.  At the fixed point every label is
provably the minimal point index of its orbit (labels only decrease, stay
inside the orbit, and end constant on every generator cycle).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BudgetError, NotInvariantError, UsageError
from .surfaces import MonomialAuto, PolyAuto

MAX_MODULUS = 1 << 31       # int64 products of two residues must not overflow
DEFAULT_BUDGET = 8_000_000  # points


def _check_modulus(m):
    if m > MAX_MODULUS:
        raise BudgetError(f"modulus {m} too large for vectorized enumeration")


def zpoly_eval_arrays(poly, coords, m):
    """Evaluate a ZPoly on numpy int64 coordinate arrays, mod m."""
    _check_modulus(m)
    maxes = poly.max_exponents()
    pows = []
    for i, e_max in enumerate(maxes):
        cache = [None, coords[i] % m] if e_max else [None]
        for _ in range(e_max - 1):
            cache.append(cache[-1] * coords[i] % m)
        pows.append(cache)
    total = np.zeros_like(coords[0])
    for key, c in poly.coeffs.items():
        term = np.full_like(coords[0], c % m)
        for i, e in enumerate(key):
            if e:
                term = term * pows[i][e] % m
        total = (total + term) % m
    return total


def _modpow_arrays(base, exp, m):
    """base**exp mod m elementwise, exp a plain nonnegative int."""
    result = np.ones_like(base)
    b = base % m
    e = int(exp)
    while e:
        if e & 1:
            result = result * b % m
        b = b * b % m
        e >>= 1
    return result


class FinitePointSet:
    """A finite residue set with a dense integer indexing.

    Kinds: "affine-plane" ((Z/p^l)^2, index x*m + y), "markov-surface"
    (solutions of the cubic mod p^l, index = rank in the sorted packed-key
    array), "torus-units" (pairs of units mod p^l).
    """

    __slots__ = ("kind", "p", "level", "modulus", "size", "keys", "surface",
                 "unit_residues", "unit_index")

    def __init__(self, kind, p, level, modulus, size, keys=None, surface=None,
                 unit_residues=None, unit_index=None):
        self.kind = kind
        self.p = p
        self.level = level
        self.modulus = modulus
        self.size = size
        self.keys = keys
        self.surface = surface
        self.unit_residues = unit_residues
        self.unit_index = unit_index

    # -- constructors -------------------------------------------------------

    @classmethod
    def affine_plane(cls, p, level=1, budget=DEFAULT_BUDGET):
        m = p ** level
        _check_modulus(m)
        if budget is not None and m * m > budget:
            raise BudgetError(f"affine plane mod {p}^{level} has {m * m} points")
        return cls("affine-plane", p, level, m, m * m)

    @classmethod
    def torus_units(cls, p, level=1, budget=DEFAULT_BUDGET):
        m = p ** level
        _check_modulus(m)
        residues = np.arange(m, dtype=np.int64)
        units = residues[residues % p != 0]
        n = len(units)
        if budget is not None and n * n > budget:
            raise BudgetError(f"unit torus mod {p}^{level} has {n * n} points")
        index = np.full(m, -1, dtype=np.int64)
        index[units] = np.arange(n, dtype=np.int64)
        return cls("torus-units", p, level, m, n * n,
                   unit_residues=units, unit_index=index)

    @classmethod
    def markov_surface(cls, surface, p, level=1, budget=DEFAULT_BUDGET):
        xs, ys, zs = enumerate_surface_points(surface, p, level, budget)
        m = p ** level
        keys = np.sort(xs * m * m + ys * m + zs)
        return cls("markov-surface", p, level, m, len(keys),
                   keys=keys, surface=surface)

    # -- index <-> coordinates ---------------------------------------------

    def decode(self, idx):
        """Index array -> tuple of coordinate arrays."""
        m = self.modulus
        if self.kind == "affine-plane":
            return (idx // m, idx % m)
        if self.kind == "markov-surface":
            key = self.keys[idx]
            return (key // (m * m), key // m % m, key % m)
        u = self.unit_residues
        n = len(u)
        return (u[idx // n], u[idx % n])

    def encode(self, coords):
        """Coordinate arrays -> index array; -1 marks points outside the set."""
        m = self.modulus
        if self.kind == "affine-plane":
            return coords[0] % m * m + coords[1] % m
        if self.kind == "markov-surface":
            if len(self.keys) == 0:
                return np.full_like(coords[0], -1)
            key = coords[0] % m * (m * m) + coords[1] % m * m + coords[2] % m
            pos = np.searchsorted(self.keys, key)
            pos[pos == len(self.keys)] = 0
            ok = self.keys[pos] == key
            return np.where(ok, pos, -1)
        i1 = self.unit_index[coords[0] % m]
        i2 = self.unit_index[coords[1] % m]
        n = len(self.unit_residues)
        return np.where((i1 >= 0) & (i2 >= 0), i1 * n + i2, -1)

    def all_points(self):
        return self.decode(np.arange(self.size, dtype=np.int64))

    def __repr__(self):
        return (f"FinitePointSet({self.kind}, p={self.p}, level={self.level}, "
                f"size={self.size})")


# -- solving the cubic surface equation mod p^l ---------------------------------


def enumerate_surface_points(surface, p, level, budget=DEFAULT_BUDGET):
    """All (x, y, z) with x^2+y^2+z^2+xyz = Ax+By+Cz+D mod p^level.

    Level 1 is a vectorized brute force over p^3 candidates (one z-slab at a
    time).  Higher levels lift level-(l-1) solutions: where some partial
    derivative of the defining equation is a unit, each point lifts to
    exactly p^2 points (one linear constraint on the three correction
    digits); where the gradient vanishes mod p, the whole p^3 fiber is
    searched directly.
    """
    a, b, c, d = (v % p for v in surface.params)
    if budget is not None and p ** 3 > budget:
        raise BudgetError(f"level-1 sweep needs {p ** 3} candidates")
    grid = np.arange(p, dtype=np.int64)
    xg, yg = np.meshgrid(grid, grid, indexing="ij")
    xg, yg = xg.ravel(), yg.ravel()
    xs_list, ys_list, zs_list = [], [], []
    for z in range(p):
        val = (xg * xg % p + yg * yg % p + z * z + xg * yg % p * z
               + (p - a) * xg + (p - b) * yg - c * z - d) % p
        hit = val == 0
        xs_list.append(xg[hit])
        ys_list.append(yg[hit])
        zs_list.append(np.full(int(hit.sum()), z, dtype=np.int64))
    xs = np.concatenate(xs_list)
    ys = np.concatenate(ys_list)
    zs = np.concatenate(zs_list)
    for lev in range(2, level + 1):
        xs, ys, zs = _lift_solutions(surface, p, lev, xs, ys, zs, budget)
    return xs, ys, zs


def _surface_value(surface, xs, ys, zs, m):
    a, b, c, d = (v % m for v in surface.params)
    _check_modulus(m)
    v = (xs * xs % m + ys * ys % m + zs * zs % m + xs * ys % m * zs % m
         + (m - a) * xs % m + (m - b) * ys % m + (m - c) * zs % m - d) % m
    return v


def _lift_solutions(surface, p, level, xs, ys, zs, budget):
    """One Hensel step: solutions mod p^(level-1) -> solutions mod p^level."""
    a, b, c, _ = (v % p for v in surface.params)
    m_prev = p ** (level - 1)
    m = p ** level
    _check_modulus(m)
    gx = (2 * xs % p + ys * zs % p + (p - a)) % p
    gy = (2 * ys % p + zs * xs % p + (p - b)) % p
    gz = (2 * zs % p + xs * ys % p + (p - c)) % p
    smooth = (gx != 0) | (gy != 0) | (gz != 0)
    n_smooth = int(smooth.sum())
    n_sing = len(xs) - n_smooth
    total = n_smooth * p * p + n_sing * p ** 3
    if budget is not None and total > budget:
        raise BudgetError(
            f"level-{level} lift needs {total} candidates; raise the budget")
    out_x, out_y, out_z = [], [], []

    if n_smooth:
        sx, sy, sz = xs[smooth], ys[smooth], zs[smooth]
        e = _surface_value(surface, sx, sy, sz, m) // m_prev  # in [0, p)
        g = np.stack([gx[smooth], gy[smooth], gz[smooth]])
        # pivot: first coordinate with unit partial derivative; the other
        # two digits range freely and the pivot digit solves the linear
        # congruence e + <grad, d> = 0 mod p
        pivot = np.where(g[0] != 0, 0, np.where(g[1] != 0, 1, 2))
        lane = np.arange(n_smooth)
        free1 = np.where(pivot == 0, 1, 0)
        free2 = np.where(pivot == 2, 1, 2)
        inv_piv = _modpow_arrays(g[pivot, lane], p - 2, p)
        d1, d2 = np.meshgrid(np.arange(p, dtype=np.int64),
                             np.arange(p, dtype=np.int64), indexing="ij")
        rep = lambda arr: np.repeat(arr, p * p)
        t1 = np.tile(d1.ravel(), n_smooth)  # digit for the first free coord
        t2 = np.tile(d2.ravel(), n_smooth)  # digit for the second
        d_piv = (-(rep(e) + rep(g[free1, lane]) * t1
                   + rep(g[free2, lane]) * t2) * rep(inv_piv)) % p
        piv_r = rep(pivot)
        digit_x = np.where(piv_r == 0, d_piv, t1)
        digit_y = np.where(piv_r == 1, d_piv, np.where(piv_r == 0, t1, t2))
        digit_z = np.where(piv_r == 2, d_piv, t2)
        out_x.append((rep(sx) + m_prev * digit_x) % m)
        out_y.append((rep(sy) + m_prev * digit_y) % m)
        out_z.append((rep(sz) + m_prev * digit_z) % m)

    if n_sing:
        sx, sy, sz = xs[~smooth], ys[~smooth], zs[~smooth]
        dgrid = np.arange(p, dtype=np.int64)
        dx, dy, dz = np.meshgrid(dgrid, dgrid, dgrid, indexing="ij")
        rep3 = lambda arr: np.repeat(arr, p ** 3)
        cx = (rep3(sx) + m_prev * np.tile(dx.ravel(), n_sing)) % m
        cy = (rep3(sy) + m_prev * np.tile(dy.ravel(), n_sing)) % m
        cz = (rep3(sz) + m_prev * np.tile(dz.ravel(), n_sing)) % m
        keep = _surface_value(surface, cx, cy, cz, m) == 0
        out_x.append(cx[keep])
        out_y.append(cy[keep])
        out_z.append(cz[keep])

    xs2 = np.concatenate(out_x) if out_x else np.zeros(0, dtype=np.int64)
    ys2 = np.concatenate(out_y) if out_y else np.zeros(0, dtype=np.int64)
    zs2 = np.concatenate(out_z) if out_z else np.zeros(0, dtype=np.int64)
    return xs2, ys2, zs2


# -- generators as permutation arrays --------------------------------------------


def permutation_from_auto(point_set, auto):
    """Index permutation realizing a PolyAuto or MonomialAuto on the set."""
    idx = np.arange(point_set.size, dtype=np.int64)
    coords = point_set.decode(idx)
    m = point_set.modulus
    if point_set.kind == "torus-units":
        if not isinstance(auto, MonomialAuto):
            raise UsageError("unit-torus actions take MonomialAuto generators")
        image = _monomial_on_arrays(auto, coords, point_set)
    else:
        if not isinstance(auto, PolyAuto):
            raise UsageError("this point set takes PolyAuto generators")
        if auto.nvars != (2 if point_set.kind == "affine-plane" else 3):
            raise UsageError("generator arity does not match the point set")
        image = tuple(zpoly_eval_arrays(f, coords, m) for f in auto.forward)
    out = point_set.encode(image)
    if point_set.kind != "affine-plane":
        bad = np.nonzero(out < 0)[0]
        if len(bad):
            i = int(bad[0])
            witness = tuple(int(cc[i]) for cc in coords)
            raise NotInvariantError(
                f"generator {getattr(auto, 'label', '?')} leaves the set at {witness}",
                witness)
    counts = np.bincount(out, minlength=point_set.size)
    if (counts != 1).any():
        dup = int(np.nonzero(counts != 1)[0][0])
        witness = tuple(int(cc[0]) for cc in
                        point_set.decode(np.array([dup], dtype=np.int64)))
        raise NotInvariantError(
            f"generator {getattr(auto, 'label', '?')} is not a bijection "
            f"near {witness}", witness)
    return out


def _monomial_on_arrays(auto, coords, point_set):
    m = point_set.modulus
    p = point_set.p
    phi = m // p * (p - 1)  # unit-group order mod p^level
    (a, b), (c, d) = auto.matrix
    v1, v2 = coords
    alpha = auto.alpha if isinstance(auto.alpha, int) else auto.alpha.residue
    beta = auto.beta if isinstance(auto.beta, int) else auto.beta.residue
    if math.gcd(alpha, m) != 1 or math.gcd(beta, m) != 1:
        raise UsageError("monomial scales must be units for torus actions")
    w1 = alpha % m * _modpow_arrays(v1, a % phi, m) % m \
        * _modpow_arrays(v2, b % phi, m) % m
    w2 = beta % m * _modpow_arrays(v1, c % phi, m) % m \
        * _modpow_arrays(v2, d % phi, m) % m
    return (w1, w2)


# -- the partition itself ---------------------------------------------------------


class OrbitPartition:
    """Orbit labels over a flat index space; labels are minimal orbit indices."""

    __slots__ = ("point_set", "labels", "roots", "sizes")

    def __init__(self, point_set, labels):
        self.point_set = point_set
        self.labels = labels
        self.roots, self.sizes = np.unique(labels, return_counts=True)

    def find(self, i):
        return int(self.labels[i])

    @property
    def orbit_count(self):
        return len(self.roots)

    def max_size(self):
        return int(self.sizes.max()) if len(self.sizes) else 0

    def fixed_point_count(self):
        return int((self.sizes == 1).sum())

    def size_histogram(self):
        vals, counts = np.unique(self.sizes, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def orbit_of(self, i):
        """All indices sharing i's orbit (small orbits only; linear scan)."""
        return np.nonzero(self.labels == self.labels[i])[0]

    def __repr__(self):
        return (f"OrbitPartition({self.orbit_count} orbits, "
                f"max {self.max_size()}, of {self.point_set.size} points)")


def _cycle_min_pass(labels, perm, rounds):
    """Spread each cycle's minimum label along a permutation, in place."""
    ptr = perm
    for _ in range(rounds):
        labels = np.minimum(labels, labels[ptr])
        ptr = ptr[ptr]
    return labels


def orbit_partition(point_set, generators):
    """Partition the set into orbits of the group generated by `generators`.

    Generators may be PolyAuto/MonomialAuto objects or precomputed index
    permutations.  Invertibility makes single directions sufficient: x and
    g(x) always share an orbit, and cycle closure recovers g^{-1}.
    """
    n = point_set.size
    perms = [g if isinstance(g, np.ndarray) else permutation_from_auto(point_set, g)
             for g in generators]
    labels = np.arange(n, dtype=np.int64)
    if not perms or n == 0:
        return OrbitPartition(point_set, labels)
    rounds = max(1, int(math.ceil(math.log2(n))) + 1) if n > 1 else 1
    while True:
        before = labels
        for q in perms:
            labels = _cycle_min_pass(labels, q, rounds)
        labels = np.minimum(labels, labels[labels])
        if np.array_equal(labels, before):
            break
    return OrbitPartition(point_set, labels)


# -- statistics and scans ----------------------------------------------------------


def orbit_stats(partition):
    return {
        "orbit_count": partition.orbit_count,
        "max_size": partition.max_size(),
        "fixed_points": partition.fixed_point_count(),
        "size_histogram": partition.size_histogram(),
    }


def max_orbit_ratio(auto, p, level=1, budget=DEFAULT_BUDGET):
    """(max orbit length of the cyclic group of `auto` on the plane mod p^level)
    divided by p^level * ln(p^level)."""
    ps = FinitePointSet.affine_plane(p, level, budget)
    part = orbit_partition(ps, [auto])
    m = p ** level
    return part.max_size() / (m * math.log(m))


def transitivity_scan(generator_factory, primes, level=1, budget=DEFAULT_BUDGET):
    """One stats row per prime for the group given by generator_factory(p).

    Rows are dicts matching the CSV schema: p, level, orbit_count, max_orbit,
    fixed_points, ratio (max_orbit / (p^level ln p^level)), seconds (filled
    by the caller when timing is requested; 0.0 here for determinism).
    """
    rows = []
    for p in primes:
        ps = FinitePointSet.affine_plane(p, level, budget)
        part = orbit_partition(ps, generator_factory(p))
        m = p ** level
        rows.append({
            "p": p,
            "level": level,
            "orbit_count": part.orbit_count,
            "max_orbit": part.max_size(),
            "fixed_points": part.fixed_point_count(),
            "ratio": part.max_size() / (m * math.log(m)),
            "seconds": 0.0,
        })
    return rows


def reduce_point_set(point_set, level):
    """The same kind of point set one or more levels down."""
    if level > point_set.level:
        raise UsageError("can only reduce to a lower level")
    if point_set.kind == "affine-plane":
        return FinitePointSet.affine_plane(point_set.p, level, None)
    if point_set.kind == "markov-surface":
        return FinitePointSet.markov_surface(point_set.surface, point_set.p,
                                             level, None)
    return FinitePointSet.torus_units(point_set.p, level, None)


def refinement_probe(generators, set_low, set_high):
    """Compare orbits at level l with orbits at level l+1.

    For each level-l orbit: how many level-(l+1) orbits sit over it
    (fiber_orbit_count), and whether a single high orbit covers the entire
    preimage (is_full_preimage) — the clopen-closure signal.  The same exact
    generators act at both levels (reduction happens inside evaluation).
    Heuristic evidence only: a still-finer level may split further.
    """
    if set_high.level != set_low.level + 1:
        raise UsageError("refinement compares consecutive levels")
    part_low = orbit_partition(set_low, generators)
    part_high = orbit_partition(set_high, generators)
    m_low = set_low.modulus
    coords_high = set_high.decode(np.arange(set_high.size, dtype=np.int64))
    reduced = tuple(cc % m_low for cc in coords_high)
    low_idx = set_low.encode(reduced)
    if (low_idx < 0).any():
        i = int(np.nonzero(low_idx < 0)[0][0])
        witness = tuple(int(cc[i]) for cc in coords_high)
        raise NotInvariantError(
            f"high-level point {witness} does not reduce into the low-level set",
            witness)
    low_label_of_high = part_low.labels[low_idx]
    report = {}
    for root in part_low.roots:
        over = part_high.labels[low_label_of_high == root]
        fibers = len(np.unique(over))
        report[int(root)] = {
            "fiber_orbit_count": int(fibers),
            "is_full_preimage": fibers == 1,
            "preimage_size": int(len(over)),
        }
    return report


def bfs_orbit(apply_fn, start, limit=None):
    """Plain breadth-first orbit of a single point under callable generators.

    The reference implementation used by the test oracles; apply_fn is a list
    of point -> point callables on hashable points.
    """
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for f in apply_fn:
                y = f(x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if limit is not None and len(seen) > limit:
                        raise BudgetError("orbit exceeded the exploration limit")
        frontier = nxt
    return seen
