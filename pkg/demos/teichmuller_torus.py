"""Teichmuller lifts and monomial dynamics on unit pairs.

Every unit residue a mod p has a unique lift omega(a) to p-adic digits
with omega(a)^(p-1) = 1 exactly; these are the torsion points of the
multiplicative group.  A matrix of exponents with determinant +-1 acts
invertibly on pairs of units (u,v) -> (u^a v^b, u^c v^d); reducing mod
p^level gives finite orbits this script partitions.
"""

from padicflow.orbits import FinitePointSet, orbit_partition
from padicflow.padic import PadicInt, teichmuller
from padicflow.surfaces import MonomialAuto, torsion_test

P, PREC = 7, 8

print(f"Teichmuller lifts at p={P}, {PREC} digits:")
for a in range(1, P):
    w = teichmuller(PadicInt(P, PREC, a))
    assert w ** (P - 1) == 1 and torsion_test(w)
    print(f"  omega({a}) = {w.residue:>7}   omega^6 = {(w ** 6).residue}")

# a unit that is not a lift fails the torsion test
u = PadicInt(P, PREC, 3 + P)
print(f"\ntorsion_test(omega(3)) = {torsion_test(teichmuller(u))}, "
      f"torsion_test(3 + 7) = {torsion_test(u)}")

cat = MonomialAuto(((2, 1), (1, 1)))  # (u,v) -> (u^2 v, u v), det 1
print(f"\nmonomial map {cat!r} on unit pairs mod {P}^2:")
ps = FinitePointSet.torus_units(P, 2)
part = orbit_partition(ps, [cat])
print(f"  {ps.size} unit pairs fall into {part.orbit_count} orbits; "
      f"largest {part.max_size()}, fixed points {part.fixed_point_count()}")

hist = part.size_histogram()
print("  orbit size -> count:", dict(sorted(hist.items())[:8]))

# torsion pairs form a tiny invariant subgrid: orbits inside the
# (p-1) x (p-1) Teichmuller grid never leave it
w2 = teichmuller(PadicInt(P, 2, 3))
img = cat.apply((w2, w2))
print(f"  image of a torsion pair stays torsion: "
      f"{torsion_test(img[0])}, {torsion_test(img[1])}")
