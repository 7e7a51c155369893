"""Orbit structure of plane polynomial automorphisms mod p.

Two stories.  First: the group generated by a Henon-type map and a
conjugate acts transitively on (Z/p)^2 for every odd prime except p=5,
where the origin sits alone in its own orbit.  Second: the single map
g1(x,y) = (y + x^2 + 5, -x) has surprisingly short orbits — the longest
stays below 2 p ln p, far under the p^2 available points.
"""

import math

from padicflow.orbits import FinitePointSet, orbit_partition, transitivity_scan
from padicflow.padic import is_prime
from padicflow.surfaces import bgs_g1, bgs_group

primes = [p for p in range(3, 62) if is_prime(p)]

print("two-generator group on (Z/p)^2:")
print("  p   orbits  largest  fixed")
for row in transitivity_scan(lambda p: list(bgs_group()), primes):
    print(f"  {row['p']:<4}{row['orbit_count']:^8}{row['max_orbit']:^9}"
          f"{row['fixed_points']:^7}")

part5 = orbit_partition(FinitePointSet.affine_plane(5), list(bgs_group()))
sizes = sorted(part5.sizes.tolist(), reverse=True)
print(f"\np=5 is the exception: orbit sizes {sizes} "
      f"(the singleton is the origin)")

print("\nsingle generator g1: longest orbit against the 2 p ln p ceiling")
print("  p     largest  2*p*ln(p)  points")
g = bgs_g1()
for p in (11, 101, 503, 1009):
    part = orbit_partition(FinitePointSet.affine_plane(p), [g])
    bound = 2 * p * math.log(p)
    print(f"  {p:<6}{part.max_size():<9}{bound:<11.1f}{p * p}")
    assert part.max_size() <= bound
