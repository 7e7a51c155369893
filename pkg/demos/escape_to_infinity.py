"""Exact escape detection on a cubic surface fiber.

Fixing z on x^2+y^2+z^2+xyz = Ax+By+Cz+D, the composite of the x- and
y-involutions acts on the (x,y) fiber by an affine map whose matrix has
trace z^2-2.  When |z| > 1 the eigenvalues separate in absolute value
and points are pushed toward infinity: their coordinate valuations sink
without bound.  Integral starting points can never do that — everything
stays p-adically bounded.  All arithmetic here is exact rationals, so
the dichotomy is a theorem about each printed trace, not a float
artifact.
"""

from fractions import Fraction

from padicflow.measure import escape_test
from padicflow.surfaces import MarkovSurface

P = 3

# a start with |z| = 3: valuations dive immediately
y0 = -2 + 9  # chosen so (1/3, y0, 1/3) lies on the surface below
surface = MarkovSurface(0, 0, 0, y0 * y0 + 1)
start = (Fraction(1, 3), y0, Fraction(1, 3))
trace = escape_test(start, surface, P, steps=10)
print(f"escaping start {start} on D={surface.D}:")
print(f"  min coordinate valuation per step: {trace}")
assert all(b < a for a, b in zip(trace, trace[1:]))

# an integral start on its own surface: valuations never go negative
pt = (2, 3, 5)
d = pt[0] ** 2 + pt[1] ** 2 + pt[2] ** 2 + pt[0] * pt[1] * pt[2]
bounded = MarkovSurface(0, 0, 0, d)
trace = escape_test(pt, bounded, P, steps=60)
print(f"\nintegral start {pt} on D={d}:")
print(f"  valuation range over 60 steps: [{min(trace)}, {max(trace)}]")
assert min(trace) >= 0
