"""Interpolating discrete iteration by an analytic flow.

A polynomial map that is a small perturbation of the identity (every
non-identity coefficient divisible by p^2) embeds into a one-parameter
family Phi^t: integer times reproduce plain iteration, and the family
accepts any p-adic time in between.  This script builds one such flow,
checks it against iteration, runs time backwards, and evaluates the
generating vector field.
"""

from padicflow.flow import flow_from_zpolys, theta_field
from padicflow.padic import PadicInt
from padicflow.zpoly import ZPoly

P = 5
PREC = 10

x = ZPoly.variable(2, 0)
y = ZPoly.variable(2, 1)
forward = [x + 25 * y * y, y + 25 * (x + 3)]

flow = flow_from_zpolys(forward, P, PREC)
print(f"flow built: {flow!r}")
print(f"series terms K={flow.K}, working digits={flow.work_precision}, "
      f"digits lost={flow.loss}")

point = (7, 12)
pf = flow.at_point(point)

print(f"\nPhi^t({point}) against plain iteration, mod {P}^{PREC}:")
cur = point
m = P ** PREC
for t in range(4):
    via_flow = tuple(z.residue for z in pf.eval(t))
    print(f"  t={t}:  flow={via_flow}  iteration={cur}")
    assert via_flow == cur
    cur = tuple(f.eval_mod(cur, m) for f in forward)

back = tuple(z.residue for z in pf.eval(-1))
again = tuple(f.eval_mod(back, m) for f in forward)
print(f"\nt=-1 gives {back}; applying the map once returns {again}")
assert again == point

# fractional time: any 5-adic integer is a legal exponent, so Phi^(1/2)
# is a square root of the map under composition
t_half = PadicInt(P, PREC, pow(2, -1, m))  # the 5-adic 1/2
half = pf.eval(t_half)
half_again = flow.at_point(half).eval(t_half)
one_step = tuple(f.eval_mod(point, m) for f in forward)
print(f"\nPhi^(1/2)({point}) = {tuple(z.residue for z in half)}")
print(f"applying Phi^(1/2) twice: {tuple(z.residue for z in half_again)}"
      f"  = f({point}) = {one_step}")
assert tuple(z.residue for z in half_again) == one_step

theta = theta_field(flow)
print("\ngenerating vector field Theta (d/dt at t=0), per coordinate:")
for i, comp in enumerate(theta.components):
    terms = sorted(comp.coeffs.items())[:4]
    print(f"  coord {i}: {len(comp.coeffs)} terms, leading {terms}")
vals = [z.residue for z in (c.evaluate(point) for c in theta.components)]
fd = [(a - b) % P ** theta.components[0].precision
      for a, b in zip(tuple(f.eval_mod(point, m) for f in forward), point)]
print(f"Theta({point}) = {vals}; first finite difference f(x)-x = {fd}")
print(f"they agree mod 5^4: {[v % 625 for v in vals]} == {[d % 625 for d in fd]}")
assert all(v % 625 == d % 625 for v, d in zip(vals, fd))
