"""
Landau radius from the data majorants
=====================================

The univalence radius r0 is the root of a strictly decreasing function of
r built from the majorants L1, L2, L3 and |c|. Bisection finds it without
any derivative information.
"""

import numpy as np

from bvpdn import bounds
from bvpdn.bounds import BoundParams

###############################################################################
# Unit majorants. The constants feeding L4 and L5 are closed forms.
p = BoundParams(L1=1.0, L2=1.0, L3=1.0, c_abs=0.0)
print(f"n3(0) = {bounds.n3(0):.10f}   n4(0) = {bounds.n4(0):.10f}")
print(f"m1    = {bounds.m1():.10f}   m2    = {bounds.m2():.10f}")
print(f"L4 = {bounds.l4(p):.10f}   L5 = {bounds.l5(p):.10f}")

###############################################################################
# The function is positive at 0 and falls steeply.
for r in (0.0, 0.001, 0.0015, 0.002, 0.01):
    print(f"phi({r:<6}) = {bounds.phi(r, p): .6f}")

###############################################################################
# Bisection returns the root, a bracket with a sign change and the covered
# radius lower bound.
res = bounds.landau_radius(p, tol=1e-12)
print(res)

###############################################################################
# The radius shrinks as the data grow. Scaling every majorant by s moves
# r0 roughly like 1/s^2 for large s, since L4 and L5 both scale with s.
for s in (0.25, 0.5, 1.0, 2.0, 4.0):
    q = BoundParams(s, s, s, 0.0)
    print(f"scale {s:<5} r0 = {bounds.landau_radius(q).r0:.6e}")

###############################################################################
# With only L1 the problem reduces to a harmonic one; the radius is far
# larger than in the unit case.
only_harmonic = bounds.landau_radius(BoundParams(L1=1.0))
print("L1 only:", only_harmonic.r0, "R0 lower:", only_harmonic.R0_lower)
assert np.isclose(only_harmonic.L4, 4 / np.pi)
