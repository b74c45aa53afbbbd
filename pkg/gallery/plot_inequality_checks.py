"""
Checking the pointwise bounds on random data
============================================

The verification harness measures how far each bound is from being
violated. Positive slack means the bound holds with room to spare.
"""

import numpy as np

from bvpdn import problems, verify

###############################################################################
# One random manufactured problem, normalized so that w(0) = 0 and the
# Jacobian at the origin is 1.
rng = np.random.default_rng(11)
w = problems.landau_normalized(problems.random_bih_polynomial(rng))
prob = problems.manufactured_problem(w)
print("polynomial terms:", len(w.terms), " degree:", w.degree)

###############################################################################
# Sup norms of the data are estimated by dense sampling.
norms = verify.DataNorms.of(prob)
print(norms)

###############################################################################
# Share solver evaluations between the checks with a cache.
zs = verify.sample_points(rng, 20)
cache = verify.SampleCache(prob)
for check in (
    verify.check_thm1,
    verify.check_thm2,
    verify.check_g_operator_bounds,
    verify.check_lemma_derivative_bounds,
):
    rec = check(prob, zs, cache=cache, norms=norms)
    print(f"{rec.name:<7} points {rec.points_tested:>3}  worst slack {rec.worst_slack:10.4f}  at {rec.worst_point:.3f}")

###############################################################################
# The coefficient bound is sharp: a two-valued boundary trace reaches it.
rec = verify.check_harmonic_coefficients(verify.extremal_trace(1.0), 1.0, n_max=4)
print("|a1| + |b1| =", rec.metadata["a1_plus_b1"], " 4/pi =", 4 / np.pi)

###############################################################################
# A whole suite as a text table.
print(verify.run_suite("thm2", seed=3, n_problems=3, n_samples=5).to_text())
