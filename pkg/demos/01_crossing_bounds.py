"""
Crossing bounds for monotone floor/threshold pairs
==================================================

A walk through the bound machinery: build curve pairs, bracket the
threshold-crossing probability with certified truncation, compare with
the continuous relaxation, calibrate threshold families to a target
level, and watch the bound trivialize when the threshold grows too
slowly.
"""

import math

import anytime_ville as av

# The classic special case: zero floor, constant threshold. A process
# with initial expectation 1 reaches 20 with probability at most 1/20.
bracket = av.crossing_bound(av.BoundQuery(av.Constant(0.0), av.Constant(20.0), m0=1.0))
print("constant threshold 20, m0=1:")
print(f"  bracket = [{bracket.lower:.10f}, {bracket.upper:.10f}]  (exactly 1/20)")

# Now let the floor recede: the process may dip as low as -ln(1+n). Each
# unit of new room below funds another attempt at the threshold, so the
# threshold must grow superlinearly in f for a nontrivial bound.
f = av.LogFloor(1.0)

# Quadratic threshold family, calibrated so the continuous bound is 0.05.
b = av.calibrate_quadratic(0.05, 1.0)
g = av.QuadraticThreshold(1.0, b, f)
print(f"\nquadratic threshold, calibrated b = {b:.6f}:")
cont = av.continuous_bound(f, g, m0=0.0)
print(f"  continuous bound  = {cont.value:.10f}")
for horizon in (10 ** 3, 10 ** 5):
    br = av.crossing_bound(av.BoundQuery(f, g, 0.0, horizon))
    print(f"  horizon {horizon:>7}: bracket = [{br.lower:.6f}, {br.upper:.6f}]"
          f"  width = {br.width:.2e}")

# The discrete bound is strictly sharper than its continuous relaxation;
# the bracket narrows from both sides as the truncation horizon grows.

# Exp-concave dampener families generalize the quadratic: any h with
# e^{-h} concave and h(inf) = 0 induces a valid threshold, and the
# crossing exponent is exactly h(0).
poly = av.calibrate_expconcave(av.PolynomialDampener(1.0, 1.0, 3.0), 0.05)
fat = av.calibrate_expconcave(av.FatTailDampener(1.0, math.e, 2.0), 0.55)
for name, h, delta in (("polynomial c=3", poly, 0.05), ("fat-tail c=2", fat, 0.55)):
    g_h = av.ExpConcaveThreshold(h, f)
    res = av.continuous_bound(f, g_h, m0=0.0)
    print(f"\n{name}: h(0) = {float(h.h(0.0)):.6f}")
    print(f"  continuous bound = {res.value:.8f}  (target {delta})")
    print(f"  g(0) = {g_h.value(0.0):.4f}, g(1e6) = {g_h.value(1e6):.4f}")

# Counterexample: a threshold proportional to a diverging floor. The
# exponent integral diverges and the bound is the trivial 1.
res = av.continuous_bound(av.LogFloor(1.0), av.LogFloor(2.0), m0=0.0)
print(f"\ng = 2f (proportional growth): bound = {res.value}, divergent = {res.divergent}")
