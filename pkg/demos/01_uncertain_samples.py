"""Uncertain design samples: intervals, masses, and what a split does.

A design value like a wall thickness of 2.0 mm with 10% manufacturing scatter
becomes an interval [1.8, 2.2] carrying a truncated Gaussian.  A sample with
several such values is a little hypercube of probability mass, and cutting
that cube at a threshold sends part of the mass left and part right.
"""

from designmine import make_marginal, mass_on, fresh_tuple, partition_tuple

print("=== one uncertain value ===")
m = make_marginal(2.0, 0.1)
print(f"mean 2.0, R=10%  ->  interval [{m.lower}, {m.upper}], sigma = {m.sigma:.4f}")
print(f"normalizer (mass correction for the clipped tails) = {m.normalizer:.6f}")
print(f"mass on the whole interval : {mass_on(m, m.lower, m.upper):.12f}")
print(f"mass below the mean        : {mass_on(m, m.lower, 2.0):.12f}")
print(f"mass of [1.9, 2.1]         : {mass_on(m, 1.9, 2.1):.6f}")

print()
print("=== a two-variable sample is a probability box ===")
t = fresh_tuple("demo", [make_marginal(2.0, 0.1), make_marginal(5.0, 0.1)], label="g")
print(f"fresh sample: active box {t.active_box}, tuple probability {t.tp}")

left, right = partition_tuple(t, 0, 2.05)
print(f"split variable 0 at 2.05:")
print(f"  left  fragment  tp = {left.tp:.6f}  box {left.active_box[0]}")
print(f"  right fragment  tp = {right.tp:.6f}  box {right.active_box[0]}")
print(f"  mass conserved: {left.tp + right.tp:.12f}")

print()
print("=== R = 0 reduces to ordinary certain data ===")
c = fresh_tuple("certain", [make_marginal(3.0, 0.0)], label="g")
for s in (2.5, 3.0, 3.5):
    l, r = partition_tuple(c, 0, s)
    side = "left" if l.tp == 1.0 else "right"
    print(f"  split at {s}: all mass goes {side}  (x <= s rule)")
