"""Latin hypercube sampling: stratification you can see.

Each variable's range is cut into n equal strata and every stratum receives
exactly one sample, so even small designs cover the space evenly.  The same
generator samples rule boxes, which is how new candidates are produced inside
a mined design rule.
"""

import numpy as np

from designmine import Rule, SamplingPlan, lhs, lhs_in_rule, sample_count_heuristic

plan = SamplingPlan(bounds=((0.0, 1.0), (10.0, 30.0)), n=10, seed=42)
x = lhs(plan)

print("=== 10 samples over [0,1] x [10,30] ===")
for row in x:
    print(f"  ({row[0]:.3f}, {row[1]:6.2f})")

print("\nstratum occupancy per variable (each cell must be exactly 1):")
for j, (lo, hi) in enumerate(plan.bounds):
    strata = np.floor((x[:, j] - lo) / (hi - lo) * plan.n).astype(int)
    counts = np.bincount(np.clip(strata, 0, plan.n - 1), minlength=plan.n)
    print(f"  variable {j}: {counts.tolist()}")

print("\nASCII scatter (10 x 10 grid, * = sample):")
grid = [["." for _ in range(10)] for _ in range(10)]
for row in x:
    cx = min(int(row[0] * 10), 9)
    cy = min(int((row[1] - 10.0) / 20.0 * 10), 9)
    grid[9 - cy][cx] = "*"
for line in grid:
    print("   " + " ".join(line))

print("\n=== sampling a rule box keeps every sample feasible ===")
rule = Rule(("Tk", "P_e"), (2.1, 0.2), (3.0, 1.05), "LR", 0.95, 0.2, "b3")
samples = lhs_in_rule(rule, 8, seed=7)
for row in samples:
    ok = all(lo <= v <= hi for v, lo, hi in zip(row, rule.lower, rule.upper))
    print(f"  Tk={row[0]:.3f}  P_e={row[1]:.3f}  inside box: {ok}")

print(f"\nadvisory minimum sample count for k=8 variables: {sample_count_heuristic(8)}")
