"""From tree branches to design rules, and screening candidates by
predicted label probability.

Every root-to-leaf branch is a box in design space.  Branches aiming at the
target label are scored two ways: ACC (how pure the leaf is) and CTT (how
much of the total training mass the leaf correctly captures, a
robustness/coverage measure).  The most robust sufficiently-pure branch
becomes the design rule; sampling inside its box then yields candidates whose
predicted label probabilities rank their reliability under uncertainty.
"""

import numpy as np

from designmine import (
    TreeConfig,
    build_tree,
    branch_to_rule,
    dataset_from_design,
    fresh_tuple,
    lhs_in_rule,
    make_marginal,
    score_branches,
    screen_designs,
    select_branch,
)

rng = np.random.default_rng(4)
n = 200
rows = np.column_stack([
    rng.uniform(1.0, 3.0, n),
    rng.uniform(5.0, 15.0, n),
    rng.uniform(0.2, 2.0, n),
])
labels = ["LR" if (p <= 1.0 and tk > 2.0) else "HR" for tk, _, p in rows]
dataset = dataset_from_design(["Tk", "D_e", "P_e"], rows.tolist(), labels, uncertainty=0.1)
tree = build_tree(dataset, TreeConfig(max_layers=4))

print("=== ACC/CTT table for the low-risk branches ===")
scores = score_branches(tree, dataset, target_label="LR")
print(f"{'id':>5} {'acc':>7} {'ctt':>7} {'mass':>7}")
for s in scores:
    print(f"{s.branch.id:>5} {s.acc:>7.3f} {s.ctt:>7.3f} {s.branch.mass:>7.2f}")

chosen = select_branch(scores, "LR", lp_threshold=0.85)
print(f"\nselected: {chosen.branch.id} (max CTT among branches with lp >= 0.85)")

bounds = [(1.0, 3.0), (5.0, 15.0), (0.2, 2.0)]
rule = branch_to_rule(chosen.branch, dataset.attribute_names, bounds, chosen.ctt)
print("\n=== the rule as interval constraints ===")
for name, (lo, hi) in rule.box().items():
    print(f"  {lo:7.3f} <= {name:4} <= {hi:.3f}")

print("\n=== 20 fresh candidates inside the rule box, screened ===")
candidates = lhs_in_rule(rule, 20, seed=11)
tuples = [
    fresh_tuple(i + 1, [make_marginal(v, 0.1) for v in row], "LR")
    for i, row in enumerate(candidates)
]
ranked = screen_designs(tree, tuples, "LR", top_k=20)
print(f"{'rank':>4} {'id':>3} {'lp(LR)':>8}")
for d in ranked:
    marker = "  <- kept" if d.rank <= 10 else ""
    print(f"{d.rank:>4} {d.id:>3} {d.lp['LR']:>8.4f}{marker}")
top10 = [d.lp["LR"] for d in ranked[:10]]
all20 = [d.lp["LR"] for d in ranked]
print(f"\nmean lp(LR): top-10 screened {np.mean(top10):.4f} vs all 20 {np.mean(all20):.4f}")
