"""Growing a decision tree on uncertain data.

The toy problem: a valve leaks (high risk, HR) unless the inlet pressure is
low AND the tube wall is thick.  Internal diameter is a decoy variable.  The
tree has to recover the two generative thresholds (P_e = 1 MPa, Tk = 2 mm)
from 200 noisy-interval samples, and its leaves carry label-probability
distributions rather than hard classes.
"""

import numpy as np

from designmine import (
    TreeConfig,
    build_tree,
    classify,
    dataset_from_design,
    fresh_tuple,
    k_fold_cv,
    make_marginal,
    training_accuracy,
)
from designmine.tree import LeafNode, tree_depth

rng = np.random.default_rng(0)
n = 200
rows = np.column_stack([
    rng.uniform(1.0, 3.0, n),    # Tk   tube wall thickness, mm
    rng.uniform(5.0, 15.0, n),   # D_e  internal diameter, mm (irrelevant)
    rng.uniform(0.2, 2.0, n),    # P_e  inlet pressure, MPa
])
labels = ["LR" if (p <= 1.0 and tk > 2.0) else "HR" for tk, _, p in rows]
dataset = dataset_from_design(["Tk", "D_e", "P_e"], rows.tolist(), labels, uncertainty=0.1)

tree = build_tree(dataset, TreeConfig(max_layers=3))


def render(node, names, indent="", tag=""):
    if isinstance(node, LeafNode):
        lp = ", ".join(f"{k}: {v:.2f}" for k, v in node.lp.items())
        print(f"{indent}{tag}leaf  ({lp})  mass {node.mass:.1f}")
    else:
        print(f"{indent}{tag}{names[node.attr]} <= {node.threshold:.3f} ?")
        render(node.left, names, indent + "    ", "yes: ")
        render(node.right, names, indent + "    ", "no:  ")


print("=== learned tree (depth cap 3) ===")
render(tree.root, dataset.attribute_names)
print(f"\ndepth {tree_depth(tree)}, training accuracy {training_accuracy(tree, dataset):.4f}")
print("note: the decoy variable D_e never appears in the tree")

print("\n=== classifying new uncertain designs ===")
for tk, de, pe in [(2.4, 10.0, 0.6), (1.4, 10.0, 0.6), (2.4, 10.0, 1.6), (2.05, 10.0, 1.02)]:
    t = fresh_tuple(0, [make_marginal(v, 0.1) for v in (tk, de, pe)], "LR")
    lp = classify(tree, t)
    print(f"  Tk={tk:4}  P_e={pe:4}  ->  " + ", ".join(f"p({k})={v:.3f}" for k, v in lp.items()))

print("\n=== 5-fold cross-validation ===")
mean, folds = k_fold_cv(dataset, 5, TreeConfig(max_layers=3, seed=1))
print(f"fold accuracies: {[f'{a:.3f}' for a in folds]}")
print(f"mean accuracy:   {mean:.4f}")
