"""Branch enumeration, interval design rules, and reliability screening.

A root-to-leaf path is a conjunction of threshold constraints, i.e. a box in
design space.  Branches are scored by ACC (the leaf's dominant-label
probability) and CTT (correctly classified target mass over total training
mass, a coverage/robustness measure), and the most robust sufficiently-pure
branch becomes the design rule.  Candidate designs are screened by their
predicted label probability.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    InconsistentBranchError,
    InvalidParameterError,
    SelectionError,
)
from .tree import UncertainTree, LeafNode, classify
from .uncertain import Dataset, LabelCriteria, UncertainTuple, dataset_mass, partition_tuple

__all__ = [
    "Branch",
    "Rule",
    "BranchScore",
    "ScreenedDesign",
    "PipelineConfig",
    "enumerate_branches",
    "branch_to_rule",
    "branch_ctt",
    "score_branches",
    "select_branch",
    "screen_designs",
    "rules_payload",
    "save_rules",
    "rule_from_payload",
]


@dataclass(frozen=True)
class Branch:
    """One root-to-leaf path: ordered (attr, relation, threshold) constraints
    plus the leaf it ends in.  Relations are '<=' (left) and '>' (right)."""

    id: str
    path: tuple
    leaf: LeafNode

    @property
    def lp(self) -> dict:
        return self.leaf.lp

    @property
    def mass(self) -> float:
        return self.leaf.mass

    @property
    def dominant(self) -> str:
        return self.leaf.dominant

    @property
    def number(self) -> int:
        return int(self.id[1:])


@dataclass(frozen=True)
class Rule:
    """A per-attribute box intersected from a branch path and the global
    design bounds, with the branch's quality metrics attached."""

    attribute_names: tuple
    lower: tuple
    upper: tuple
    label: str
    acc: float
    ctt: float
    branch_id: str

    def __post_init__(self):
        for name, lo, hi in zip(self.attribute_names, self.lower, self.upper):
            if not lo < hi:
                raise InconsistentBranchError(f"empty interval for {name!r}: [{lo}, {hi}]")

    def box(self) -> dict:
        return {
            name: (lo, hi)
            for name, lo, hi in zip(self.attribute_names, self.lower, self.upper)
        }

    def contains(self, x: Sequence[float]) -> bool:
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))


@dataclass(frozen=True)
class BranchScore:
    branch: Branch
    acc: float
    ctt: float


@dataclass(frozen=True)
class ScreenedDesign:
    id: object
    lp: dict
    rank: int


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the mining workflow needs about one design problem: global
    variable bounds, the label to aim for, the purity threshold for rule
    selection, the labelling thresholds, and the tree depth cap."""

    variable_names: tuple
    lower: tuple
    upper: tuple
    criteria: Optional[LabelCriteria] = None
    target_label: str = "g"
    lp_threshold: float = 0.85
    max_layers: int = 6

    def __post_init__(self):
        for name, lo, hi in zip(self.variable_names, self.lower, self.upper):
            if not lo < hi:
                raise InvalidParameterError(f"bounds for {name!r} not ordered: [{lo}, {hi}]")
        if not 0.0 < self.lp_threshold <= 1.0:
            raise InvalidParameterError("lp threshold must be in (0, 1]")

    def bounds(self) -> list:
        return list(zip(self.lower, self.upper))


def enumerate_branches(tree: UncertainTree) -> list:
    """All branches in left-to-right leaf order, ids b1, b2, ..."""
    branches = []

    def walk(node, path):
        if isinstance(node, LeafNode):
            branches.append(Branch(f"b{len(branches) + 1}", tuple(path), node))
            return
        walk(node.left, path + [(node.attr, "<=", node.threshold)])
        walk(node.right, path + [(node.attr, ">", node.threshold)])

    walk(tree.root, [])
    return branches


def branch_to_rule(
    branch: Branch,
    attribute_names: Sequence[str],
    bounds: Sequence,
    ctt: float = float("nan"),
) -> Rule:
    """Intersect the branch constraints with the global bounds.

    '<=' tightens the upper edge of the attribute interval, '>' the lower
    edge; attributes the path never tests keep their global bounds.
    """
    lower = [lo for lo, _ in bounds]
    upper = [hi for _, hi in bounds]
    for attr, rel, threshold in branch.path:
        if rel == "<=":
            upper[attr] = min(upper[attr], threshold)
        else:
            lower[attr] = max(lower[attr], threshold)
    for name, lo, hi in zip(attribute_names, lower, upper):
        if not lo < hi:
            raise InconsistentBranchError(
                f"branch {branch.id} intersects to an empty interval on {name!r}"
            )
    return Rule(
        tuple(attribute_names),
        tuple(lower),
        tuple(upper),
        branch.dominant,
        branch.lp[branch.dominant],
        ctt,
        branch.id,
    )


def branch_ctt(tree: UncertainTree, branch: Branch, d_origin: Dataset) -> float:
    """Training mass of target-labelled samples reaching this leaf, relative
    to the whole training dataset."""
    target = branch.dominant
    total = dataset_mass(d_origin)
    reached = 0.0
    for t in d_origin.tuples:
        if t.label != target:
            continue
        frag = t
        for attr, rel, threshold in branch.path:
            left, right = partition_tuple(frag, attr, threshold)
            frag = left if rel == "<=" else right
            if frag.tp <= 0.0:
                break
        reached += frag.tp
    return reached / total


def score_branches(
    tree: UncertainTree, d_origin: Dataset, target_label: Optional[str] = None
) -> list:
    """ACC/CTT table for the tree's branches (optionally only those whose
    dominant label is the target)."""
    scores = []
    for branch in enumerate_branches(tree):
        if target_label is not None and branch.dominant != target_label:
            continue
        scores.append(
            BranchScore(branch, branch.lp[branch.dominant], branch_ctt(tree, branch, d_origin))
        )
    return scores


def select_branch(scores: Sequence[BranchScore], target_label: str, lp_threshold: float):
    """Most robust qualifying branch: among branches dominated by the target
    label with lp(target) at or above the threshold, pick maximum CTT; ties go
    to higher target probability, then the lowest branch id."""
    qualifying = [
        s
        for s in scores
        if s.branch.dominant == target_label and s.branch.lp[target_label] >= lp_threshold
    ]
    if not qualifying:
        raise SelectionError(
            f"no branch is dominated by {target_label!r} with lp >= {lp_threshold}; "
            "lower the threshold or grow a deeper tree"
        )
    return max(
        qualifying,
        key=lambda s: (s.ctt, s.branch.lp[target_label], -s.branch.number),
    )


def screen_designs(
    tree: UncertainTree,
    designs: Sequence[UncertainTuple],
    target_label: str,
    top_k: int,
) -> list:
    """Rank designs by predicted target-label probability and keep the top k.

    Ties are broken by ascending design id; the returned records carry the
    full label-probability vectors.
    """
    if top_k > len(designs):
        raise InvalidParameterError(f"top_k={top_k} exceeds {len(designs)} designs")
    ranked = sorted(
        ((t.id, classify(tree, t)) for t in designs),
        key=lambda pair: (-pair[1][target_label], pair[0]),
    )
    return [ScreenedDesign(i, lp, rank) for rank, (i, lp) in enumerate(ranked[:top_k], start=1)]


def rules_payload(
    tree: UncertainTree,
    d_origin: Dataset,
    bounds: Sequence,
    target_label: str,
    lp_threshold: float,
) -> dict:
    """JSON-ready rule report: every target branch with its ACC/CTT and box,
    plus the selected branch id.

    Branches whose box intersects the global bounds to an empty set (their
    region lies entirely in the uncertainty fringe outside the declared
    design space) are dropped; selection runs over the remaining branches.
    """
    kept = []
    for s in score_branches(tree, d_origin, target_label):
        try:
            rule = branch_to_rule(s.branch, tree.attribute_names, bounds, s.ctt)
        except InconsistentBranchError:
            continue
        kept.append((s, rule))
    selected = select_branch([s for s, _ in kept], target_label, lp_threshold)
    branches = [
        {
            "id": s.branch.id,
            "acc": s.acc,
            "ctt": s.ctt,
            "mass": s.branch.mass,
            "box": {name: list(iv) for name, iv in rule.box().items()},
        }
        for s, rule in kept
    ]
    return {
        "target": target_label,
        "theta": lp_threshold,
        "branches": branches,
        "selected": selected.branch.id,
    }


def save_rules(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def rule_from_payload(payload: dict, branch_id: Optional[str] = None) -> Rule:
    """Rebuild the (selected) rule box from a rules JSON payload."""
    wanted = branch_id or payload["selected"]
    for entry in payload["branches"]:
        if entry["id"] == wanted:
            names = tuple(entry["box"].keys())
            lower = tuple(entry["box"][n][0] for n in names)
            upper = tuple(entry["box"][n][1] for n in names)
            return Rule(names, lower, upper, payload["target"], entry["acc"], entry["ctt"], wanted)
    raise InvalidParameterError(f"branch {wanted!r} not present in rules payload")
