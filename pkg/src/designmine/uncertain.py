"""Uncertain design samples: truncated-Gaussian intervals and tuple-probability arithmetic.

A design sample with uncertainty is a hypercube in design space: one bounded
interval per attribute, each carrying a Gaussian density truncated and
renormalized on that interval.  Splitting the hypercube at a threshold sends a
computable fraction of the sample's probability mass to each side, which is
what lets a decision tree train on and classify such samples.

All types here are immutable; every operation returns new values, so anything
in this module can be shared freely across threads.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    EmptyDatasetError,
    InconsistentCriteriaError,
    IngestionError,
    InvalidParameterError,
)

__all__ = [
    "TruncatedGaussianMarginal",
    "UncertainTuple",
    "Dataset",
    "LabelCriteria",
    "make_marginal",
    "interval_marginal",
    "mass_on",
    "fresh_tuple",
    "partition_tuple",
    "dataset_mass",
    "label_probability",
    "label_masses",
    "load_dataset",
    "load_design_points",
    "dataset_from_design",
    "apply_labels",
    "load_criteria",
]


def _std_normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


@dataclass(frozen=True)
class TruncatedGaussianMarginal:
    """Gaussian density restricted to [lower, upper] and scaled to unit mass.

    ``mean`` is the original exact attribute value; ``normalizer`` is the
    coefficient that makes the truncated density integrate to 1 on the
    interval.  A zero-width interval (``sigma == 0``) represents a certain
    value: all mass sits at ``mean``.
    """

    lower: float
    upper: float
    mean: float
    sigma: float
    normalizer: float

    @property
    def is_point(self) -> bool:
        return self.sigma == 0.0

    def pdf(self, x: float) -> float:
        """Density at x (0 outside the interval; undefined for point marginals)."""
        if self.is_point:
            raise InvalidParameterError("point marginal has no density")
        if x < self.lower or x > self.upper:
            return 0.0
        z = (x - self.mean) / self.sigma
        return self.normalizer * math.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))


def make_marginal(mean: float, relative_deviation: float) -> TruncatedGaussianMarginal:
    """Expand an exact value into its uncertain interval.

    The interval spans ``mean*(1-R) .. mean*(1+R)`` (ordered, so negative
    means work), sigma is one sixth of the width so the interval covers three
    standard deviations each side, and the normalizer restores unit mass.
    ``R == 0`` yields a certain point marginal.
    """
    if not math.isfinite(mean):
        raise InvalidParameterError(f"mean must be finite, got {mean}")
    if not 0.0 <= relative_deviation < 1.0:
        raise InvalidParameterError(
            f"relative deviation must be in [0, 1), got {relative_deviation}"
        )
    if relative_deviation == 0.0:
        return TruncatedGaussianMarginal(mean, mean, mean, 0.0, 1.0)
    if mean == 0.0:
        raise InvalidParameterError(
            "mean must be nonzero when relative deviation > 0 (interval would be empty)"
        )
    a = mean * (1.0 - relative_deviation)
    b = mean * (1.0 + relative_deviation)
    lower, upper = (a, b) if a < b else (b, a)
    return interval_marginal(lower, upper, mean)


def interval_marginal(
    lower: float, upper: float, mean: float | None = None
) -> TruncatedGaussianMarginal:
    """Marginal on an explicit interval; mean defaults to the midpoint.

    Sigma follows the three-sigma policy (width / 6) and the normalizer is
    computed so that the truncated density has unit mass whatever the mean's
    position inside the interval.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise InvalidParameterError(f"interval must be finite, got [{lower}, {upper}]")
    if not upper > lower:
        raise InvalidParameterError(f"need lower < upper, got [{lower}, {upper}]")
    if mean is None:
        mean = 0.5 * (lower + upper)
    if not lower <= mean <= upper:
        raise InvalidParameterError(f"mean {mean} outside interval [{lower}, {upper}]")
    sigma = (upper - lower) / 6.0
    raw = _std_normal_cdf((upper - mean) / sigma) - _std_normal_cdf((lower - mean) / sigma)
    return TruncatedGaussianMarginal(lower, upper, mean, sigma, 1.0 / raw)


def mass_on(marginal: TruncatedGaussianMarginal, a: float, b: float) -> float:
    """Probability mass of the marginal on [a, b].

    Bounds are clamped to the marginal's interval, so out-of-range requests
    return 0 rather than raising.  Point marginals put all mass at the mean.
    """
    if a > b:
        raise InvalidParameterError(f"need a <= b, got [{a}, {b}]")
    if marginal.is_point:
        return 1.0 if a <= marginal.mean <= b else 0.0
    lo = max(a, marginal.lower)
    hi = min(b, marginal.upper)
    if hi <= lo:
        return 0.0
    z0 = (lo - marginal.mean) / marginal.sigma
    z1 = (hi - marginal.mean) / marginal.sigma
    return marginal.normalizer * (_std_normal_cdf(z1) - _std_normal_cdf(z0))


@dataclass(frozen=True)
class UncertainTuple:
    """One design sample: marginals, the active sub-box, a label, and its mass.

    ``active_box`` narrows each marginal to the sub-interval still owned by
    this (fragment of a) sample; ``box_mass`` caches the per-attribute mass of
    the active box under the *original* marginal, and ``tp`` is their product
    (the tuple probability).  Fragments produced by splitting keep the
    original marginals untouched.
    """

    id: object
    marginals: tuple[TruncatedGaussianMarginal, ...]
    active_box: tuple[tuple[float, float], ...]
    box_mass: tuple[float, ...]
    label: str
    tp: float


def fresh_tuple(
    tuple_id: object, marginals: Sequence[TruncatedGaussianMarginal], label: str
) -> UncertainTuple:
    """A newly ingested sample: full intervals active, tuple probability 1."""
    marginals = tuple(marginals)
    box = tuple((m.lower, m.upper) for m in marginals)
    mass = tuple(1.0 for _ in marginals)
    return UncertainTuple(tuple_id, marginals, box, mass, label, 1.0)


def _split_attr_mass(
    marginal: TruncatedGaussianMarginal,
    box: tuple[float, float],
    current_mass: float,
    s: float,
) -> tuple[float, float]:
    """Mass of the left/right pieces when the active box is cut at s.

    Point marginals route their whole mass by the certain-data rule
    ``x <= s goes left``; continuous marginals integrate the two pieces.
    """
    if marginal.is_point:
        if s >= marginal.mean:
            return current_mass, 0.0
        return 0.0, current_mass
    a, b = box
    sc = min(max(s, a), b)
    return mass_on(marginal, a, sc), mass_on(marginal, sc, b)


def _replaced_product(masses: Sequence[float], attr: int, value: float) -> float:
    tp = 1.0
    for k, m in enumerate(masses):
        tp *= value if k == attr else m
    return tp


def partition_tuple(
    t: UncertainTuple, attr: int, s: float
) -> tuple[UncertainTuple, UncertainTuple]:
    """Cut a sample's hypercube at threshold s on one attribute.

    Returns the (left, right) fragments with active boxes [a, s] and [s, b]
    (clamped, so a threshold outside the box leaves one side empty).  Labels
    and marginals are inherited; the fragment masses add up to the parent's.
    """
    if not 0 <= attr < len(t.marginals):
        raise IndexError(f"attribute index {attr} out of range")
    marginal = t.marginals[attr]
    a, b = t.active_box[attr]
    m_left, m_right = _split_attr_mass(marginal, (a, b), t.box_mass[attr], s)
    sc = min(max(s, a), b)

    left_box = list(t.active_box)
    right_box = list(t.active_box)
    if not marginal.is_point:
        left_box[attr] = (a, sc)
        right_box[attr] = (sc, b)

    left_mass = list(t.box_mass)
    right_mass = list(t.box_mass)
    left_mass[attr] = m_left
    right_mass[attr] = m_right
    tp_left = _replaced_product(t.box_mass, attr, m_left)
    tp_right = _replaced_product(t.box_mass, attr, m_right)
    left = UncertainTuple(t.id, t.marginals, tuple(left_box), tuple(left_mass), t.label, tp_left)
    right = UncertainTuple(t.id, t.marginals, tuple(right_box), tuple(right_mass), t.label, tp_right)
    return left, right


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of uncertain tuples over named attributes.

    ``origin_mass`` remembers the mass of the root training dataset so that
    coverage metrics computed on sub-datasets keep a fixed denominator.
    """

    attribute_names: tuple[str, ...]
    label_set: tuple[str, ...]
    tuples: tuple[UncertainTuple, ...]
    origin_mass: float

    def __post_init__(self):
        k = len(self.attribute_names)
        known = set(self.label_set)
        for t in self.tuples:
            if len(t.marginals) != k:
                raise InvalidParameterError(
                    f"tuple {t.id!r} has {len(t.marginals)} marginals, expected {k}"
                )
            if t.label not in known:
                raise InvalidParameterError(
                    f"tuple {t.id!r} has label {t.label!r} outside the label set"
                )

    def replace_tuples(self, tuples: Iterable[UncertainTuple]) -> "Dataset":
        """Same schema and origin mass, different tuples (used when splitting)."""
        return Dataset(self.attribute_names, self.label_set, tuple(tuples), self.origin_mass)


def dataset_mass(dataset: Dataset) -> float:
    """Total tuple-probability mass (the size of an uncertain dataset)."""
    return sum(t.tp for t in dataset.tuples)


def label_masses(dataset: Dataset) -> dict[str, float]:
    """Mass per label, with every label of the label set present (possibly 0)."""
    masses = {label: 0.0 for label in dataset.label_set}
    for t in dataset.tuples:
        masses[t.label] += t.tp
    return masses


def label_probability(dataset: Dataset, label: str) -> float:
    """Share of the dataset's mass carrying the given label."""
    total = dataset_mass(dataset)
    if total <= 0.0:
        raise EmptyDatasetError("label probability undefined on an empty dataset")
    return label_masses(dataset)[label] / total


def dataset_from_design(
    attribute_names: Sequence[str],
    rows: Sequence[Sequence[float]],
    labels: Sequence[str],
    uncertainty: float,
    label_set: Sequence[str] | None = None,
) -> Dataset:
    """Build a fresh dataset from exact design rows plus labels.

    Each exact value is expanded to a truncated-Gaussian marginal with
    relative deviation ``uncertainty`` (0 keeps the data certain).  Tuple ids
    are 1-based row numbers.
    """
    if len(rows) != len(labels):
        raise InvalidParameterError("rows and labels must have equal length")
    tuples = []
    for i, (row, label) in enumerate(zip(rows, labels), start=1):
        marginals = [make_marginal(float(v), uncertainty) for v in row]
        tuples.append(fresh_tuple(i, marginals, label))
    label_set = sorted(set(labels) if label_set is None else label_set)
    ds = Dataset(tuple(attribute_names), tuple(label_set), tuple(tuples), 0.0)
    return Dataset(ds.attribute_names, ds.label_set, ds.tuples, dataset_mass(ds))


def load_dataset(
    path, uncertainty: float, label_set: Sequence[str] | None = None
) -> Dataset:
    """Read a labelled dataset CSV (``attr1,...,attrK,label`` header).

    Exact values are expanded to marginals via ``make_marginal``; when a
    label set is declared, rows with labels outside it are rejected with the
    offending row named.
    """
    names, rows, labels = _read_csv(path, expect_label=True)
    if label_set is not None:
        declared = set(label_set)
        for i, label in enumerate(labels, start=2):
            if label not in declared:
                raise IngestionError(
                    f"{path}: row {i}, column 'label': label {label!r} "
                    f"not in declared label set {sorted(declared)}"
                )
    try:
        return dataset_from_design(names, rows, labels, uncertainty, label_set)
    except InvalidParameterError as exc:
        raise IngestionError(f"{path}: {exc}") from exc


def load_design_points(path):
    """Read a design-point CSV (dataset format, label column optional).

    Returns ``(attribute_names, rows, labels)`` with ``labels`` None when the
    file has no label column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline()
    has_label = header.strip().split(",")[-1].strip() == "label"
    names, rows, labels = _read_csv(path, expect_label=has_label)
    return names, rows, (labels if has_label else None)


def _read_csv(path, expect_label: bool):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if expect_label:
            if header[-1] != "label":
                raise IngestionError(f"{path}: last column must be 'label', got {header[-1]!r}")
            names = header[:-1]
        else:
            names = header
        if not names:
            raise IngestionError(f"{path}: no attribute columns")
        if len(set(names)) != len(names):
            raise IngestionError(f"{path}: duplicate attribute names in header")
        rows: list[list[float]] = []
        labels: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise IngestionError(
                    f"{path}: row {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            values = []
            for name, cell in zip(names, row):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise IngestionError(
                        f"{path}: row {lineno}, column {name!r}: "
                        f"could not parse {cell.strip()!r} as a number"
                    ) from None
            rows.append(values)
            if expect_label:
                labels.append(row[-1].strip())
    return names, rows, labels


# --- threshold labelling ----------------------------------------------------

_OPS = {
    "<": lambda x, v: x < v,
    "<=": lambda x, v: x <= v,
    ">": lambda x, v: x > v,
    ">=": lambda x, v: x >= v,
}


@dataclass(frozen=True)
class LabelCriteria:
    """Threshold rules that sort response records into good/poor/fallback.

    ``good`` predicates must *all* hold for the good label; *any* ``poor``
    predicate assigns the poor label (good wins when both would, which the
    construction-time disjointness check rules out); everything else gets the
    fallback label.  Each predicate is ``(response_name, op, value)`` with op
    one of ``< <= > >=``.
    """

    good: tuple[tuple[str, str, float], ...]
    poor: tuple[tuple[str, str, float], ...]
    good_label: str = "g"
    poor_label: str = "p"
    fallback_label: str = "m"

    def __post_init__(self):
        for name, op, _ in self.good + self.poor:
            if op not in _OPS:
                raise InvalidParameterError(f"unknown comparison {op!r} for {name!r}")
        _check_disjoint(self.good, self.poor)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({self.good_label, self.poor_label, self.fallback_label}))

    @property
    def response_names(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for name, _, _ in self.good + self.poor:
            seen.setdefault(name)
        return tuple(seen)


def _region(op: str, value: float):
    # (lo, lo_closed, hi, hi_closed) for the set {x : x op value}
    if op == "<":
        return (-math.inf, False, value, False)
    if op == "<=":
        return (-math.inf, False, value, True)
    if op == ">":
        return (value, False, math.inf, False)
    return (value, True, math.inf, False)


def _intersect(r1, r2):
    lo, lo_c = max((r1[0], not r1[1]), (r2[0], not r2[1]))
    lo_c = not lo_c
    hi, hi_c = min((r1[2], r1[3]), (r2[2], r2[3]))
    return (lo, lo_c, hi, hi_c)


def _nonempty(r) -> bool:
    lo, lo_c, hi, hi_c = r
    return lo < hi or (lo == hi and lo_c and hi_c)


def _check_disjoint(good, poor):
    good_by_name: dict[str, tuple] = {}
    for name, op, value in good:
        region = _region(op, value)
        if name in good_by_name:
            region = _intersect(good_by_name[name], region)
        good_by_name[name] = region
    for name, op, value in poor:
        if name not in good_by_name:
            raise InconsistentCriteriaError(
                f"poor threshold on {name!r} has no good threshold keeping it disjoint"
            )
        if _nonempty(_intersect(good_by_name[name], _region(op, value))):
            raise InconsistentCriteriaError(
                f"good and poor regions overlap for response {name!r} "
                f"(misordered thresholds)"
            )


def _lookup(record, name: str) -> float:
    if isinstance(record, Mapping):
        if name not in record:
            raise InvalidParameterError(f"response {name!r} missing from record")
        return record[name]
    getter = getattr(record, "value", None)
    if getter is None:
        raise InvalidParameterError(f"cannot read response {name!r} from {type(record).__name__}")
    return getter(name)


def apply_labels(responses: Sequence, criteria: LabelCriteria) -> list[str]:
    """Label each response record: good if all good thresholds hold, poor if
    any poor threshold fires, fallback otherwise."""
    out = []
    for record in responses:
        if all(_OPS[op](_lookup(record, name), value) for name, op, value in criteria.good):
            out.append(criteria.good_label)
        elif any(_OPS[op](_lookup(record, name), value) for name, op, value in criteria.poor):
            out.append(criteria.poor_label)
        else:
            out.append(criteria.fallback_label)
    return out


def load_criteria(source) -> LabelCriteria:
    """Build criteria from a JSON file path or an already-parsed dict."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = source
    labels = data.get("labels", {})
    try:
        return LabelCriteria(
            good=tuple((n, op, float(v)) for n, op, v in data["good"]),
            poor=tuple((n, op, float(v)) for n, op, v in data["poor"]),
            good_label=labels.get("good", "g"),
            poor_label=labels.get("poor", "p"),
            fallback_label=labels.get("fallback", "m"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"malformed labelling criteria: {exc}") from exc
