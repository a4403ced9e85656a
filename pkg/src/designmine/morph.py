"""Thin-plate-spline morphing from displaced control points to node clouds.

A morph is fitted by interpolating the control-point displacement field with
the kernel r^2 * ln(r) plus an affine part, solving the standard saddle-point
system whose side conditions keep the kernel weights orthogonal to the affine
space.  The fitted map then moves arbitrary node coordinates.  Natural
logarithm throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve
from scipy.spatial.distance import cdist, pdist

from .errors import ConditioningError, IngestionError, InvalidParameterError

__all__ = [
    "ControlPointSet",
    "MorphMap",
    "tps_kernel",
    "fit_morph",
    "apply_morph",
    "load_points",
    "save_points",
]

#: Condition numbers beyond this are treated as numerically singular.
CONDITION_LIMIT = 1e12

#: Relative residual allowed for the fitted linear system.
RESIDUAL_LIMIT = 1e-8


def tps_kernel(r):
    """r^2 * ln(r), continued with 0 at r = 0.  Accepts scalars or arrays."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(r > 0.0, r * r * np.log(np.where(r > 0.0, r, 1.0)), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ControlPointSet:
    """Original and displaced coordinates of the morphing control points."""

    original: np.ndarray
    displaced: np.ndarray

    def __post_init__(self):
        orig = np.asarray(self.original, dtype=float)
        disp = np.asarray(self.displaced, dtype=float)
        object.__setattr__(self, "original", orig)
        object.__setattr__(self, "displaced", disp)
        if orig.ndim != 2 or orig.shape[1] != 3:
            raise InvalidParameterError("control points must be an n-by-3 array")
        if disp.shape != orig.shape:
            raise InvalidParameterError("original and displaced shapes differ")
        if orig.shape[0] < 4:
            raise InvalidParameterError("need at least 4 control points")


@dataclass(frozen=True, eq=False)
class MorphMap:
    """Fitted morphing coefficients: kernel weights (n-by-3), the 3-by-3
    affine block, the constant offset, the original control points, and the
    condition estimate of the solved system."""

    kernel_weights: np.ndarray
    affine: np.ndarray
    offset: np.ndarray
    original: np.ndarray
    condition: float


def _system_matrix(original: np.ndarray, regularization: float):
    n = original.shape[0]
    a = tps_kernel(cdist(original, original))
    if regularization:
        a = a + regularization * np.eye(n)
    b = np.hstack([np.ones((n, 1)), original])
    m = np.zeros((n + 4, n + 4))
    m[:n, :n] = a
    m[:n, n:] = b
    m[n:, :n] = b.T
    return m


def fit_morph(cps: ControlPointSet, regularization: float = 0.0) -> MorphMap:
    """Solve the saddle-point system mapping original control points onto the
    displaced ones.

    Raises a conditioning error (with the condition estimate) for duplicate
    or coplanar-degenerate control points; a small ``regularization`` added to
    the kernel block can rescue near-degenerate layouts.
    """
    original = cps.original
    n = original.shape[0]
    if pdist(original).min() == 0.0:
        raise ConditioningError("duplicate control points make the system singular")
    m = _system_matrix(original, regularization)
    condition = float(np.linalg.cond(m))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise ConditioningError(
            f"morphing system is singular or ill-conditioned "
            f"(condition estimate {condition:.3e}); duplicate or coplanar "
            f"control points, or try a small regularization"
        )
    rhs = np.zeros((n + 4, 3))
    rhs[:n] = cps.displaced
    sol = solve(m, rhs)
    residual = np.linalg.norm(m @ sol - rhs) / max(np.linalg.norm(rhs), 1.0)
    if residual > RESIDUAL_LIMIT:
        raise ConditioningError(
            f"solver residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e} "
            f"(condition estimate {condition:.3e})"
        )
    return MorphMap(
        kernel_weights=sol[:n],
        affine=sol[n + 1 :],
        offset=sol[n],
        original=original,
        condition=condition,
    )


def apply_morph(morph: MorphMap, nodes) -> np.ndarray:
    """Morphed coordinates of a node cloud (m-by-3).

    Evaluated at the original control points this reproduces the displaced
    control points to solver tolerance.
    """
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    if nodes.shape[1] != 3:
        raise InvalidParameterError("nodes must be an m-by-3 array")
    a = tps_kernel(cdist(nodes, morph.original))
    return a @ morph.kernel_weights + nodes @ morph.affine + morph.offset


def load_points(path):
    """Read an `id,x,y,z` CSV; ids come back verbatim as strings."""
    ids, coords = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if header != ["id", "x", "y", "z"]:
            raise IngestionError(f"{path}: expected header id,x,y,z, got {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise IngestionError(f"{path}: row {lineno}: wrong field count")
            ids.append(row[0])
            try:
                coords.append([float(c) for c in row[1:]])
            except ValueError:
                raise IngestionError(f"{path}: row {lineno}: bad coordinate") from None
    return ids, np.asarray(coords, dtype=float)


def save_points(path, ids, coords) -> None:
    """Write an `id,x,y,z` CSV preserving ids and row order."""
    coords = np.asarray(coords)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y", "z"])
        for i, row in zip(ids, coords):
            writer.writerow([i] + [repr(float(v)) for v in row])
