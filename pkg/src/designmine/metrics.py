"""Crashworthiness response metrics from curve and time-history data.

Works in fixed units: deflection in m, force in kN, intrusion in mm, mass in
kg, time in s, energy in J.  Integrals use the trapezoidal rule on the
samples as given (no interpolation beyond linear).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import IngestionError, InvalidParameterError

__all__ = [
    "ForceDeflectionCurve",
    "IntrusionHistories",
    "ResponseRecord",
    "avgstiff",
    "peak_force",
    "peak_intrusion",
    "total_mass",
    "sea",
    "load_curve",
    "load_histories",
]


@dataclass(frozen=True)
class ForceDeflectionCurve:
    """Sampled crush response: deflection u (m, strictly increasing from 0)
    against force (kN)."""

    u: np.ndarray
    force: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        f = np.asarray(self.force, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "force", f)
        if u.ndim != 1 or f.shape != u.shape or u.size < 2:
            raise InvalidParameterError("curve needs matching 1-d u/force arrays, >= 2 samples")
        if u[0] != 0.0:
            raise InvalidParameterError("deflection must start at 0")
        if not np.all(np.diff(u) > 0):
            raise InvalidParameterError("deflection must be strictly increasing")

    @property
    def final_deflection(self) -> float:
        return float(self.u[-1])

    def absorbed_energy(self) -> float:
        """Area under the curve in kJ (kN * m)."""
        return float(np.trapezoid(self.force, self.u))


@dataclass(frozen=True)
class IntrusionHistories:
    """Four marker displacement signals (mm) on a common time grid (s)."""

    t: np.ndarray
    signals: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        s = np.asarray(self.signals, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "signals", s)
        if t.ndim != 1 or not np.all(np.diff(t) > 0):
            raise InvalidParameterError("time grid must be 1-d and strictly increasing")
        if s.shape != (4, t.size):
            raise InvalidParameterError("need exactly four signals on the time grid")


@dataclass(frozen=True)
class ResponseRecord:
    """Objective values for one design.

    ``avgstiff`` maps component names to their average stiffness (kN/m); the
    scalar responses are peak crush force (kN), peak averaged intrusion (mm),
    total mass (kg), and specific energy absorption (J/kg).
    """

    f_p: float
    s_p: float
    mass: float
    sea: float
    avgstiff: dict

    def __post_init__(self):
        values = [self.f_p, self.s_p, self.mass, self.sea, *self.avgstiff.values()]
        if not all(np.isfinite(v) for v in values):
            raise InvalidParameterError("response values must be finite")
        if self.mass <= 0:
            raise InvalidParameterError("mass must be positive")

    def value(self, name: str) -> float:
        """Look up a response by its labelling-criteria name."""
        flat = {"F_p": self.f_p, "S_p": self.s_p, "M": self.mass, "SEA": self.sea}
        if name in flat:
            return flat[name]
        if name.startswith("avgstiff(") and name.endswith(")"):
            component = name[len("avgstiff(") : -1]
            if component in self.avgstiff:
                return self.avgstiff[component]
        raise InvalidParameterError(f"response {name!r} missing from record")


def avgstiff(curve: ForceDeflectionCurve) -> float:
    """Mean crush force over final deflection (kN/m): the curve integral
    divided by the squared final deflection."""
    d = curve.final_deflection
    if d <= 0:
        raise InvalidParameterError("degenerate curve: final deflection is zero")
    return curve.absorbed_energy() / (d * d)


def peak_force(forces: Sequence[float]) -> float:
    """Largest sampled force (kN) of a crush history."""
    forces = np.asarray(forces, dtype=float)
    if forces.size == 0:
        raise InvalidParameterError("empty force history")
    return float(np.max(forces))


def peak_intrusion(histories: IntrusionHistories) -> float:
    """Maximum over time of the four-marker average intrusion (mm)."""
    return float(np.max(np.mean(histories.signals, axis=0)))


def total_mass(masses: Sequence[float]) -> float:
    """Summed component masses (kg)."""
    if len(masses) == 0:
        raise InvalidParameterError("no component masses given")
    return float(sum(masses))


def sea(curve: ForceDeflectionCurve, mass: float) -> float:
    """Specific energy absorption (J/kg): absorbed energy per unit mass."""
    if mass <= 0:
        raise InvalidParameterError("mass must be positive")
    return curve.absorbed_energy() * 1e3 / mass


def load_curve(path) -> ForceDeflectionCurve:
    """Read a `u_m,F_kN` CSV."""
    u, f = _load_columns(path, ("u_m", "F_kN"))
    return ForceDeflectionCurve(np.asarray(u), np.asarray(f))


def load_histories(path) -> IntrusionHistories:
    """Read a `t_s,s1_mm,s2_mm,s3_mm,s4_mm` CSV."""
    cols = _load_columns(path, ("t_s", "s1_mm", "s2_mm", "s3_mm", "s4_mm"))
    return IntrusionHistories(np.asarray(cols[0]), np.asarray(cols[1:]))


def _load_columns(path, expected):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if header != list(expected):
            raise IngestionError(
                f"{path}: expected header {','.join(expected)}, got {','.join(header)}"
            )
        columns = [[] for _ in expected]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected):
                raise IngestionError(f"{path}: row {lineno}: wrong field count")
            for name, cell, col in zip(expected, row, columns):
                try:
                    col.append(float(cell))
                except ValueError:
                    raise IngestionError(
                        f"{path}: row {lineno}, column {name!r}: bad number {cell.strip()!r}"
                    ) from None
    return columns
