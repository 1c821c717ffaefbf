"""Assemble a selection task into a standard-form integer covering program.

The produced model is min c.x subject to A.x >= b with x integer in [0, u],
where every entry of A, b is nonnegative and every entry of c is positive.
Mask rows are built in admittance space after applying the series/load
impedance pre-transforms, so the solver itself stays purely linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence

import numpy as np

from .errors import InfeasibleMaskError, NoPartsError, ValidationError
from .partlib import (CapacitorPart, PartFilter, admittance_magnitude,
                      derated_capacitance, filter_parts, impedance_magnitude)


@dataclass(frozen=True)
class MaskPoint:
    """One impedance-envelope requirement: |Z| at `frequency` below `impedance_target`.

    `series_impedance` is the per-part series path (e.g. via structure) added to
    each part's |Z|; `load_impedance` is subtracted from the target.
    """

    frequency: float
    impedance_target: float
    series_impedance: float = 0.0
    load_impedance: float = 0.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValidationError(f"mask frequency must be > 0, got {self.frequency!r}")
        if not self.impedance_target > 0:
            raise ValidationError(
                f"mask impedance target must be > 0, got {self.impedance_target!r}")
        if self.series_impedance < 0 or self.load_impedance < 0:
            raise ValidationError("mask series/load impedances must be >= 0")


@dataclass(frozen=True)
class ProblemSpec:
    """One selection task: capacitance floor, impedance mask, and preference K."""

    ceff_target: float = 0.0          # farads
    bias_voltage: float = 0.0         # volts
    mask: tuple[MaskPoint, ...] = ()
    preference_k: float = 1.0         # mm^2 per cent
    filter: PartFilter = field(default_factory=PartFilter)

    def __post_init__(self):
        if self.ceff_target < 0:
            raise ValidationError(f"ceff_target must be >= 0, got {self.ceff_target!r}")
        if self.preference_k < 0:
            raise ValidationError(f"preference_k must be >= 0, got {self.preference_k!r}")
        if self.bias_voltage < 0:
            raise ValidationError(f"bias_voltage must be >= 0, got {self.bias_voltage!r}")
        freqs = [m.frequency for m in self.mask]
        if any(f1 <= f0 for f0, f1 in zip(freqs, freqs[1:])):
            raise ValidationError("mask frequencies must be strictly ascending")


@dataclass(frozen=True)
class MilpModel:
    """Integer covering program: min c.x, A.x >= b, 0 <= x <= u, x integer."""

    variable_ids: tuple[str, ...]
    objective: np.ndarray          # c, shape (I,), all > 0
    matrix: np.ndarray             # A, shape (M, I), all >= 0
    rhs: np.ndarray                # b, shape (M,), all >= 0
    row_labels: tuple[str, ...]    # "ceff" or "mask@<freq>"
    upper_bounds: np.ndarray       # u, shape (I,), nonnegative ints
    costs: tuple[Decimal, ...]     # a_i in cents, for cost/area breakdowns
    areas: np.ndarray              # b_i in mm^2

    def __post_init__(self):
        for arr in (self.objective, self.matrix, self.rhs, self.upper_bounds, self.areas):
            arr.setflags(write=False)

    @property
    def num_variables(self) -> int:
        return len(self.variable_ids)

    @property
    def num_rows(self) -> int:
        return len(self.row_labels)


def transform_mask(point: MaskPoint) -> float:
    """Admittance target for a mask point after the load-impedance transform.

    The effective impedance target is T - Z_L; at Z_L >= T no capacitor bank
    can meet the mask and the point is rejected as infeasible.
    """
    if point.load_impedance >= point.impedance_target:
        raise InfeasibleMaskError(point.frequency, point.impedance_target,
                                  point.load_impedance)
    return 1.0 / (point.impedance_target - point.load_impedance)


def part_mask_admittance(part: CapacitorPart, point: MaskPoint, bias: float) -> float:
    """Part admittance seen through the series impedance: 1 / (|Z| + Z_m)."""
    zmag = impedance_magnitude(part, point.frequency, bias)
    total = zmag + point.series_impedance
    if total == 0.0:
        return math.inf
    return 1.0 / total


def derive_upper_bound(column: np.ndarray, rhs: np.ndarray) -> int:
    """Smallest count of one part alone that satisfies every row it appears in.

    Larger counts are strictly dominated because objective coefficients are
    positive. A part appearing in no row gets bound 0.
    """
    bound = 0
    for a, b in zip(column, rhs):
        if a > 0.0:
            need = math.ceil(b / a)
            while need * a < b:  # guard against float division rounding down
                need += 1
            bound = max(bound, need)
    return bound


def build_model(spec: ProblemSpec, parts: Sequence[CapacitorPart]) -> MilpModel:
    """Filter the library and assemble the covering program for one spec."""
    selected = filter_parts(parts, spec.filter)
    nonvacuous = spec.ceff_target > 0 or len(spec.mask) > 0
    if not selected and nonvacuous:
        raise NoPartsError(
            "no parts remain after filtering but the spec has constraints")

    labels: list[str] = []
    rows: list[list[float]] = []
    rhs: list[float] = []

    if spec.ceff_target > 0:
        labels.append("ceff")
        rows.append([derated_capacitance(p, spec.bias_voltage) for p in selected])
        rhs.append(spec.ceff_target)

    for point in spec.mask:
        labels.append(f"mask@{point.frequency:g}")
        rows.append([part_mask_admittance(p, point, spec.bias_voltage) for p in selected])
        rhs.append(transform_mask(point))

    n = len(selected)
    matrix = np.array(rows, dtype=float).reshape(len(labels), n)
    rhs_arr = np.array(rhs, dtype=float)
    objective = np.array(
        [spec.preference_k * float(p.cost) + p.area for p in selected], dtype=float)
    uppers = np.array(
        [derive_upper_bound(matrix[:, i], rhs_arr) for i in range(n)], dtype=int)

    return MilpModel(
        variable_ids=tuple(p.id for p in selected),
        objective=objective,
        matrix=matrix,
        rhs=rhs_arr,
        row_labels=tuple(labels),
        upper_bounds=uppers,
        costs=tuple(p.cost for p in selected),
        areas=np.array([p.area for p in selected], dtype=float),
    )
