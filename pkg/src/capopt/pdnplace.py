"""Placement-location-aware selection across a coupled PDN.

Each location carries its own impedance mask, area preference, and optional
capacitance floor; locations are joined by parasitic coupling admittances.
Remote banks help a location only through the series combination of the
coupling path and the bank itself, which makes the constraints nonlinear in
the counts, so the solver is an exact depth-first enumeration with two prunes:

* objective: node cost plus an ideal-PDN completion bound (merging all
  locations into one node yields a covering MILP whose LP relaxation is a
  valid lower bound, because finite coupling only reduces admittance);
* feasibility: effective admittance is monotone in counts, so if the box's
  upper corner misses any requirement the whole subtree is infeasible.

Exactness over that enumeration caps the scale at desk size: the search
refuses boxes with more than `max_leaves` corners (default two million,
roughly a dozen variables with counts up to six).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional, Sequence

import numpy as np

from .capmodel import (MaskPoint, MilpModel, derive_upper_bound,
                       part_mask_admittance, transform_mask)
from .errors import SearchSpaceExceeded, ValidationError
from .milp import MilpConfig, solve_lp, solve_milp
from .partlib import CapacitorPart, admittance_magnitude, derated_capacitance


@dataclass(frozen=True)
class PlacementLocation:
    label: str
    k_weight: float                      # mm^2 per cent, this location's K_j
    mask: tuple[MaskPoint, ...] = ()     # empty = no local requirement
    ceff_target: float = 0.0             # farads, local requirement

    def __post_init__(self):
        if self.k_weight < 0:
            raise ValidationError(f"location '{self.label}': K must be >= 0")
        if self.ceff_target < 0:
            raise ValidationError(f"location '{self.label}': ceff_target must be >= 0")


class CouplingMap:
    """Symmetric coupling admittances between locations, keyed by frequency.

    An edge with frequency None applies at every frequency; an exact-frequency
    edge overrides it. Missing edges mean zero coupling.
    """

    def __init__(self, edges: Sequence[tuple[str, str, Optional[float], float]] = ()):
        self._edges: dict[tuple[str, str], dict[Optional[float], float]] = {}
        for a, b, freq, value in edges:
            if a == b:
                raise ValidationError(f"coupling edge {a!r}-{b!r} joins a location to itself")
            if value < 0:
                raise ValidationError(f"coupling edge {a!r}-{b!r} must be >= 0")
            key = (a, b) if a <= b else (b, a)
            per_freq = self._edges.setdefault(key, {})
            if freq in per_freq and per_freq[freq] != value:
                raise ValidationError(
                    f"conflicting coupling values for edge {a!r}-{b!r} at {freq!r} Hz")
            per_freq[freq] = value

    def admittance(self, label_a: str, label_b: str, frequency: float) -> float:
        key = (label_a, label_b) if label_a <= label_b else (label_b, label_a)
        per_freq = self._edges.get(key)
        if not per_freq:
            return 0.0
        if frequency in per_freq:
            return per_freq[frequency]
        return per_freq.get(None, 0.0)

    def edges(self) -> list[tuple[str, str, Optional[float], float]]:
        out = []
        for (a, b), per_freq in sorted(self._edges.items()):
            for freq, value in sorted(per_freq.items(), key=lambda kv: (kv[0] is None, kv[0] or 0.0)):
                out.append((a, b, freq, value))
        return out


@dataclass(frozen=True)
class PlacementProblem:
    locations: tuple[PlacementLocation, ...]
    coupling: CouplingMap
    parts: tuple[CapacitorPart, ...]
    bias_voltage: float = 0.0

    def __post_init__(self):
        if not self.locations:
            raise ValidationError("placement problem needs at least one location")
        labels = [loc.label for loc in self.locations]
        if len(set(labels)) != len(labels):
            raise ValidationError("location labels must be unique")

    def location_index(self, label: str) -> int:
        for j, loc in enumerate(self.locations):
            if loc.label == label:
                return j
        raise ValidationError(f"unknown location label {label!r}")


@dataclass(frozen=True)
class LocationCheck:
    label: str
    kind: str          # "mask" or "ceff"
    frequency: Optional[float]
    achieved: float
    target: float
    satisfied: bool


@dataclass(frozen=True)
class PlacementSolution:
    counts: tuple[tuple[int, ...], ...]   # N[i][j], parts by locations
    objective: float
    status: str                           # "optimal" | "infeasible"
    checks: tuple[LocationCheck, ...]
    nodes_explored: int
    wall_time: float


@dataclass(frozen=True)
class PlacementConfig:
    count_cap: Optional[int] = None   # uniform per-variable bound override
    max_leaves: float = 2e6           # refuse boxes with more corners than this


def _mask_point_at(loc: PlacementLocation, frequency: float) -> Optional[MaskPoint]:
    for point in loc.mask:
        if point.frequency == frequency:
            return point
    return None


def _part_admittance(problem: PlacementProblem, part: CapacitorPart,
                     loc: PlacementLocation, frequency: float) -> float:
    point = _mask_point_at(loc, frequency)
    if point is not None:
        return part_mask_admittance(part, point, problem.bias_voltage)
    return admittance_magnitude(part, frequency, problem.bias_voltage)


def effective_admittance(counts, location: int, frequency: float,
                         problem: PlacementProblem) -> float:
    """Admittance seen at a location: local bank plus coupled remote banks.

    Remote banks arrive through the series combination of the coupling path
    and the bank, so an empty bank or a zero coupling contributes nothing.
    """
    n = np.asarray(counts, dtype=float)
    if n.shape != (len(problem.parts), len(problem.locations)):
        raise ValidationError(
            f"counts shape {n.shape} does not match (parts, locations)")
    if np.any(n < 0):
        raise ValidationError("counts must be nonnegative")

    sums = np.empty(len(problem.locations))
    for k, loc in enumerate(problem.locations):
        sums[k] = sum(
            n[i, k] * _part_admittance(problem, part, loc, frequency)
            for i, part in enumerate(problem.parts) if n[i, k] > 0)

    total = sums[location]
    label_j = problem.locations[location].label
    for k, loc in enumerate(problem.locations):
        if k == location:
            continue
        y_jk = problem.coupling.admittance(label_j, loc.label, frequency)
        if y_jk <= 0.0 or sums[k] <= 0.0:
            continue
        total += 1.0 / (1.0 / y_jk + 1.0 / sums[k])
    return total


@dataclass(frozen=True)
class _Row:
    location: int
    kind: str                  # "mask" | "ceff"
    frequency: Optional[float]
    target: float              # admittance target (S) or capacitance (F)
    coeffs: np.ndarray         # per (part, location) column in flat i*J+j order


def _build_rows(problem: PlacementProblem) -> list[_Row]:
    """Per-location requirements with pre-transformed targets and coefficients.

    A mask row's coefficient for column (i, k) is part i's transformed
    admittance at location k; series combination with the coupling happens at
    evaluation time. Capacitance rows are local: remote columns get zero.
    """
    num_i = len(problem.parts)
    num_j = len(problem.locations)
    rows: list[_Row] = []
    for j, loc in enumerate(problem.locations):
        for point in loc.mask:
            coeffs = np.zeros(num_i * num_j)
            for k, at in enumerate(problem.locations):
                for i, part in enumerate(problem.parts):
                    coeffs[i * num_j + k] = _part_admittance(problem, part, at,
                                                             point.frequency)
            rows.append(_Row(location=j, kind="mask", frequency=point.frequency,
                             target=transform_mask(point), coeffs=coeffs))
        if loc.ceff_target > 0:
            coeffs = np.zeros(num_i * num_j)
            for i, part in enumerate(problem.parts):
                coeffs[i * num_j + j] = derated_capacitance(part, problem.bias_voltage)
            rows.append(_Row(location=j, kind="ceff", frequency=None,
                             target=loc.ceff_target, coeffs=coeffs))
    return rows


def merged_model(problem: PlacementProblem) -> MilpModel:
    """Ideal-PDN relaxation: all locations merged into one node (Y_jk = inf).

    Every part contributes its best-location admittance to every requirement
    and pays its cheapest-location objective coefficient, so the optimum of
    this covering MILP can only undershoot the placement optimum.
    """
    num_i = len(problem.parts)
    num_j = len(problem.locations)
    rows = _build_rows(problem)
    labels = []
    matrix = np.zeros((len(rows), num_i))
    rhs = np.zeros(len(rows))
    for r, row in enumerate(rows):
        per_part = row.coeffs.reshape(num_i, num_j)
        if row.kind == "mask":
            labels.append(f"{problem.locations[row.location].label}"
                          f":mask@{row.frequency:g}")
            matrix[r] = per_part.max(axis=1)
        else:
            labels.append(f"{problem.locations[row.location].label}:ceff")
            matrix[r] = per_part[:, row.location]
        rhs[r] = row.target

    objective = np.array([
        min(loc.k_weight * float(part.cost) + part.area for loc in problem.locations)
        for part in problem.parts])
    uppers = np.array([derive_upper_bound(matrix[:, i], rhs) for i in range(num_i)],
                      dtype=int)
    return MilpModel(
        variable_ids=tuple(p.id for p in problem.parts),
        objective=objective,
        matrix=matrix,
        rhs=rhs,
        row_labels=tuple(labels),
        upper_bounds=uppers,
        costs=tuple(p.cost for p in problem.parts),
        areas=np.array([p.area for p in problem.parts]),
    )


def _variable_bounds(problem: PlacementProblem, rows: list[_Row],
                     cap: Optional[int]) -> np.ndarray:
    """Per-(part, location) count bound.

    Dominance gives a sound bound when a column can satisfy, alone, every
    requirement it serves: its own location's rows directly, and a remote row
    through the coupling path when the path is wider than the target. A path
    that saturates below a remote target (0 < Y_path <= T) never finishes the
    job alone, yet piling more parts behind it can still pay off, so those
    columns get the explicit count_cap; without one the search cannot promise
    exactness and refuses.
    """
    num_i = len(problem.parts)
    num_j = len(problem.locations)
    bounds = np.zeros(num_i * num_j, dtype=int)
    for i, part in enumerate(problem.parts):
        for j, here in enumerate(problem.locations):
            need = 0
            saturating = False
            for row in rows:
                coeff = row.coeffs[i * num_j + j]
                if coeff <= 0.0:
                    continue
                if row.location == j:
                    required = row.target
                elif row.kind == "mask":
                    y_path = problem.coupling.admittance(
                        here.label, problem.locations[row.location].label,
                        row.frequency)
                    if y_path <= 0.0:
                        continue  # no path: the column cannot serve this row
                    if y_path <= row.target:
                        saturating = True
                        continue
                    required = row.target * y_path / (y_path - row.target)
                else:
                    continue  # capacitance rows are strictly local
                units = math.ceil(required / coeff)
                while units * coeff < required:
                    units += 1
                need = max(need, units)
            if saturating:
                if cap is None:
                    raise ValidationError(
                        f"part '{part.id}' at '{here.label}' feeds a remote mask "
                        f"through a coupling path that saturates below the target; "
                        f"no dominance bound exists, supply count_cap")
                bounds[i * num_j + j] = cap
            elif cap is None:
                bounds[i * num_j + j] = need
            else:
                bounds[i * num_j + j] = min(need, cap)
    return bounds


def solve_placement(problem: PlacementProblem,
                    config: PlacementConfig = PlacementConfig()) -> PlacementSolution:
    """Globally optimal placement counts by pruned exhaustive search.

    Ties on the objective (within 1e-12) resolve to the assignment that
    enumerates first, i.e. the lexicographically smallest counts matrix in
    (part, location) order.
    """
    start = time.perf_counter()
    num_i = len(problem.parts)
    num_j = len(problem.locations)
    rows = _build_rows(problem)
    bounds = _variable_bounds(problem, rows, config.count_cap)

    leaves = 1.0
    for b in bounds:
        leaves *= b + 1
        if leaves > config.max_leaves:
            raise SearchSpaceExceeded(
                f"placement search space exceeds {config.max_leaves:g} leaves; "
                f"supply count_cap or fewer parts/locations")

    objective = np.array([
        problem.locations[j].k_weight * float(problem.parts[i].cost)
        + problem.parts[i].area
        for i in range(num_i) for j in range(num_j)])

    merged = merged_model(problem)
    merged_opt = solve_milp(merged)
    if merged_opt.status == "infeasible":
        # The relaxation is already infeasible, so the true problem is too.
        return PlacementSolution(
            counts=tuple(tuple(0 for _ in range(num_j)) for _ in range(num_i)),
            objective=math.inf, status="infeasible", checks=(),
            nodes_explored=merged_opt.nodes_explored,
            wall_time=time.perf_counter() - start)
    lower_bound = merged_opt.objective

    # Completion bounds reuse the merged matrix: column (i, k) credited at its
    # best-location coefficient, so assigned prefixes are never under-counted.
    merged_cols = np.zeros((len(rows), num_i * num_j))
    for r, row in enumerate(rows):
        per_part = row.coeffs.reshape(num_i, num_j)
        best = per_part.max(axis=1) if row.kind == "mask" else per_part[:, row.location]
        for i in range(num_i):
            for j in range(num_j):
                merged_cols[r, i * num_j + j] = best[i]
    merged_obj_per_col = np.array([
        merged.objective[i] for i in range(num_i) for _ in range(num_j)])

    targets = np.array([row.target for row in rows])
    row_tol = 1e-9 * np.maximum(1.0, np.abs(targets))

    def eval_rows(n_flat: np.ndarray) -> np.ndarray:
        matrix = n_flat.reshape(num_i, num_j)
        achieved = np.empty(len(rows))
        # Per-location bank sums depend on (location, frequency) only, so all
        # rows at one frequency share them.
        sums_cache: dict[float, np.ndarray] = {}
        for r, row in enumerate(rows):
            if row.kind == "ceff":
                achieved[r] = float(row.coeffs @ n_flat)
                continue
            per_loc = sums_cache.get(row.frequency)
            if per_loc is None:
                per_part = row.coeffs.reshape(num_i, num_j)
                per_loc = np.array([float(per_part[:, k] @ matrix[:, k])
                                    for k in range(num_j)])
                sums_cache[row.frequency] = per_loc
            total = per_loc[row.location]
            label_j = problem.locations[row.location].label
            for k in range(num_j):
                if k == row.location or per_loc[k] <= 0.0:
                    continue
                y_jk = problem.coupling.admittance(
                    label_j, problem.locations[k].label, row.frequency)
                if y_jk > 0.0:
                    total += 1.0 / (1.0 / y_jk + 1.0 / per_loc[k])
            achieved[r] = total
        return achieved

    order = list(range(num_i * num_j))  # (part, location) lexicographic
    best_obj = math.inf
    best_counts: Optional[np.ndarray] = None
    nodes = 0
    assignment = np.zeros(num_i * num_j, dtype=int)

    def completion_bound(depth: int, prefix_cost: float) -> float:
        remaining = order[depth:]
        if not remaining:
            return prefix_cost
        residual = targets - merged_cols[:, order[:depth]] @ assignment[order[:depth]]
        if np.all(residual <= row_tol):
            return prefix_cost
        sub = MilpModel(
            variable_ids=tuple(str(v) for v in remaining),
            objective=merged_obj_per_col[remaining].copy(),
            matrix=merged_cols[:, remaining].copy(),
            rhs=np.maximum(residual, 0.0),
            row_labels=tuple(f"r{r}" for r in range(len(rows))),
            upper_bounds=bounds[remaining].copy(),
            costs=tuple(Decimal(0) for _ in remaining),
            areas=np.zeros(len(remaining)),
        )
        relax = solve_lp(sub)
        if relax.status == "infeasible":
            return math.inf
        return prefix_cost + relax.objective

    def search(depth: int, prefix_cost: float) -> None:
        nonlocal best_obj, best_counts, nodes
        nodes += 1
        if best_counts is not None and best_obj <= lower_bound + 1e-12:
            return  # already provably optimal
        # Feasibility: even the upper corner of this box misses a requirement.
        corner = assignment.copy()
        for v in order[depth:]:
            corner[v] = bounds[v]
        achieved = eval_rows(corner)
        if np.any(achieved < targets - row_tol):
            return
        if completion_bound(depth, prefix_cost) >= best_obj - 1e-12:
            return
        if depth == len(order):
            achieved = eval_rows(assignment)
            if np.all(achieved >= targets - row_tol):
                obj = float(objective @ assignment)
                if obj < best_obj - 1e-12:
                    best_obj = obj
                    best_counts = assignment.copy()
            return
        var = order[depth]
        for value in range(bounds[var] + 1):
            assignment[var] = value
            search(depth + 1, prefix_cost + objective[var] * value)
        assignment[var] = 0

    search(0, 0.0)

    if best_counts is None:
        return PlacementSolution(
            counts=tuple(tuple(0 for _ in range(num_j)) for _ in range(num_i)),
            objective=math.inf, status="infeasible", checks=(),
            nodes_explored=nodes, wall_time=time.perf_counter() - start)

    assert lower_bound <= best_obj + 1e-9, "merged-node bound exceeded optimum"
    matrix = best_counts.reshape(num_i, num_j)
    checks = []
    achieved = eval_rows(best_counts)
    for r, row in enumerate(rows):
        checks.append(LocationCheck(
            label=problem.locations[row.location].label,
            kind=row.kind,
            frequency=row.frequency,
            achieved=float(achieved[r]),
            target=float(row.target),
            satisfied=bool(achieved[r] >= row.target - row_tol[r]),
        ))
    return PlacementSolution(
        counts=tuple(tuple(int(v) for v in matrix[i]) for i in range(num_i)),
        objective=float(objective @ best_counts),
        status="optimal",
        checks=tuple(checks),
        nodes_explored=nodes,
        wall_time=time.perf_counter() - start,
    )
