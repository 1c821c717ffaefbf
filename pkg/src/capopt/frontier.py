"""Preference sweeps: trace the cost/area efficient frontier by varying K.

Each K value is an independent MILP solve (no warm starting, so results do
not depend on sweep order), duplicate solutions collapse to the first K that
produced them, and dominated points can be filtered out for plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Optional, Sequence

from .capmodel import ProblemSpec, build_model
from .errors import InfeasibleError, ValidationError
from .milp import MilpConfig, check_solution, solve_milp
from .partlib import CapacitorPart


@dataclass(frozen=True)
class FrontierPoint:
    k: float
    counts: tuple[int, ...]
    total_cost: Decimal   # cents
    total_area: float     # mm^2
    objective: float
    unique_parts: int
    total_parts: int


@dataclass(frozen=True)
class TangencyLine:
    """Iso-objective line K*cost + area = value through a frontier point."""

    k: float
    value: float                    # K*cost + area at the point
    slope_area_per_cost: float      # dArea/dCost = -K
    area_intercept: float           # area at cost = 0
    cost_intercept: Optional[float]  # cost at area = 0; None for K = 0


def k_grid(k_min: float, k_max: float, steps: int, spacing: str = "log") -> list[float]:
    if not (0 < k_min <= k_max):
        raise ValidationError(f"need 0 < k_min <= k_max, got [{k_min}, {k_max}]")
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    if spacing not in ("log", "linear"):
        raise ValidationError(f"spacing must be 'log' or 'linear', got {spacing!r}")
    if steps == 1:
        return [k_min]
    if spacing == "linear":
        return [k_min + i * (k_max - k_min) / (steps - 1) for i in range(steps)]
    lo, hi = math.log(k_min), math.log(k_max)
    return [math.exp(lo + i * (hi - lo) / (steps - 1)) for i in range(steps)]


def sweep_k(spec: ProblemSpec, parts: Sequence[CapacitorPart], k_min: float,
            k_max: float, steps: int, spacing: str = "log",
            config: MilpConfig = MilpConfig()) -> list[FrontierPoint]:
    """One exact solve per K value, deduplicated by counts vector.

    The feasible region does not depend on K, so a single infeasible solve
    means every K is infeasible and the sweep aborts.
    """
    points: list[FrontierPoint] = []
    seen: set[tuple[int, ...]] = set()
    prev_cost: Optional[Decimal] = None
    prev_area: Optional[float] = None
    for k in k_grid(k_min, k_max, steps, spacing):
        model = build_model(replace(spec, preference_k=k), parts)
        solution = solve_milp(model, config)
        if solution.status != "optimal":
            raise InfeasibleError(
                f"sweep aborted: spec is infeasible (first observed at K={k:g})")
        report = check_solution(model, solution.counts)
        assert report.feasible, "sweep produced an infeasible point"
        if prev_cost is not None:
            assert report.total_cost <= prev_cost and report.total_area >= prev_area - 1e-12, \
                "cost/area monotonicity violated along ascending K"
        prev_cost, prev_area = report.total_cost, report.total_area
        if solution.counts in seen:
            continue
        seen.add(solution.counts)
        points.append(FrontierPoint(
            k=k,
            counts=solution.counts,
            total_cost=report.total_cost,
            total_area=report.total_area,
            objective=solution.objective,
            unique_parts=sum(1 for c in solution.counts if c > 0),
            total_parts=sum(solution.counts),
        ))
    return points


def pareto_filter(points: Sequence[FrontierPoint]) -> list[FrontierPoint]:
    """Points not weakly dominated in (cost, area), sorted by ascending cost.

    Ties on both axes keep the lowest-K representative.
    """
    kept: list[FrontierPoint] = []
    for p in points:
        dominated = False
        for q in points:
            if q is p:
                continue
            if (q.total_cost <= p.total_cost and q.total_area <= p.total_area
                    and (q.total_cost < p.total_cost or q.total_area < p.total_area)):
                dominated = True
                break
            if (q.total_cost == p.total_cost and q.total_area == p.total_area
                    and q.k < p.k):
                dominated = True
                break
        if not dominated:
            kept.append(p)
    kept.sort(key=lambda p: (p.total_cost, p.total_area, p.k))
    return kept


def tangency_line(point: FrontierPoint) -> TangencyLine:
    """The iso-objective line through a frontier point, for plotting."""
    cost = float(point.total_cost)
    value = point.k * cost + point.total_area
    return TangencyLine(
        k=point.k,
        value=value,
        slope_area_per_cost=-point.k,
        area_intercept=value,
        cost_intercept=(value / point.k) if point.k > 0 else None,
    )
