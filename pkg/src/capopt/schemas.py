"""JSON interchange shared by the CLI and the HTTP service.

All numbers in emitted JSON are written with 12 significant digits so that
identical inputs produce byte-identical outputs regardless of which surface
produced them.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal, InvalidOperation
from typing import Optional, Sequence

from .capmodel import MaskPoint, MilpModel, ProblemSpec
from .demand import ApplicationSet, DemandCurve, SupplyCurve, SupplyIntersection
from .errors import ValidationError
from .frontier import FrontierPoint, TangencyLine, tangency_line
from .milp import MilpSolution, SolutionReport
from .partlib import CapacitorPart, PartFilter
from .pdnplace import (CouplingMap, PlacementLocation, PlacementProblem,
                       PlacementSolution)

UF = 1e-6


def _format_number(value) -> str:
    if isinstance(value, bool):
        raise TypeError("bool is not a number here")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"cannot serialize non-finite number {value!r}")
        return format(value, ".12g")
    raise TypeError(f"not a number: {value!r}")


def dumps_canonical(obj, indent: int = 0) -> str:
    """Deterministic JSON: 12-significant-digit floats, exact decimals."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, Decimal)):
        return _format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join(pad + "  " + dumps_canonical(v, indent + 2) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            pad + "  " + json.dumps(str(k)) + ": " + dumps_canonical(v, indent + 2)
            for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_text(obj) -> str:
    return dumps_canonical(obj) + "\n"


# ---------------------------------------------------------------------------
# ProblemSpec
# ---------------------------------------------------------------------------

def _number(d: dict, key: str, default=None, where: str = "spec"):
    if key not in d:
        if default is not None:
            return default
        raise ValidationError(f"{where}: missing field '{key}'")
    value = d[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: field '{key}' must be a number")
    return float(value)


def parse_filter(d: Optional[dict]) -> PartFilter:
    if not d:
        return PartFilter()
    if not isinstance(d, dict):
        raise ValidationError("filter must be an object")
    known = {"max_height_mm", "min_voltage_rating_V",
             "allowed_dielectrics", "allowed_manufacturers"}
    unknown = set(d) - known
    if unknown:
        raise ValidationError(f"filter: unknown fields {sorted(unknown)}")
    diel = d.get("allowed_dielectrics")
    mfr = d.get("allowed_manufacturers")
    return PartFilter(
        max_height=_number(d, "max_height_mm", where="filter")
        if "max_height_mm" in d else None,
        min_voltage_rating=_number(d, "min_voltage_rating_V", where="filter")
        if "min_voltage_rating_V" in d else None,
        allowed_dielectrics=frozenset(map(str, diel)) if diel is not None else None,
        allowed_manufacturers=frozenset(map(str, mfr)) if mfr is not None else None,
    )


def filter_to_dict(flt: PartFilter) -> dict:
    out: dict = {}
    if flt.max_height is not None:
        out["max_height_mm"] = flt.max_height
    if flt.min_voltage_rating is not None:
        out["min_voltage_rating_V"] = flt.min_voltage_rating
    if flt.allowed_dielectrics is not None:
        out["allowed_dielectrics"] = sorted(flt.allowed_dielectrics)
    if flt.allowed_manufacturers is not None:
        out["allowed_manufacturers"] = sorted(flt.allowed_manufacturers)
    return out


def parse_mask_point(d: dict, where: str = "mask point") -> MaskPoint:
    if not isinstance(d, dict):
        raise ValidationError(f"{where}: expected an object")
    unknown = set(d) - {"freq_Hz", "target_ohm", "series_ohm", "load_ohm"}
    if unknown:
        raise ValidationError(f"{where}: unknown fields {sorted(unknown)}")
    return MaskPoint(
        frequency=_number(d, "freq_Hz", where=where),
        impedance_target=_number(d, "target_ohm", where=where),
        series_impedance=_number(d, "series_ohm", 0.0, where=where),
        load_impedance=_number(d, "load_ohm", 0.0, where=where),
    )


def mask_point_to_dict(point: MaskPoint) -> dict:
    return {
        "freq_Hz": point.frequency,
        "target_ohm": point.impedance_target,
        "series_ohm": point.series_impedance,
        "load_ohm": point.load_impedance,
    }


def parse_spec(d: dict, k_override: Optional[float] = None) -> ProblemSpec:
    if not isinstance(d, dict):
        raise ValidationError("spec must be a JSON object")
    unknown = set(d) - {"ceff_uF", "bias_V", "K_mm2_per_cent", "mask", "filter"}
    if unknown:
        raise ValidationError(f"spec: unknown fields {sorted(unknown)}")
    mask = tuple(parse_mask_point(p, f"mask[{i}]")
                 for i, p in enumerate(d.get("mask") or []))
    k = k_override if k_override is not None else _number(d, "K_mm2_per_cent", 1.0)
    return ProblemSpec(
        ceff_target=_number(d, "ceff_uF", 0.0) * UF,
        bias_voltage=_number(d, "bias_V", 0.0),
        mask=mask,
        preference_k=k,
        filter=parse_filter(d.get("filter")),
    )


def spec_to_dict(spec: ProblemSpec) -> dict:
    return {
        "ceff_uF": spec.ceff_target / UF,
        "bias_V": spec.bias_voltage,
        "K_mm2_per_cent": spec.preference_k,
        "mask": [mask_point_to_dict(p) for p in spec.mask],
        "filter": filter_to_dict(spec.filter),
    }


# ---------------------------------------------------------------------------
# Solutions and reports
# ---------------------------------------------------------------------------

def counts_to_dict(model: MilpModel, counts: Sequence[int]) -> dict:
    return {vid: int(c) for vid, c in zip(model.variable_ids, counts) if c}


def report_to_dict(report: SolutionReport) -> dict:
    return {
        "feasible": report.feasible,
        "total_cost_cents": report.total_cost,
        "total_area_mm2": report.total_area,
        "rows": [
            {
                "label": row.label,
                "achieved": row.achieved,
                "rhs": row.rhs,
                "slack": row.slack,
                "satisfied": row.satisfied,
            }
            for row in report.rows
        ],
    }


def solution_payload(model: MilpModel, solution: MilpSolution,
                     report: SolutionReport, spec: ProblemSpec) -> dict:
    return {
        "status": solution.status,
        "objective": solution.objective,
        "counts": counts_to_dict(model, solution.counts),
        "report": report_to_dict(report),
        "spec": spec_to_dict(spec),
        "solver": {"nodes_explored": solution.nodes_explored},
    }


def tangency_to_dict(line: TangencyLine) -> dict:
    return {
        "k": line.k,
        "value": line.value,
        "slope_area_per_cost": line.slope_area_per_cost,
        "area_intercept": line.area_intercept,
        "cost_intercept": line.cost_intercept,
    }


def frontier_point_to_dict(point: FrontierPoint, ids: Sequence[str]) -> dict:
    return {
        "k": point.k,
        "total_cost_cents": point.total_cost,
        "total_area_mm2": point.total_area,
        "objective": point.objective,
        "unique_parts": point.unique_parts,
        "total_parts": point.total_parts,
        "counts": {vid: int(c) for vid, c in zip(ids, point.counts) if c},
        "tangency": tangency_to_dict(tangency_line(point)),
    }


def frontier_payload(points: Sequence[FrontierPoint], ids: Sequence[str],
                     pareto: Sequence[FrontierPoint]) -> dict:
    pareto_keys = {p.counts for p in pareto}
    out = []
    for p in points:
        d = frontier_point_to_dict(p, ids)
        d["pareto"] = p.counts in pareto_keys
        out.append(d)
    return {"points": out}


def frontier_csv(points: Sequence[FrontierPoint], ids: Sequence[str]) -> str:
    header = ["k", "total_cost_cents", "total_area_mm2", "objective"] + list(ids)
    lines = [",".join(header)]
    for p in points:
        row = [format(p.k, ".12g"), str(p.total_cost), format(p.total_area, ".12g"),
               format(p.objective, ".12g")] + [str(c) for c in p.counts]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Placement problems
# ---------------------------------------------------------------------------

def parse_placement(d: dict, parts: Sequence[CapacitorPart]) -> PlacementProblem:
    if not isinstance(d, dict):
        raise ValidationError("placement problem must be a JSON object")
    locs = []
    for i, entry in enumerate(d.get("locations") or []):
        where = f"locations[{i}]"
        if not isinstance(entry, dict) or "label" not in entry:
            raise ValidationError(f"{where}: expected an object with 'label'")
        locs.append(PlacementLocation(
            label=str(entry["label"]),
            k_weight=_number(entry, "K_j", 1.0, where=where),
            mask=tuple(parse_mask_point(p, f"{where}.mask[{k}]")
                       for k, p in enumerate(entry.get("mask") or [])),
            ceff_target=_number(entry, "ceff_uF", 0.0, where=where) * UF,
        ))
    edges = []
    for i, entry in enumerate(d.get("coupling") or []):
        where = f"coupling[{i}]"
        if not isinstance(entry, dict) or "a" not in entry or "b" not in entry:
            raise ValidationError(f"{where}: expected an object with 'a' and 'b'")
        freq = entry.get("freq_Hz")
        if freq is not None:
            freq = float(freq)
        edges.append((str(entry["a"]), str(entry["b"]), freq,
                      _number(entry, "Y_S", where=where)))
    problem = PlacementProblem(
        locations=tuple(locs),
        coupling=CouplingMap(edges),
        parts=tuple(parts),
        bias_voltage=_number(d, "bias_V", 0.0),
    )
    labels = {loc.label for loc in problem.locations}
    for a, b, _, _ in edges:
        if a not in labels or b not in labels:
            raise ValidationError(f"coupling edge references unknown location "
                                  f"'{a if a not in labels else b}'")
    return problem


def placement_payload(problem: PlacementProblem,
                      solution: PlacementSolution) -> dict:
    return {
        "status": solution.status,
        "objective": solution.objective if solution.status == "optimal" else None,
        "parts": [p.id for p in problem.parts],
        "locations": [loc.label for loc in problem.locations],
        "counts": [list(row) for row in solution.counts],
        "checks": [
            {
                "location": c.label,
                "kind": c.kind,
                "freq_Hz": c.frequency,
                "achieved": c.achieved,
                "target": c.target,
                "satisfied": c.satisfied,
            }
            for c in solution.checks
        ],
        "solver": {"nodes_explored": solution.nodes_explored},
    }


# ---------------------------------------------------------------------------
# Demand curves
# ---------------------------------------------------------------------------

def parse_price(value, where: str = "price") -> Decimal:
    try:
        price = Decimal(str(value))
    except InvalidOperation:
        raise ValidationError(f"{where}: cannot parse {value!r} as a price") from None
    if not price.is_finite():
        raise ValidationError(f"{where}: price must be finite")
    return price


def parse_apps(d: dict, parts: Sequence[CapacitorPart]) -> ApplicationSet:
    if not isinstance(d, dict) or "applications" not in d:
        raise ValidationError("applications file must contain 'applications'")
    specs = tuple(parse_spec(s) for s in d["applications"])
    return ApplicationSet(applications=specs, parts=tuple(parts))


def parse_supply(d: dict) -> SupplyCurve:
    if not isinstance(d, dict) or "tiers" not in d:
        raise ValidationError("supply file must contain 'tiers'")
    tiers = []
    for i, entry in enumerate(d["tiers"]):
        where = f"tiers[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected an object")
        if "min_quantity" not in entry or "unit_price_cents" not in entry:
            raise ValidationError(
                f"{where}: expected min_quantity and unit_price_cents")
        tiers.append((int(entry["min_quantity"]),
                      parse_price(entry["unit_price_cents"], where)))
    return SupplyCurve(tiers=tuple(tiers))


def demand_payload(curve: DemandCurve,
                   intersection: Optional[SupplyIntersection],
                   has_supply: bool) -> dict:
    out = {
        "part_id": curve.part_id,
        "points": [{"price_cents": p, "quantity": q}
                   for p, q in zip(curve.prices, curve.quantities)],
        "x_intercept_cents": curve.x_intercept,
    }
    if has_supply:
        out["intersection"] = (
            {"quantity": intersection.quantity,
             "unit_price_cents": intersection.unit_price}
            if intersection is not None else None)
    return out


def demand_csv(curve: DemandCurve) -> str:
    lines = ["price_cents,quantity"]
    for p, q in zip(curve.prices, curve.quantities):
        lines.append(f"{p},{q}")
    return "\n".join(lines) + "\n"
