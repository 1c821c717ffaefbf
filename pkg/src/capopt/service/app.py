"""Local HTTP service exposing solve/sweep/pdn/demand to the companion UI.

Stateless apart from an in-memory session overlay of parts added through
POST /parts; the on-disk library is never mutated. Responses use the same
canonical JSON writer as the CLI, so identical inputs give identical bytes.
"""

from __future__ import annotations

import threading
from typing import Optional, Sequence

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware

from .. import schemas
from ..capmodel import build_model
from ..demand import demand_curve, intersect_supply
from ..errors import CapoptError, InfeasibleError, LimitError, ValidationError
from ..frontier import pareto_filter, sweep_k
from ..milp import check_solution, solve_milp
from ..partlib import CapacitorPart, PartFilter, dump_library, filter_parts, parse_part
from ..pdnplace import PlacementConfig, solve_placement
from ..schemas import dump_text
from .models import DemandRequest, PdnRequest, SpecModel, SweepRequest


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(content=dump_text(payload), status_code=status_code,
                    media_type="application/json")


def _error_response(code: str, message: str, status_code: int) -> Response:
    return _json_response({"error": {"code": code, "message": message}},
                          status_code)


def create_app(parts: Sequence[CapacitorPart]) -> FastAPI:
    app = FastAPI(title="capopt", docs_url="/docs")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    base_parts = tuple(parts)
    session_parts: list[CapacitorPart] = []
    session_lock = threading.Lock()

    def library() -> list[CapacitorPart]:
        with session_lock:
            return list(base_parts) + list(session_parts)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors())
        return _error_response("invalid_input", detail, 400)

    @app.exception_handler(InfeasibleError)
    async def _infeasible(request: Request, exc: InfeasibleError):
        return _error_response("infeasible", str(exc), 422)

    @app.exception_handler(LimitError)
    async def _limit(request: Request, exc: LimitError):
        return _error_response("limit_exceeded", str(exc), 503)

    @app.exception_handler(CapoptError)
    async def _invalid(request: Request, exc: CapoptError):
        return _error_response("invalid_input", str(exc), 400)

    @app.get("/parts")
    def get_parts(min_voltage_rating: Optional[float] = None,
                  max_height: Optional[float] = None,
                  dielectrics: Optional[str] = None,
                  manufacturers: Optional[str] = None):
        flt = PartFilter(
            max_height=max_height,
            min_voltage_rating=min_voltage_rating,
            allowed_dielectrics=frozenset(dielectrics.split(","))
            if dielectrics else None,
            allowed_manufacturers=frozenset(manufacturers.split(","))
            if manufacturers else None,
        )
        selected = filter_parts(library(), flt)
        return _json_response({"parts": dump_library(selected)})

    @app.post("/parts")
    def add_part(body: dict):
        part = parse_part(body)
        with session_lock:
            known = {p.id for p in base_parts} | {p.id for p in session_parts}
            if part.id in known:
                raise ValidationError(f"duplicate part id '{part.id}'")
            session_parts.append(part)
            total = len(base_parts) + len(session_parts)
        return _json_response({"added": part.id, "parts_count": total})

    @app.post("/solve")
    def solve(body: SpecModel):
        spec = schemas.parse_spec(body.to_dict())
        model = build_model(spec, library())
        solution = solve_milp(model)
        if solution.status != "optimal":
            raise InfeasibleError("no counts satisfy the spec")
        report = check_solution(model, solution.counts)
        return _json_response(
            schemas.solution_payload(model, solution, report, spec))

    @app.post("/sweep")
    def sweep(body: SweepRequest):
        spec = schemas.parse_spec(body.spec.to_dict())
        parts_now = library()
        points = sweep_k(spec, parts_now, body.k_min, body.k_max, body.steps,
                         body.spacing)
        model = build_model(spec, parts_now)
        pareto = pareto_filter(points)
        return _json_response(
            schemas.frontier_payload(points, model.variable_ids, pareto))

    @app.post("/pdn")
    def pdn(body: PdnRequest):
        if body.parts is not None:
            pdn_parts = [parse_part(p, f"parts[{i}]")
                         for i, p in enumerate(body.parts)]
        else:
            pdn_parts = library()
        problem = schemas.parse_placement(
            body.model_dump(exclude={"parts", "count_cap"}, exclude_none=False),
            pdn_parts)
        solution = solve_placement(problem,
                                   PlacementConfig(count_cap=body.count_cap))
        if solution.status != "optimal":
            raise InfeasibleError("no placement satisfies every location")
        return _json_response(schemas.placement_payload(problem, solution))

    @app.post("/demand")
    def demand(body: DemandRequest):
        parts_now = library()
        apps = schemas.parse_apps(
            {"applications": [s.to_dict() for s in body.applications]}, parts_now)
        prices = [schemas.parse_price(p, f"price_grid[{i}]")
                  for i, p in enumerate(body.price_grid)]
        curve = demand_curve(apps, body.part_id, prices)
        supply = None
        if body.supply is not None:
            supply = schemas.parse_supply(body.supply.model_dump())
        crossing = intersect_supply(curve, supply) if supply else None
        return _json_response(
            schemas.demand_payload(curve, crossing, supply is not None))

    return app
