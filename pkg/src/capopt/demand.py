"""Part demand curves: sweep one part's unit price and re-solve every application.

The demand quantity at a price is the total optimal usage of the part across
all applications when its cost is set to that price. Equal-objective ties are
broken toward fewer units of the swept part (then lexicographically), which
keeps the curve a well-defined, weakly decreasing function of price.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Sequence

from .capmodel import ProblemSpec, build_model
from .errors import InfeasibleError, ValidationError
from .milp import MilpConfig, solve_milp
from .partlib import CapacitorPart, with_cost


@dataclass(frozen=True)
class ApplicationSet:
    """All circuit applications sharing one part library."""

    applications: tuple[ProblemSpec, ...]
    parts: tuple[CapacitorPart, ...]

    def __post_init__(self):
        if not self.applications:
            raise ValidationError("an application set needs at least one application")


@dataclass(frozen=True)
class DemandCurve:
    part_id: str
    prices: tuple[Decimal, ...]       # cents, ascending
    quantities: tuple[int, ...]       # total optimal usage at each price
    x_intercept: Optional[Decimal]    # lowest grid price with zero demand

    def quantity_at(self, price: Decimal) -> int:
        """Right-continuous step lookup, clamped to the grid range."""
        if price <= self.prices[0]:
            return self.quantities[0]
        result = self.quantities[-1]
        for p, q in zip(self.prices, self.quantities):
            if p <= price:
                result = q
            else:
                break
        return result


@dataclass(frozen=True)
class SupplyCurve:
    """Piecewise-constant unit price vs quantity; volume discounts allowed."""

    tiers: tuple[tuple[int, Decimal], ...]  # (min_quantity, unit_price_cents)

    def __post_init__(self):
        if not self.tiers:
            raise ValidationError("a supply curve needs at least one tier")
        if self.tiers[0][0] != 0:
            raise ValidationError("the first supply tier must start at quantity 0")
        qs = [q for q, _ in self.tiers]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValidationError("supply tier quantities must be strictly ascending")
        ps = [p for _, p in self.tiers]
        if any(b > a for a, b in zip(ps, ps[1:])):
            raise ValidationError("supply tier prices must be weakly decreasing")

    def price_at(self, quantity: int) -> Decimal:
        price = self.tiers[0][1]
        for min_q, p in self.tiers:
            if quantity >= min_q:
                price = p
        return price


@dataclass(frozen=True)
class SupplyIntersection:
    quantity: int
    unit_price: Decimal


def demand_curve(apps: ApplicationSet, part_id: str,
                 price_grid: Sequence[Decimal],
                 config: MilpConfig = MilpConfig()) -> DemandCurve:
    """Q(price) = total optimal usage of `part_id` across all applications.

    Every grid point re-solves every application exactly with the part priced
    at that grid value; an infeasible application is an error, not a zero.
    """
    index = next((i for i, p in enumerate(apps.parts) if p.id == part_id), None)
    if index is None:
        raise ValidationError(f"unknown part id {part_id!r}")
    prices = [Decimal(p) for p in price_grid]
    if not prices:
        raise ValidationError("price grid must be non-empty")
    if any(p < 0 for p in prices):
        raise ValidationError("prices must be >= 0")
    if any(b < a for a, b in zip(prices, prices[1:])):
        raise ValidationError("price grid must be ascending")

    quantities: list[int] = []
    for price in prices:
        parts = list(apps.parts)
        parts[index] = with_cost(parts[index], price)
        total = 0
        for app_no, spec in enumerate(apps.applications):
            model = build_model(spec, parts)
            swept = next((i for i, vid in enumerate(model.variable_ids)
                          if vid == part_id), None)
            if swept is not None:
                order = [swept] + [i for i in range(model.num_variables) if i != swept]
                app_config = MilpConfig(integrality_tol=config.integrality_tol,
                                        node_limit=config.node_limit,
                                        tie_priority=tuple(order))
            else:
                app_config = config
            solution = solve_milp(model, app_config)
            if solution.status != "optimal":
                raise InfeasibleError(
                    f"application {app_no} is infeasible at price {price} cents")
            if swept is not None:
                total += solution.counts[swept]
        quantities.append(total)

    for prev, nxt in zip(quantities, quantities[1:]):
        assert nxt <= prev, "demand must be weakly decreasing in price"

    x_intercept = next((p for p, q in zip(prices, quantities) if q == 0), None)
    return DemandCurve(part_id=part_id, prices=tuple(prices),
                       quantities=tuple(quantities), x_intercept=x_intercept)


def intersect_supply(demand: DemandCurve,
                     supply: SupplyCurve) -> Optional[SupplyIntersection]:
    """Largest demanded quantity q whose supply price still sustains it.

    Scans demand quantities from the largest down and returns the first q > 0
    with Q(price_at(q)) >= q; None when no positive quantity qualifies.
    """
    for q in sorted(set(demand.quantities), reverse=True):
        if q <= 0:
            continue
        price = supply.price_at(q)
        if demand.quantity_at(price) >= q:
            return SupplyIntersection(quantity=q, unit_price=price)
    return None


def savings_area(demand: DemandCurve, price: Decimal) -> Decimal:
    """Integral of the demand step function above a price line, in cents.

    The curve is right-continuous on its grid: Q holds its value from each
    grid price up to the next one. Integration covers the grid span only.
    """
    price = Decimal(price)
    if price < 0:
        raise ValidationError("price must be >= 0")
    total = Decimal(0)
    for (p0, q), p1 in zip(zip(demand.prices, demand.quantities),
                           demand.prices[1:]):
        lower = max(p0, price)
        if p1 > lower:
            total += q * (p1 - lower)
    return total
