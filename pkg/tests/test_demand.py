from decimal import Decimal

import pytest

from capopt.capmodel import ProblemSpec
from capopt.demand import (ApplicationSet, DemandCurve, SupplyCurve,
                           demand_curve, intersect_supply, savings_area)
from capopt.errors import InfeasibleError, ValidationError
from capopt.partlib import PartFilter


@pytest.fixture
def table1_app(table1_parts):
    spec = ProblemSpec(ceff_target=4e-6, bias_voltage=3.3, preference_k=2.0)
    return ApplicationSet(applications=(spec,), parts=tuple(table1_parts))


class TestDemandCurve:
    def test_price_sweep_of_part_b(self, table1_app):
        curve = demand_curve(table1_app, "B",
                             [Decimal("0.1"), Decimal("0.3"), Decimal("10000")])
        assert curve.quantities == (5, 5, 0)
        assert curve.x_intercept == Decimal("10000")

    def test_identical_applications_double(self, table1_parts):
        spec = ProblemSpec(ceff_target=4e-6, bias_voltage=3.3, preference_k=2.0)
        single = ApplicationSet(applications=(spec,), parts=tuple(table1_parts))
        double = ApplicationSet(applications=(spec, spec), parts=tuple(table1_parts))
        grid = [Decimal("0.1"), Decimal("0.3"), Decimal("2"), Decimal("10000")]
        c1 = demand_curve(single, "B", grid)
        c2 = demand_curve(double, "B", grid)
        assert c2.quantities == tuple(2 * q for q in c1.quantities)

    def test_weakly_decreasing_20_point_grid(self, table1_app):
        grid = [Decimal(i) / 10 for i in range(1, 21)]
        curve = demand_curve(table1_app, "B", grid)
        assert all(b <= a for a, b in zip(curve.quantities, curve.quantities[1:]))

    def test_free_part_is_grid_maximum(self, table1_app):
        grid = [Decimal("0"), Decimal("0.3"), Decimal("1"), Decimal("50")]
        curve = demand_curve(table1_app, "B", grid)
        assert curve.quantities[0] == max(curve.quantities)

    def test_unknown_part(self, table1_app):
        with pytest.raises(ValidationError, match="unknown part"):
            demand_curve(table1_app, "ZZ", [Decimal("1")])

    def test_unsorted_grid_rejected(self, table1_app):
        with pytest.raises(ValidationError, match="ascending"):
            demand_curve(table1_app, "B", [Decimal("2"), Decimal("1")])

    def test_infeasible_application_is_error(self, table1_parts):
        spec = ProblemSpec(ceff_target=4e-6, bias_voltage=3.3, preference_k=2.0,
                           filter=PartFilter(min_voltage_rating=50.0))
        apps = ApplicationSet(applications=(spec,), parts=tuple(table1_parts))
        with pytest.raises(InfeasibleError):
            demand_curve(apps, "B", [Decimal("0.3")])

    def test_filtered_out_part_contributes_zero(self, table1_parts):
        spec = ProblemSpec(ceff_target=4e-6, bias_voltage=3.3, preference_k=2.0,
                           filter=PartFilter(min_voltage_rating=10.0))
        apps = ApplicationSet(applications=(spec,), parts=tuple(table1_parts))
        curve = demand_curve(apps, "B", [Decimal("0"), Decimal("1")])
        assert curve.quantities == (0, 0)  # B is 6.3 V, filtered out


class TestIntersectSupply:
    def test_two_tier_example(self):
        demand = DemandCurve(part_id="B", prices=(Decimal("0.3"), Decimal("0.5")),
                             quantities=(12, 6), x_intercept=None)
        supply = SupplyCurve(tiers=((0, Decimal("0.5")), (10, Decimal("0.3"))))
        crossing = intersect_supply(demand, supply)
        assert crossing.quantity == 12
        assert crossing.unit_price == Decimal("0.3")

    def test_flat_supply_below_intercept(self):
        demand = DemandCurve(part_id="B", prices=(Decimal("0.3"), Decimal("1")),
                             quantities=(12, 0), x_intercept=Decimal("1"))
        supply = SupplyCurve(tiers=((0, Decimal("0.3")),))
        crossing = intersect_supply(demand, supply)
        assert crossing.quantity == 12

    def test_flat_supply_above_intercept(self):
        demand = DemandCurve(part_id="B", prices=(Decimal("0.3"), Decimal("1")),
                             quantities=(12, 0), x_intercept=Decimal("1"))
        supply = SupplyCurve(tiers=((0, Decimal("50")),))
        assert intersect_supply(demand, supply) is None

    def test_tier_validation(self):
        with pytest.raises(ValidationError):
            SupplyCurve(tiers=((5, Decimal("1")),))  # must start at 0
        with pytest.raises(ValidationError):
            SupplyCurve(tiers=((0, Decimal("1")), (10, Decimal("2"))))  # price rises


class TestSavingsArea:
    def test_zero_at_or_above_intercept(self):
        demand = DemandCurve(part_id="B", prices=(Decimal("0.2"), Decimal("0.6")),
                             quantities=(3, 0), x_intercept=Decimal("0.6"))
        assert savings_area(demand, Decimal("0.6")) == 0
        assert savings_area(demand, Decimal("2")) == 0

    def test_single_step_integral(self):
        demand = DemandCurve(part_id="B", prices=(Decimal("0.2"), Decimal("0.6")),
                             quantities=(3, 0), x_intercept=Decimal("0.6"))
        assert savings_area(demand, Decimal("0.2")) == Decimal("1.2")

    def test_doubling_quantities_doubles_area(self):
        a = DemandCurve(part_id="B", prices=(Decimal("0.2"), Decimal("0.5"),
                                             Decimal("0.9")),
                        quantities=(4, 2, 0), x_intercept=Decimal("0.9"))
        b = DemandCurve(part_id="B", prices=a.prices,
                        quantities=tuple(2 * q for q in a.quantities),
                        x_intercept=a.x_intercept)
        assert savings_area(b, Decimal("0.2")) == 2 * savings_area(a, Decimal("0.2"))

    def test_weakly_decreasing_in_price(self):
        demand = DemandCurve(part_id="B",
                             prices=(Decimal("0.2"), Decimal("0.5"), Decimal("0.9")),
                             quantities=(4, 2, 0), x_intercept=Decimal("0.9"))
        grid = [Decimal(i) / 10 for i in range(0, 12)]
        values = [savings_area(demand, p) for p in grid]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_partial_segment(self):
        demand = DemandCurve(part_id="B", prices=(Decimal("0.2"), Decimal("0.6")),
                             quantities=(3, 0), x_intercept=Decimal("0.6"))
        assert savings_area(demand, Decimal("0.4")) == Decimal("0.6")
