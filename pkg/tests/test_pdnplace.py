import itertools
import math
import random
from decimal import Decimal

import numpy as np
import pytest

from capopt.capmodel import MaskPoint, ProblemSpec, build_model
from capopt.errors import SearchSpaceExceeded, ValidationError
from capopt.milp import solve_milp
from capopt.partlib import CapacitorPart, DeratingTable, TabulatedImpedance
from capopt.pdnplace import (CouplingMap, PlacementConfig, PlacementLocation,
                             PlacementProblem, effective_admittance,
                             merged_model, solve_placement)

FREQ = 1e6


def flat_part(pid, admittance_s, cost, area, cap_uf=1.0):
    """Part with frequency-flat |Z| so its admittance is exact by design."""
    z = 1.0 / admittance_s
    return CapacitorPart(
        id=pid, description="", package="0402",
        nominal_capacitance=cap_uf * 1e-6, voltage_rating=10.0, height=0.5,
        area=area, cost=Decimal(str(cost)), dielectric="X5R", manufacturer="M",
        derating=DeratingTable(points=((0.0, cap_uf * 1e-6),)),
        impedance=TabulatedImpedance(points=((1.0, z), (1e12, z))))


def two_site_problem(parts, coupling_s, masks=((0.5, None), (0.5, None)),
                     k_weights=(1.0, 1.0)):
    locations = []
    for j, ((target, load), k) in enumerate(zip(masks, k_weights)):
        mask = ()
        if target is not None:
            mask = (MaskPoint(frequency=FREQ, impedance_target=target,
                              load_impedance=load or 0.0),)
        locations.append(PlacementLocation(label=f"L{j}", k_weight=k, mask=mask))
    return PlacementProblem(
        locations=tuple(locations),
        coupling=CouplingMap([("L0", "L1", None, coupling_s)] if coupling_s else []),
        parts=tuple(parts), bias_voltage=0.0)


def brute_force(problem, cap):
    ni, nj = len(problem.parts), len(problem.locations)
    rows = []
    for j, loc in enumerate(problem.locations):
        for pt in loc.mask:
            rows.append((j, pt.frequency,
                         1.0 / (pt.impedance_target - pt.load_impedance)))
    best = None
    best_counts = None
    for combo in itertools.product(range(cap + 1), repeat=ni * nj):
        n = np.array(combo).reshape(ni, nj)
        if any(effective_admittance(n, j, f, problem) < t * (1 - 1e-9)
               for j, f, t in rows):
            continue
        obj = sum(problem.locations[j].k_weight * float(problem.parts[i].cost) * n[i, j]
                  + problem.parts[i].area * n[i, j]
                  for i in range(ni) for j in range(nj))
        if best is None or obj < best - 1e-12:
            best, best_counts = obj, n.copy()
    return best, best_counts


class TestEffectiveAdmittance:
    def test_isolated_locations_are_local_sums(self):
        part = flat_part("P", 1.0, 1.0, 1.0)
        prob = two_site_problem([part], coupling_s=0.0)
        assert effective_admittance([[2, 3]], 0, FREQ, prob) == pytest.approx(2.0)
        assert effective_admittance([[2, 3]], 1, FREQ, prob) == pytest.approx(3.0)

    def test_huge_coupling_approaches_full_sum(self):
        part = flat_part("P", 1.0, 1.0, 1.0)
        prob = two_site_problem([part], coupling_s=1e12)
        y = effective_admittance([[2, 3]], 0, FREQ, prob)
        assert abs(y - 5.0) / 5.0 < 1e-6

    def test_series_combination_hand_value(self):
        part = flat_part("P", 1.0, 1.0, 1.0)
        prob = two_site_problem([part], coupling_s=1.0)
        y = effective_admittance([[1, 1]], 0, FREQ, prob)
        assert y == pytest.approx(1.5, rel=1e-12)

    def test_empty_remote_bank_contributes_nothing(self):
        part = flat_part("P", 1.0, 1.0, 1.0)
        prob = two_site_problem([part], coupling_s=1.0)
        assert effective_admittance([[1, 0]], 0, FREQ, prob) == pytest.approx(1.0)

    def test_monotone_in_counts(self):
        rng = random.Random(2)
        parts = [flat_part(f"P{i}", rng.uniform(0.5, 2), 1.0, 1.0) for i in range(2)]
        prob = two_site_problem(parts, coupling_s=0.7)
        base = np.array([[1, 2], [0, 1]])
        y0 = effective_admittance(base, 0, FREQ, prob)
        for i in range(2):
            for j in range(2):
                bumped = base.copy()
                bumped[i, j] += 1
                assert effective_admittance(bumped, 0, FREQ, prob) >= y0 - 1e-12

    def test_shape_check(self):
        part = flat_part("P", 1.0, 1.0, 1.0)
        prob = two_site_problem([part], coupling_s=1.0)
        with pytest.raises(ValidationError):
            effective_admittance([[1, 1], [1, 1]], 0, FREQ, prob)


class TestSolvePlacement:
    def test_single_location_reduces_to_milp(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0), flat_part("P1", 2.0, 1.2, 1.6)]
        mask = (MaskPoint(frequency=FREQ, impedance_target=0.25),)
        problem = PlacementProblem(
            locations=(PlacementLocation(label="only", k_weight=1.3, mask=mask),),
            coupling=CouplingMap([]), parts=tuple(parts), bias_voltage=0.0)
        placement = solve_placement(problem, PlacementConfig(count_cap=8))
        spec = ProblemSpec(ceff_target=0.0, bias_voltage=0.0, mask=mask,
                           preference_k=1.3)
        milp = solve_milp(build_model(spec, parts))
        assert placement.objective == pytest.approx(milp.objective, abs=1e-12)

    def test_ideal_coupling_matches_merged_model(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0), flat_part("P1", 2.0, 1.2, 1.6)]
        prob = two_site_problem(parts, coupling_s=1e12,
                                masks=((0.25, None), (0.5, None)))
        sol = solve_placement(prob, PlacementConfig(count_cap=6))
        merged = solve_milp(merged_model(prob))
        assert abs(sol.objective - merged.objective) / merged.objective < 1e-6

    def test_zero_coupling_matches_independent_solves(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0), flat_part("P1", 2.0, 1.2, 1.6)]
        prob = two_site_problem(parts, coupling_s=0.0,
                                masks=((0.25, None), (0.5, None)),
                                k_weights=(1.0, 2.0))
        sol = solve_placement(prob, PlacementConfig(count_cap=8))
        total = 0.0
        for loc in prob.locations:
            spec = ProblemSpec(ceff_target=0.0, bias_voltage=0.0, mask=loc.mask,
                               preference_k=loc.k_weight)
            total += solve_milp(build_model(spec, parts)).objective
        assert sol.objective == pytest.approx(total, abs=1e-12)

    def test_randomized_against_brute_force(self):
        rng = random.Random(17)
        for _ in range(12):
            ni = rng.randrange(1, 4)
            parts = [flat_part(f"P{i}", round(rng.uniform(0.5, 3.0), 3),
                               round(rng.uniform(0.2, 2.0), 3),
                               round(rng.uniform(0.5, 2.0), 3))
                     for i in range(ni)]
            masks = tuple(
                (round(1.0 / rng.uniform(1.0, 5.0), 6), None)
                if rng.random() < 0.9 else (None, None)
                for _ in range(2))
            prob = two_site_problem(
                parts, coupling_s=round(rng.uniform(0.0, 2.0), 3), masks=masks,
                k_weights=(round(rng.uniform(0.2, 3.0), 3),
                           round(rng.uniform(0.2, 3.0), 3)))
            expected, expected_counts = brute_force(prob, cap=4)
            sol = solve_placement(prob, PlacementConfig(count_cap=4))
            if expected is None:
                assert sol.status == "infeasible"
            else:
                assert sol.status == "optimal"
                assert sol.objective == pytest.approx(expected, abs=1e-9)
                assert np.array_equal(np.array(sol.counts), expected_counts)

    def test_merged_bound_validity(self):
        rng = random.Random(23)
        for _ in range(8):
            parts = [flat_part(f"P{i}", round(rng.uniform(0.5, 3.0), 3),
                               round(rng.uniform(0.2, 2.0), 3),
                               round(rng.uniform(0.5, 2.0), 3))
                     for i in range(2)]
            prob = two_site_problem(parts,
                                    coupling_s=round(rng.uniform(0.1, 2.0), 3),
                                    masks=((0.4, None), (0.8, None)))
            sol = solve_placement(prob, PlacementConfig(count_cap=5))
            merged = solve_milp(merged_model(prob))
            if sol.status == "optimal":
                assert merged.objective <= sol.objective + 1e-9

    def test_coupling_monotonicity(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0)]
        objectives = []
        for y in (0.0, 0.5, 1.0, 5.0):
            prob = two_site_problem(parts, coupling_s=y,
                                    masks=((0.5, None), (0.5, None)))
            sol = solve_placement(prob, PlacementConfig(count_cap=10))
            objectives.append(sol.objective)
        assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))

    def test_empty_mask_location_imposes_nothing(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0)]
        prob = two_site_problem(parts, coupling_s=1.0, masks=((0.5, None), (None, None)))
        sol = solve_placement(prob, PlacementConfig(count_cap=6))
        assert sol.status == "optimal"
        counts = np.array(sol.counts)
        assert counts[:, 1].sum() == 0  # nothing placed at the free site

    def test_per_location_ceff(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0, cap_uf=1.0)]
        loc0 = PlacementLocation(label="a", k_weight=1.0, ceff_target=2.5e-6)
        loc1 = PlacementLocation(label="b", k_weight=1.0)
        prob = PlacementProblem(locations=(loc0, loc1),
                                coupling=CouplingMap([("a", "b", None, 1e12)]),
                                parts=tuple(parts), bias_voltage=0.0)
        sol = solve_placement(prob, PlacementConfig(count_cap=6))
        # capacitance never travels through coupling: must be local
        assert sol.counts[0][0] == 3
        assert sol.counts[0][1] == 0

    def test_search_space_limit(self):
        parts = [flat_part(f"P{i}", 1.0, 1.0, 1.0) for i in range(4)]
        prob = two_site_problem(parts, coupling_s=0.5,
                                masks=((0.01, None), (0.01, None)))
        with pytest.raises(SearchSpaceExceeded):
            solve_placement(prob, PlacementConfig(count_cap=100, max_leaves=1e4))

    def test_infeasible_load_impedance(self):
        parts = [flat_part("P0", 1.0, 0.5, 1.0)]
        from capopt.errors import InfeasibleMaskError
        with pytest.raises(InfeasibleMaskError):
            prob = two_site_problem(parts, coupling_s=0.0,
                                    masks=((0.5, 0.6), (None, None)))
            solve_placement(prob, PlacementConfig(count_cap=4))


class TestCouplingMap:
    def test_symmetry(self):
        cm = CouplingMap([("a", "b", None, 1.5)])
        assert cm.admittance("a", "b", 1e6) == 1.5
        assert cm.admittance("b", "a", 1e6) == 1.5

    def test_frequency_specific_overrides_wildcard(self):
        cm = CouplingMap([("a", "b", None, 1.0), ("a", "b", 2e6, 3.0)])
        assert cm.admittance("a", "b", 2e6) == 3.0
        assert cm.admittance("a", "b", 1e6) == 1.0

    def test_missing_edge_is_zero(self):
        cm = CouplingMap([])
        assert cm.admittance("a", "b", 1e6) == 0.0

    def test_self_loop_rejected(self):
        with pytest.raises(ValidationError):
            CouplingMap([("a", "a", None, 1.0)])

    def test_conflicting_values_rejected(self):
        with pytest.raises(ValidationError):
            CouplingMap([("a", "b", None, 1.0), ("b", "a", None, 2.0)])
