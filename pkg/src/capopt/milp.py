"""Exact solver for the integer covering programs built by capmodel.

solve_lp is a two-phase primal simplex on a dense tableau with implicit
variable bounds (nonbasic variables may sit at either bound). Dantzig pricing
is used while the objective improves; the pivot rule falls back to Bland's
anti-cycling rule whenever the iteration stalls on degenerate pivots.

solve_milp wraps it in best-bound branch and bound: branch on the most
fractional variable (ties to the lowest index), floor child first, and break
incumbent ties by the lexicographically smallest counts vector so repeated
runs return identical solutions.

Dense tableaus are fine at this scale (hundreds of variables, tens of rows);
instances beyond a few thousand variables deserve a sparse solver instead.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional, Sequence

import numpy as np

from .capmodel import MilpModel
from .errors import NodeLimitExceeded, ValidationError

_TOL = 1e-10          # pivot / reduced-cost tolerance
_PHASE1_TOL = 1e-8    # residual artificial mass that still counts as feasible
_STALL_LIMIT = 60     # degenerate pivots before switching to Bland's rule
_MAX_PIVOTS = 50_000


def _simplex_loop(tab, beta, basis, ubs, at_upper, banned, reduced,
                  stall_limit, max_pivots):
    """Bounded-variable primal simplex iterations on an explicit tableau.

    Mutates every array argument in place; `reduced` must hold the reduced
    costs of the starting basis. Returns 0 when optimal, 1 on pivot-limit
    overrun, 2 on an unbounded improving ray. Written with plain loops so the
    same source runs under numba's nopython JIT and as ordinary Python.
    """
    m, ncols = tab.shape
    nonbasic = np.ones(ncols, dtype=np.bool_)
    for i in range(m):
        nonbasic[basis[i]] = False

    stall = 0
    for _ in range(max_pivots):
        # Entering column: Dantzig while progress is made, Bland when stalled.
        j = -1
        if stall >= stall_limit:
            for col in range(ncols):
                if nonbasic[col] and not banned[col]:
                    g = -reduced[col] if at_upper[col] else reduced[col]
                    if g < -_TOL:
                        j = col
                        break
        else:
            best_gain = -_TOL
            for col in range(ncols):
                if nonbasic[col] and not banned[col]:
                    g = -reduced[col] if at_upper[col] else reduced[col]
                    if g < best_gain:
                        best_gain = g
                        j = col
        if j == -1:
            return 0

        direction = -1.0 if at_upper[j] else 1.0
        # Increasing the entering step t moves basic values by -t*column.
        t_best = ubs[j]  # flip to the opposite bound
        leave = -1
        for i in range(m):
            ci = direction * tab[i, j]
            if ci > _TOL:
                t = beta[i] / ci
            elif ci < -_TOL:
                ub_i = ubs[basis[i]]
                if not math.isfinite(ub_i):
                    continue
                t = (ub_i - beta[i]) / (-ci)
            else:
                continue
            if t < t_best - _TOL or (t < t_best + _TOL and (
                    leave == -1 or basis[i] < basis[leave])):
                if t < t_best:
                    t_best = t
                leave = i
        if not math.isfinite(t_best):
            return 2
        if t_best < 0.0:
            t_best = 0.0

        if leave == -1:
            # entering variable flips to its opposite bound
            for i in range(m):
                beta[i] -= direction * tab[i, j] * t_best
            at_upper[j] = not at_upper[j]
            stall = 0 if t_best > _TOL else stall + 1
            continue

        leaving = basis[leave]
        for i in range(m):
            beta[i] -= direction * tab[i, j] * t_best
        beta[leave] = (ubs[j] - t_best) if at_upper[j] else t_best
        hit_upper = direction * tab[leave, j] < 0.0

        piv = tab[leave, j]
        inv = 1.0 / piv
        for col in range(ncols):
            tab[leave, col] *= inv
        for i in range(m):
            if i != leave:
                f = tab[i, j]
                if f != 0.0:
                    for col in range(ncols):
                        tab[i, col] -= f * tab[leave, col]
                    tab[i, j] = 0.0
        tab[leave, j] = 1.0
        basis[leave] = j
        nonbasic[j] = False
        nonbasic[leaving] = True
        at_upper[leaving] = hit_upper
        at_upper[j] = False

        rj = reduced[j]
        improvement = abs(rj) * t_best
        for col in range(ncols):
            reduced[col] -= rj * tab[leave, col]
        reduced[j] = 0.0
        stall = 0 if improvement > _TOL else stall + 1
    return 1


try:  # the JIT turns each LP solve from ~0.5 ms into tens of microseconds
    import numba

    _simplex_loop = numba.njit(cache=True)(_simplex_loop)
except ImportError:  # pragma: no cover - numba is a soft dependency
    pass


@dataclass(frozen=True)
class LpSolution:
    values: np.ndarray
    objective: float
    status: str  # "optimal" | "infeasible"
    # Reduced costs of the structural variables at the optimal basis; solver
    # internals use them for bound tightening. None when infeasible.
    reduced_costs: Optional[np.ndarray] = None


@dataclass(frozen=True)
class MilpSolution:
    counts: tuple[int, ...]
    objective: float
    status: str  # "optimal" | "infeasible"
    nodes_explored: int
    wall_time: float


@dataclass(frozen=True)
class MilpConfig:
    integrality_tol: float = 1e-6
    node_limit: int = 1_000_000
    # Variable order used when comparing equal-objective incumbents; defaults
    # to natural index order (plain lexicographic).
    tie_priority: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class RowCheck:
    label: str
    achieved: float
    rhs: float
    slack: float
    satisfied: bool


@dataclass(frozen=True)
class SolutionReport:
    rows: tuple[RowCheck, ...]
    feasible: bool
    total_cost: Decimal   # cents
    total_area: float     # mm^2
    objective: float


class _Tableau:
    """Bounded-variable simplex state over equality rows T.z = beta."""

    def __init__(self, tab: np.ndarray, beta: np.ndarray, basis: np.ndarray,
                 ubs: np.ndarray, banned: np.ndarray):
        self.tab = tab          # (M, N) current B^-1 A
        self.beta = beta        # (M,) basic variable values
        self.basis = basis      # (M,) basic column per row
        self.ubs = ubs          # (N,) upper bounds (lower bounds are 0)
        self.at_upper = np.zeros(tab.shape[1], dtype=bool)
        self.banned = banned    # columns that may never enter (phase-2 artificials)

    def pivot(self, row: int, col: int) -> None:
        piv = self.tab[row, col]
        self.tab[row] /= piv
        factors = self.tab[:, col].copy()
        factors[row] = 0.0
        self.tab -= np.outer(factors, self.tab[row])
        self.tab[:, col] = 0.0
        self.tab[row, col] = 1.0
        self.basis[row] = col

    def run(self, costs: np.ndarray) -> np.ndarray:
        """Minimize costs.z from the current basic feasible point.

        Returns the final reduced-cost row; raises on unbounded rays or a
        pivot-limit overrun, neither of which a well-formed bounded model can
        produce.
        """
        m, _ = self.tab.shape
        reduced = costs.astype(float).copy()
        for i in range(m):
            cb = costs[self.basis[i]]
            if cb != 0.0:
                reduced -= cb * self.tab[i]
        status = _simplex_loop(self.tab, self.beta, self.basis, self.ubs,
                               self.at_upper, self.banned, reduced,
                               _STALL_LIMIT, _MAX_PIVOTS)
        if status == 2:
            raise RuntimeError("simplex detected an unbounded direction")
        if status == 1:
            raise RuntimeError("simplex pivot limit exceeded")
        return reduced

    def values(self, n_cols: int) -> np.ndarray:
        z = np.where(self.at_upper[:n_cols], self.ubs[:n_cols], 0.0)
        z = np.where(np.isfinite(z), z, 0.0)
        for i, b in enumerate(self.basis):
            if b < n_cols:
                z[b] = self.beta[i]
        return z


def solve_lp(model: MilpModel, bounds=None) -> LpSolution:
    """LP relaxation: min c.x s.t. A.x >= b, per-variable bounds.

    `bounds` overrides the model's [0, upper] box (used by branch and bound):
    either a sequence of (lower, upper) pairs or a (lower, upper) array pair.
    """
    n = model.num_variables
    if bounds is None:
        lo = np.zeros(n)
        hi = model.upper_bounds.astype(float)
    elif isinstance(bounds, tuple) and len(bounds) == 2 and isinstance(bounds[0], np.ndarray):
        lo, hi = bounds
        if lo.shape != (n,) or hi.shape != (n,):
            raise ValidationError(
                f"bounds shape does not match {n} variables")
    else:
        if len(bounds) != n:
            raise ValidationError(
                f"bounds length {len(bounds)} does not match {n} variables")
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
    if np.any(lo > hi):
        return LpSolution(values=np.zeros(n), objective=math.inf, status="infeasible")
    if np.any(lo < 0):
        raise ValidationError("lower bounds must be nonnegative")

    m = model.num_rows
    if m == 0 or n == 0:
        x = lo.copy()
        if m > 0 and np.any(model.rhs > 1e-15):
            return LpSolution(values=x, objective=math.inf, status="infeasible")
        return LpSolution(values=x, objective=float(model.objective @ x),
                          status="optimal", reduced_costs=model.objective.copy())

    # Scale rows to O(1) so one pivot tolerance fits farad- and siemens-scale rows.
    scale = np.maximum(np.abs(model.rhs), np.abs(model.matrix).max(axis=1))
    scale[scale == 0.0] = 1.0
    a = model.matrix / scale[:, None]
    residual = (model.rhs - model.matrix @ lo) / scale
    span = hi - lo

    if np.all(model.matrix >= 0.0):
        # Covering rows peak at x = hi, so infeasibility is a direct check;
        # this skips a doomed phase 1 on every infeasible branch node.
        if np.any(a @ span - residual < -1e-9):
            return LpSolution(values=np.zeros(n), objective=math.inf,
                              status="infeasible")

    state, total = _phase1(model, a, residual, span, n, m)
    if state is None:
        return LpSolution(values=np.zeros(n), objective=math.inf,
                          status="infeasible")

    phase2 = np.zeros(total)
    phase2[:n] = model.objective
    reduced = state.run(phase2)

    x = lo + state.values(n)
    return LpSolution(values=x, objective=float(model.objective @ x),
                      status="optimal", reduced_costs=reduced[:n].copy())


def _phase1(model: MilpModel, a: np.ndarray, residual: np.ndarray, span: np.ndarray,
            n: int, m: int):
    """Phase 1 from the lower corner: minimize artificial mass to find a BFS."""
    art_rows = np.flatnonzero(residual > 0)
    n_art = art_rows.size
    total = n + m + n_art
    tab = np.zeros((m, total))
    ubs = np.full(total, math.inf)
    ubs[:n] = span
    beta = np.empty(m)
    basis = np.empty(m, dtype=int)
    art_of_row = {int(r): n + m + k for k, r in enumerate(art_rows)}
    for i in range(m):
        if residual[i] > 0:
            tab[i, :n] = a[i]
            tab[i, n + i] = -1.0
            j = art_of_row[i]
            tab[i, j] = 1.0
            beta[i] = residual[i]
            basis[i] = j
        else:
            tab[i, :n] = -a[i]
            tab[i, n + i] = 1.0
            beta[i] = -residual[i]
            basis[i] = n + i

    state = _Tableau(tab, beta, basis, ubs, np.zeros(total, dtype=bool))
    if n_art:
        phase1 = np.zeros(total)
        phase1[n + m:] = 1.0
        state.run(phase1)
        art_mass = sum(state.beta[i] for i in range(len(state.basis))
                       if state.basis[i] >= n + m)
        if art_mass > _PHASE1_TOL * max(1.0, float(np.abs(residual).sum())):
            return None, total
        # Drive leftover zero-valued artificials out of the basis.
        drop: list[int] = []
        for i in range(len(state.basis)):
            if state.basis[i] >= n + m:
                row = state.tab[i, :n + m]
                nonzero = np.abs(row) > _TOL
                candidates = np.flatnonzero(nonzero & ~state.at_upper[:n + m])
                if candidates.size:
                    state.pivot(i, int(candidates[0]))
                elif nonzero.any():
                    # Only at-upper columns could replace it; pin the
                    # artificial at zero and leave it basic instead.
                    state.ubs[state.basis[i]] = 0.0
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(len(state.basis)) if i not in set(drop)]
            state.tab = state.tab[keep]
            state.beta = state.beta[keep]
            state.basis = state.basis[keep]
        state.banned[n + m:] = True
    return state, total


def _feasible_counts(model: MilpModel, counts: np.ndarray) -> bool:
    if model.num_rows == 0:
        return True
    achieved = model.matrix @ counts
    tol = 1e-9 * np.maximum(1.0, np.abs(model.rhs))
    return bool(np.all(achieved >= model.rhs - tol))


def _greedy_cover(model: MilpModel, hi: np.ndarray) -> Optional[np.ndarray]:
    """Cheap feasible counts vector: repeatedly add the best value-per-cent part.

    Never fails when the box [0, hi] contains a feasible point of a covering
    model; the result seeds the incumbent so pruning works from the start.
    """
    if model.num_rows == 0:
        return np.zeros(model.num_variables, dtype=int)
    counts = np.zeros(model.num_variables, dtype=int)
    deficit = model.rhs.astype(float).copy()
    scale = np.maximum(np.abs(model.rhs), 1e-300)
    tol = 1e-9 * np.maximum(1.0, np.abs(model.rhs))
    for _ in range(int(hi.sum()) + 1):
        need = deficit > tol
        if not need.any():
            return counts
        contrib = (np.minimum(model.matrix[need], deficit[need, None])
                   / scale[need, None]).sum(axis=0) / model.objective
        contrib[counts >= hi] = 0.0
        j = int(np.argmax(contrib))
        if contrib[j] <= 0.0:
            return None
        counts[j] += 1
        deficit -= model.matrix[:, j]
    return None


def _slice_model(model: MilpModel, keep: np.ndarray, hi: np.ndarray) -> MilpModel:
    return MilpModel(
        variable_ids=tuple(model.variable_ids[j] for j in keep),
        objective=model.objective[keep].copy(),
        matrix=model.matrix[:, keep].copy(),
        rhs=model.rhs.copy(),
        row_labels=model.row_labels,
        upper_bounds=hi[keep].copy(),
        costs=tuple(model.costs[j] for j in keep),
        areas=model.areas[keep].copy(),
    )


def solve_milp(model: MilpModel, config: MilpConfig = MilpConfig()) -> MilpSolution:
    """Globally optimal integer solution by best-bound branch and bound."""
    start = time.perf_counter()
    n = model.num_variables
    priority = config.tie_priority if config.tie_priority is not None else tuple(range(n))
    if sorted(priority) != list(range(n)):
        raise ValidationError("tie_priority must be a permutation of variable indices")

    def finish(status: str, counts, objective, nodes) -> MilpSolution:
        return MilpSolution(
            counts=tuple(int(v) for v in counts),
            objective=objective,
            status=status,
            nodes_explored=nodes,
            wall_time=time.perf_counter() - start,
        )

    root_hi = model.upper_bounds.astype(int).copy()
    root = solve_lp(model, (np.zeros(n), root_hi.astype(float)))
    nodes = 1
    if root.status == "infeasible":
        return finish("infeasible", np.zeros(n, dtype=int), math.inf, nodes)
    root_bound = root.objective

    # Seed the incumbent with a greedy cover, then use the root reduced costs
    # to shrink variable ranges: forcing a nonbasic variable off its bound
    # costs at least its reduced cost per unit, so units beyond the incumbent
    # gap (plus the tie window) cannot appear in any optimal solution.
    seed = _greedy_cover(model, root_hi)
    full_counts = None
    full_obj = math.inf
    if seed is not None:
        full_counts = seed.copy()
        full_obj = float(model.objective @ seed)
        gap = full_obj + 1e-9 - root.objective
        red = root.reduced_costs
        for j in range(n):
            dj = float(red[j])
            if dj > 1e-9:
                allowance = int(math.floor(root.values[j] + gap / dj + 1e-12))
                # Never tighten below the seed itself: it must stay in the box.
                root_hi[j] = min(root_hi[j], max(allowance, int(seed[j]), 0))

    keep = np.flatnonzero(root_hi > 0)
    sliced = keep.size < n
    if sliced:
        sub = _slice_model(model, keep, root_hi)
        kset = set(keep.tolist())
        sub_priority = tuple(
            int(np.searchsorted(keep, p)) for p in priority if p in kset)
        inv = keep
    else:
        sub = model
        sub_priority = priority
        inv = np.arange(n)

    sn = sub.num_variables

    def tie_key(counts: np.ndarray) -> tuple[int, ...]:
        return tuple(int(counts[p]) for p in sub_priority)

    best_counts: Optional[np.ndarray] = None
    best_obj = math.inf
    best_key: Optional[tuple[int, ...]] = None
    if full_counts is not None:
        best_counts = full_counts[inv] if sliced else full_counts
        best_obj = full_obj
        best_key = tie_key(best_counts)

    lo0 = np.zeros(sn, dtype=int)
    hi0 = sub.upper_bounds.astype(int).copy()
    sub_root = solve_lp(sub, (lo0.astype(float), hi0.astype(float)))
    nodes += 1
    if sub_root.status == "infeasible":
        return finish("infeasible", np.zeros(n, dtype=int), math.inf, nodes)

    heap: list = []
    seq = 0
    heapq.heappush(heap, (sub_root.objective, seq, lo0, hi0, sub_root.values))

    while heap:
        bound, _, lo, hi, xlp = heapq.heappop(heap)
        if bound > best_obj + 1e-9:
            break

        frac = np.abs(xlp - np.round(xlp))
        branch_j = -1
        if np.all(frac <= config.integrality_tol):
            counts = np.round(xlp).astype(int)
            if _feasible_counts(sub, counts):
                obj = float(sub.objective @ counts)
                if obj < best_obj - 1e-9:
                    best_counts, best_obj, best_key = counts, obj, tie_key(counts)
                elif obj <= best_obj + 1e-9:
                    key = tie_key(counts)
                    if best_key is None or key < best_key:
                        best_counts, best_obj, best_key = counts, min(best_obj, obj), key
                continue
            # Rounding a near-integral point off the feasible set: split on the
            # largest residual instead of accepting it.
            residual = np.where(hi > lo, frac, -1.0)
            branch_j = int(np.argmax(residual))
            if residual[branch_j] <= 0:
                continue  # box is a single infeasible point
        if branch_j < 0:
            distance = np.minimum(frac, 1.0 - frac)
            branch_j = int(np.argmax(distance))

        split = math.floor(xlp[branch_j])
        split = min(max(split, int(lo[branch_j])), int(hi[branch_j]) - 1)
        for child_lo, child_hi in (
                (lo, _with(hi, branch_j, split)),          # floor branch first
                (_with(lo, branch_j, split + 1), hi)):
            if nodes >= config.node_limit:
                best = None
                if best_counts is not None:
                    best = finish("optimal", _scatter(best_counts, inv, n), best_obj, nodes)
                raise NodeLimitExceeded(
                    f"node limit {config.node_limit} exceeded", best=best)
            child = solve_lp(sub, (child_lo.astype(float), child_hi.astype(float)))
            nodes += 1
            if child.status == "infeasible" or child.objective > best_obj + 1e-9:
                continue
            seq += 1
            heapq.heappush(heap, (child.objective, seq, child_lo, child_hi, child.values))

    if best_counts is None:
        return finish("infeasible", np.zeros(n, dtype=int), math.inf, nodes)
    final = _scatter(best_counts, inv, n)
    objective = float(model.objective @ final)
    assert root_bound <= objective + 1e-9, "LP bound exceeded integer optimum"
    assert _feasible_counts(model, final), "incumbent fails feasibility check"
    return finish("optimal", final, objective, nodes)


def _with(arr: np.ndarray, idx: int, value: int) -> np.ndarray:
    out = arr.copy()
    out[idx] = value
    return out


def _scatter(counts: np.ndarray, keep: np.ndarray, n: int) -> np.ndarray:
    if counts.shape == (n,) and keep.shape == (n,) and np.array_equal(keep, np.arange(n)):
        return counts
    out = np.zeros(n, dtype=int)
    out[keep] = counts
    return out


def check_solution(model: MilpModel, counts: Sequence[int]) -> SolutionReport:
    """Per-row slack report plus exact cost/area totals for a counts vector."""
    vec = np.asarray(counts, dtype=float)
    if vec.shape != (model.num_variables,):
        raise ValidationError(
            f"counts length {vec.size} does not match {model.num_variables} variables")
    if np.any(vec < 0):
        raise ValidationError("counts must be nonnegative")

    rows = []
    feasible = True
    for i, label in enumerate(model.row_labels):
        achieved = float(model.matrix[i] @ vec)
        rhs = float(model.rhs[i])
        slack = achieved - rhs
        ok = slack >= -1e-9 * max(1.0, abs(rhs))
        feasible &= ok
        rows.append(RowCheck(label=label, achieved=achieved, rhs=rhs,
                             slack=slack, satisfied=ok))

    total_cost = sum((c * int(v) for c, v in zip(model.costs, counts)), Decimal(0))
    total_area = float(model.areas @ vec)
    return SolutionReport(
        rows=tuple(rows),
        feasible=feasible,
        total_cost=total_cost,
        total_area=total_area,
        objective=float(model.objective @ vec),
    )
