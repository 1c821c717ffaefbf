import itertools
from pathlib import Path

import numpy as np
import pytest

from capopt.partlib import load_library
from capopt.synth import generate_library

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def table1_parts():
    """The eight hypothetical parts, loaded through the CSV pipeline."""
    return load_library(
        (DATA / "table1.csv").read_bytes(), "csv",
        derating=(DATA / "table1_derating.csv").read_bytes())


@pytest.fixture(scope="session")
def synth_parts():
    return generate_library(220, seed=7)


def enumerate_milp(model, cap=None):
    """Brute-force oracle: best objective over the whole integer box.

    Returns (objective, counts) with ties resolved to the lexicographically
    smallest counts vector, or (None, None) when infeasible. Enumerates the
    box as one numpy batch so bounds up to ~9^6 stay fast.
    """
    bounds = [int(u) if cap is None else min(int(u), cap)
              for u in model.upper_bounds]
    grids = np.meshgrid(*[np.arange(b + 1) for b in bounds], indexing="ij")
    combos = np.stack([g.ravel() for g in grids], axis=1)
    if model.num_rows:
        tol = 1e-9 * np.maximum(1.0, np.abs(model.rhs))
        feasible = np.all(combos @ model.matrix.T >= model.rhs - tol, axis=1)
        combos = combos[feasible]
    if combos.shape[0] == 0:
        return None, None
    objectives = combos @ model.objective
    best = float(objectives.min())
    tied = combos[objectives <= best + 1e-9]
    order = np.lexsort(tied.T[::-1])  # lexicographic by first column outward
    best_counts = tuple(int(v) for v in tied[order[0]])
    best = min(best, float(model.objective @ tied[order[0]]))
    return best, best_counts
