"""Deterministic synthetic MLCC library generator.

Used by the acceptance suite, the `genlib` CLI subcommand, and anyone who
needs a realistic few-hundred-part library without a proprietary database.

A curated engineering library has a thin efficient frontier: one or two
best-value parts per (package, capacitance, rating) niche and a long tail of
legacy or second-source alternates that are strictly worse on price and
electrical merit. The generator mirrors that: a fixed archetype table supplies
the competitive parts, and the seed only controls the dominated filler tail.
"""

from __future__ import annotations

import math
import random
from decimal import Decimal

from .partlib import (CapacitorPart, DeratingTable, SeriesRLC,
                      TabulatedImpedance, validate_part)

# pkg, cap_uF, rating_V, esr_ohm, esl_nH, keep@rated, cost_cents, dielectric, mfr
_ARCHETYPES = [
    ("0204", 0.22, 6.3, 0.012, 0.08, 0.80, "0.90", "X7R", "Acme"),
    ("0201", 0.1, 6.3, 0.030, 0.20, 0.80, "0.18", "X7R", "Acme"),
    ("0201", 0.22, 6.3, 0.025, 0.21, 0.75, "0.24", "X7R", "Acme"),
    ("0201", 0.47, 6.3, 0.022, 0.22, 0.70, "0.33", "X5R", "Borealis"),
    ("0201", 1.0, 6.3, 0.020, 0.23, 0.62, "0.48", "X5R", "Acme"),
    ("0201", 2.2, 6.3, 0.018, 0.24, 0.55, "0.75", "X5R", "Cumulus"),
    ("0201", 1.0, 10.0, 0.024, 0.23, 0.70, "0.60", "X7R", "Borealis"),
    ("0402", 2.2, 6.3, 0.015, 0.40, 0.65, "0.66", "X5R", "Acme"),
    ("0402", 4.7, 6.3, 0.012, 0.42, 0.58, "0.98", "X5R", "Borealis"),
    ("0402", 10.0, 6.3, 0.010, 0.45, 0.50, "1.55", "X5R", "Acme"),
    ("0402", 4.7, 10.0, 0.014, 0.42, 0.66, "1.20", "X7R", "Cumulus"),
    ("0402", 2.2, 16.0, 0.020, 0.44, 0.75, "0.95", "X7R", "Delta"),
    ("0603", 10.0, 6.3, 0.008, 0.60, 0.60, "1.80", "X5R", "Acme"),
    ("0603", 22.0, 6.3, 0.007, 0.65, 0.52, "2.60", "X5R", "Borealis"),
    ("0603", 10.0, 10.0, 0.009, 0.62, 0.68, "2.10", "X7R", "Acme"),
    ("0603", 4.7, 25.0, 0.015, 0.66, 0.80, "2.20", "X7R", "Delta"),
    ("0805", 22.0, 6.3, 0.006, 0.90, 0.58, "3.10", "X5R", "Cumulus"),
    ("0805", 47.0, 6.3, 0.005, 0.95, 0.50, "4.20", "X5R", "Acme"),
    ("0805", 47.0, 10.0, 0.006, 0.92, 0.62, "5.00", "X7R", "Borealis"),
]

_PKG_GEOMETRY = {  # area mm^2, height mm
    "0201": (0.7, 0.33),
    "0204": (1.1, 0.33),  # reverse-geometry low-inductance
    "0402": (1.3, 0.55),
    "0603": (2.6, 0.87),
    "0805": (4.6, 1.25),
}
_FILLER_MFRS = ["Acme", "Borealis", "Cumulus", "Delta", "Epsilon"]
_FILLER_DIELECTRICS = ["X5R", "X7R", "X7S"]


def _sig(x: float) -> float:
    """Clamp to 12 significant digits so serialized values reload exactly."""
    return float(format(x, ".12g"))


def _derating(cap_uf: float, rating: float, keep: float) -> DeratingTable:
    points = [(0.0, cap_uf * 1e-6)]
    for frac in (0.25, 0.5, 0.75, 1.0):
        kept = 1.0 - (1.0 - keep) * frac ** 1.5
        points.append((_sig(rating * frac), round(cap_uf * kept, 6) * 1e-6))
    return DeratingTable(points=tuple(points))


def _rlc_table(cap_f: float, esr: float, esl: float) -> TabulatedImpedance:
    """Sampled |Z| curve of the series model (data-sheet style export)."""
    pts = []
    for k in range(25):
        f = _sig(10.0 ** (4 + 6 * k / 24))  # 10 kHz .. 10 GHz
        w = 2 * math.pi * f
        z = _sig(math.hypot(esr, w * esl - 1.0 / (w * cap_f)))
        pts.append((f, z))
    return TabulatedImpedance(points=tuple(pts))


def generate_library(num_parts: int, seed: int) -> list[CapacitorPart]:
    """`num_parts` parts: fixed archetypes first, dominated fillers after.

    Fully determined by `seed`; two calls with equal arguments are identical.
    """
    parts: list[CapacitorPart] = []
    for i, (pkg, cap, rating, esr, esl, keep, cost, diel, mfr) in enumerate(_ARCHETYPES):
        if len(parts) >= num_parts:
            break
        area, height = _PKG_GEOMETRY[pkg]
        part = CapacitorPart(
            id=f"CAP{i:04d}",
            description=f"{cap:g}uF {pkg} {rating:g}V",
            package=pkg,
            nominal_capacitance=cap * 1e-6,
            voltage_rating=rating,
            height=height,
            area=area,
            cost=Decimal(cost),
            dielectric=diel,
            manufacturer=mfr,
            derating=_derating(cap, rating, keep),
            impedance=SeriesRLC(esr=esr, esl=esl * 1e-9),
        )
        validate_part(part)
        parts.append(part)

    rng = random.Random(seed)
    k = len(parts)
    while len(parts) < num_parts:
        pkg, cap, rating, esr, esl, keep, cost, _, _ = _ARCHETYPES[
            rng.randrange(len(_ARCHETYPES))]
        area, height = _PKG_GEOMETRY[pkg]
        cap_f = cap * 1e-6
        worse_esr = round(esr * rng.uniform(1.3, 2.5), 6)
        worse_esl = round(esl * rng.uniform(1.15, 1.8), 6)
        filler = CapacitorPart(
            id=f"CAP{k:04d}",
            description=f"{cap:g}uF {pkg} {rating:g}V alt",
            package=pkg,
            nominal_capacitance=cap_f,
            voltage_rating=rating,
            height=round(height * rng.uniform(1.0, 1.2), 4),
            area=round(area * rng.uniform(1.05, 1.3), 4),
            cost=Decimal(str(round(float(Decimal(cost)) * rng.uniform(1.25, 2.2), 4))),
            dielectric=_FILLER_DIELECTRICS[rng.randrange(3)],
            manufacturer=_FILLER_MFRS[rng.randrange(5)],
            derating=_derating(cap, rating, round(keep * rng.uniform(0.7, 0.95), 6)),
            impedance=(_rlc_table(cap_f, worse_esr, worse_esl)
                       if k % 7 == 3 else SeriesRLC(esr=worse_esr, esl=worse_esl * 1e-9)),
        )
        validate_part(filler)
        parts.append(filler)
        k += 1
    return parts
