"""capopt: capacitor part-selection optimization.

Chooses integer counts of MLCCs minimizing a cost/area trade-off subject to
derated-capacitance floors and impedance-envelope masks, with preference
sweeps, placement-aware PDN selection, and part demand-curve economics.
"""

from .capmodel import (MaskPoint, MilpModel, ProblemSpec, build_model,
                       part_mask_admittance, transform_mask)
from .demand import (ApplicationSet, DemandCurve, SupplyCurve,
                     SupplyIntersection, demand_curve, intersect_supply,
                     savings_area)
from .errors import (CapoptError, InfeasibleError, InfeasibleMaskError,
                     LimitError, NodeLimitExceeded, NoPartsError, ParseError,
                     SearchSpaceExceeded, ValidationError)
from .frontier import (FrontierPoint, TangencyLine, pareto_filter, sweep_k,
                       tangency_line)
from .milp import (LpSolution, MilpConfig, MilpSolution, SolutionReport,
                   check_solution, solve_lp, solve_milp)
from .partlib import (CapacitorPart, DeratingTable, PartFilter, SeriesRLC,
                      TabulatedImpedance, admittance_magnitude,
                      derated_capacitance, dump_library, filter_parts,
                      impedance_magnitude, load_library)
from .pdnplace import (CouplingMap, PlacementConfig, PlacementLocation,
                       PlacementProblem, PlacementSolution,
                       effective_admittance, merged_model, solve_placement)
from .synth import generate_library

__version__ = "0.1.0"

__all__ = [
    "ApplicationSet", "CapacitorPart", "CapoptError", "CouplingMap",
    "DemandCurve", "DeratingTable", "FrontierPoint", "InfeasibleError",
    "InfeasibleMaskError", "LimitError", "LpSolution", "MaskPoint",
    "MilpConfig", "MilpModel", "MilpSolution", "NodeLimitExceeded",
    "NoPartsError", "ParseError", "PartFilter", "PlacementConfig",
    "PlacementLocation", "PlacementProblem", "PlacementSolution",
    "ProblemSpec", "SearchSpaceExceeded", "SeriesRLC", "SolutionReport",
    "SupplyCurve", "SupplyIntersection", "TabulatedImpedance", "TangencyLine",
    "ValidationError", "admittance_magnitude", "build_model", "check_solution",
    "demand_curve", "derated_capacitance", "dump_library",
    "effective_admittance", "filter_parts", "generate_library",
    "impedance_magnitude", "intersect_supply", "load_library", "merged_model",
    "pareto_filter", "part_mask_admittance", "savings_area", "solve_lp",
    "solve_milp", "solve_placement", "sweep_k", "tangency_line",
    "transform_mask",
]
