from .backends import (GAP, BuiltinBackend, ExternalBackend, HighsBackend, SolveResult, SolverBackend, SolveStatus,
                       UnsupportedModel, backend_from_spec, parse_solution)
from .model import MilpModel, Row, Sense, Variable, build_f1, build_f2, export_lp, read_lp
from .solve import (Feasibility, SearchSpaceTooLarge, distinct_bound, exact_pareto, min_tec_by_horizon, model_values,
                    necessary_feasibility, oracle_pareto, schedule_from_values, schedule_from_y, solve_level,
                    warm_start_from_schedule)

__all__ = [
    "GAP", "BuiltinBackend", "ExternalBackend", "Feasibility", "HighsBackend", "MilpModel", "Row",
    "SearchSpaceTooLarge", "Sense", "SolveResult", "SolveStatus", "SolverBackend", "UnsupportedModel", "Variable",
    "backend_from_spec", "build_f1", "build_f2", "distinct_bound", "exact_pareto", "export_lp",
    "min_tec_by_horizon", "model_values", "necessary_feasibility", "oracle_pareto", "parse_solution", "read_lp",
    "schedule_from_values", "schedule_from_y", "solve_level", "warm_start_from_schedule",
]
