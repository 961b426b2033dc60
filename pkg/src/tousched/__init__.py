"""Bi-objective makespan / energy-cost scheduling on identical parallel machines under time-of-use prices."""

from .core import (TEC_TOL, Assignment, DerivedData, Front, FrontPoint, Instance, InstanceError, InvalidReason,
                   InvalidScheduleError, Objectives, Schedule, ScheduleClass, ScheduleTag, classify, derive,
                   distinct_ptimes, dominates, evaluate, jobs_by_ptime, lower_bound_makespan, pareto_filter)

__all__ = [
    "TEC_TOL", "Assignment", "DerivedData", "Front", "FrontPoint", "Instance", "InstanceError", "InvalidReason",
    "InvalidScheduleError", "Objectives", "Schedule", "ScheduleClass", "ScheduleTag", "classify", "derive",
    "distinct_ptimes", "dominates", "evaluate", "jobs_by_ptime", "lower_bound_makespan", "pareto_filter",
]
