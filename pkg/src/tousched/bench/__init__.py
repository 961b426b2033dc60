from .experiment import ALGORITHMS, ExperimentResult, RunConfig, emit_metrics, run_experiment
from .generator import GeneratorParams, generate_instance
from .io import (FormatError, format_front, format_instance, parse_instance, read_front, read_instance,
                 read_schedules, sidecar_path, write_front, write_instance, write_schedules)

__all__ = [
    "ALGORITHMS", "ExperimentResult", "FormatError", "GeneratorParams", "RunConfig", "emit_metrics",
    "format_front", "format_instance", "generate_instance", "parse_instance", "read_front", "read_instance",
    "read_schedules", "run_experiment", "sidecar_path", "write_front", "write_instance", "write_schedules",
]
