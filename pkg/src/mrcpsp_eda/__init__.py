"""Hybrid estimation-of-distribution solver for multi-mode project scheduling."""

from ._kernels import BACKEND
from .dirw import dirw_pass, insertion_window, reassign_mode
from .eda import (
    ProbabilityModel,
    SolveResult,
    SolverParams,
    init_model,
    rank_select,
    run_solver,
    sample_individual,
    update_model,
)
from .model import Mode, ProjectInstance, ReductionReport, generate_tiny_instance, reduce_instance, validate_instance
from .oracle import brute_force_optimum
from .psplib_io import parse_bounds_table, parse_instance, read_bounds_table, read_instance, write_instance
from .schedule import (
    ActivityModeList,
    FitnessValue,
    Schedule,
    ScheduleCounter,
    decode_backward,
    decode_forward,
    double_justify,
    fitness_of,
    nonrenewable_excess,
    verify_schedule,
)

__version__ = "0.1.0"
