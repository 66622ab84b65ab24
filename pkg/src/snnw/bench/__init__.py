"""Benchmark problems, metrics and experiment drivers."""

from .experiment import ExperimentConfig, ExperimentResult, run_experiment, run_sweep
from .metrics import evaluation_grid, relative_l2
from .problems import ProblemSpec, get_problem, problem_anisotropic, problem_helmholtz, problem_poisson2d

__all__ = [
    "ExperimentConfig", "ExperimentResult", "ProblemSpec", "evaluation_grid", "get_problem",
    "problem_anisotropic", "problem_helmholtz", "problem_poisson2d", "relative_l2", "run_experiment",
    "run_sweep",
]
