"""Delay-differential integration of the coupled pair and its linearization."""

from .full import (
    ComparisonRecord,
    FullRun,
    classify_kind,
    compare,
    coupled_system,
    default_step,
    frequency_deviation,
    measure_period_and_phase,
    normalized_error,
    simulate_full_coupled,
)
from .integrator import DdeSystem, Trajectory, integrate_dde
from .linearized import growth_rate, integrate_linearized, linearized_system, non_neutral_norm

__all__ = [
    "ComparisonRecord", "DdeSystem", "FullRun", "Trajectory", "classify_kind",
    "compare", "coupled_system", "default_step", "frequency_deviation", "growth_rate",
    "integrate_dde", "integrate_linearized", "linearized_system",
    "measure_period_and_phase", "non_neutral_norm", "normalized_error",
    "simulate_full_coupled",
]
