"""Locked solutions of the delayed phase model and their stability."""

from .config import Kind, PhaseConfig, PhaseLockedSolution
from .export import SOLUTION_COLUMNS, read_solutions_csv, solution_row, write_solutions_csv
from .first_mode import FirstModeReport, OutOfPhaseCase, first_mode_analysis
from .locking import (
    find_all_locked,
    find_locked_frequencies,
    find_out_of_phase,
    omega_bracket,
    residual_F,
    residual_F_domega,
    small_delay_solutions,
)
from .stability import (
    MARGINAL_TOL,
    RegionLabel,
    RootRegion,
    Verdict,
    characteristic_derivative,
    characteristic_residual,
    classify_ab,
    classify_stability,
    linearization_coefficients,
    region_from_signs,
    sign_triple,
    verdict_from_signs,
)

__all__ = [
    "FirstModeReport", "Kind", "MARGINAL_TOL", "OutOfPhaseCase", "PhaseConfig",
    "PhaseLockedSolution", "RegionLabel", "RootRegion", "SOLUTION_COLUMNS", "Verdict",
    "characteristic_derivative", "characteristic_residual", "classify_ab",
    "classify_stability", "find_all_locked", "find_locked_frequencies",
    "find_out_of_phase", "first_mode_analysis", "linearization_coefficients",
    "omega_bracket", "read_solutions_csv", "region_from_signs", "residual_F",
    "residual_F_domega", "sign_triple", "small_delay_solutions", "solution_row",
    "verdict_from_signs", "write_solutions_csv",
]
