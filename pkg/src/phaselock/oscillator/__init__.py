"""Limit cycle, adjoint and interaction-function reduction of one oscillator."""

from .adjoint import AdjointSolution, normalization_integral, period_defect, solve_adjoint
from .interaction import (InteractionFunction, compute_H, eval_H, eval_H_prime,
                          eval_H_third, fit_fourier, sample_H)
from .limit_cycle import LimitCycle, find_limit_cycle
from .models import (CouplingFunction, OscillatorConfig, VectorField, diffusive_coupling,
                     fd_jacobian, hopf_normal_form, load_oscillator_config, morris_lecar,
                     parse_oscillator_config, zero_coupling)

__all__ = [
    "AdjointSolution", "CouplingFunction", "InteractionFunction", "LimitCycle",
    "OscillatorConfig", "VectorField", "compute_H", "diffusive_coupling", "eval_H",
    "eval_H_prime", "eval_H_third", "fd_jacobian", "find_limit_cycle", "fit_fourier",
    "hopf_normal_form", "load_oscillator_config", "morris_lecar", "normalization_integral",
    "parse_oscillator_config", "period_defect", "sample_H", "solve_adjoint", "zero_coupling",
]
