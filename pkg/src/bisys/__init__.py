"""Two-body bound states in relative and individual coordinates."""

from .classical import (
    ClassicalState,
    TrajectorySet,
    check_equivalence,
    derive_individual_ics,
    integrate_individual,
    integrate_relative,
    simulate,
)
from .core import CentralPotential, RescaledPotential, TwoBodySystem, make_system, rescale_potential
from .correlation import (
    CorrelationReport,
    cm_position_spread,
    momentum_wavefunction,
    small_r_exponent,
    total_momentum_spread,
)
from .dirac import (
    DiracLevel,
    SpectrumComparison,
    bound_mass,
    dirac_energy,
    level_difference_formula,
    level_difference_numeric,
    old_prescription_energy,
)
from .schrodinger import (
    RadialGrid,
    RadialSolution,
    compare_scaled_wavefunctions,
    solve_individual,
    solve_relative,
)

__version__ = "0.1.0"

__all__ = [
    "CentralPotential",
    "ClassicalState",
    "CorrelationReport",
    "DiracLevel",
    "RadialGrid",
    "RadialSolution",
    "RescaledPotential",
    "SpectrumComparison",
    "TrajectorySet",
    "TwoBodySystem",
    "bound_mass",
    "check_equivalence",
    "cm_position_spread",
    "compare_scaled_wavefunctions",
    "derive_individual_ics",
    "dirac_energy",
    "integrate_individual",
    "integrate_relative",
    "level_difference_formula",
    "level_difference_numeric",
    "make_system",
    "momentum_wavefunction",
    "old_prescription_energy",
    "rescale_potential",
    "simulate",
    "small_r_exponent",
    "solve_individual",
    "solve_relative",
    "total_momentum_spread",
]
