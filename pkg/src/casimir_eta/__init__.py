"""Finite-conductivity reduction of the Casimir force and energy between plane mirrors."""

__version__ = "0.1.0"

from .constants import PAPER, PHYSICAL, UnitSystem, get_units, plasma_wavelength, to_dimensionless
from .dielectric import (DrudeDielectric, DrudeParams, PlasmaDielectric, PlasmaParams,
                         TabulatedDielectric, drude_eps_i, drude_eps_imag_real_axis,
                         plasma_eps_i, plasma_frequency_from_density)
from .engine import (QuadratureConfig, ReductionResult, eta_energy, eta_force, ideal_energy,
                     ideal_force, long_distance_eta, proximity_force, reduction_factors,
                     short_distance_alpha)
from .estimators import CasimirReduction, DrudeFitter, KramersKronigTransformer
from .exceptions import (CasimirError, ConfigError, ConvergenceError, DataError, DomainError,
                         FitError)
from .optical import (EpsIGrid, ExtrapolationPolicy, OpticalTable, build_eps_grid,
                      eval_eps_pp, fit_drude, kk_transform, load_table)
from .reflectivity import Bulk, Perfect, Slab, Stack, mirror_amplitudes

__all__ = [
    "PAPER", "PHYSICAL", "UnitSystem", "get_units", "plasma_wavelength", "to_dimensionless",
    "DrudeDielectric", "DrudeParams", "PlasmaDielectric", "PlasmaParams", "TabulatedDielectric",
    "drude_eps_i", "drude_eps_imag_real_axis", "plasma_eps_i", "plasma_frequency_from_density",
    "QuadratureConfig", "ReductionResult", "eta_energy", "eta_force", "ideal_energy",
    "ideal_force", "long_distance_eta", "proximity_force", "reduction_factors",
    "short_distance_alpha", "CasimirReduction", "DrudeFitter", "KramersKronigTransformer",
    "CasimirError", "ConfigError", "ConvergenceError", "DataError", "DomainError", "FitError",
    "EpsIGrid", "ExtrapolationPolicy", "OpticalTable", "build_eps_grid", "eval_eps_pp",
    "fit_drude", "kk_transform", "load_table", "Bulk", "Perfect", "Slab", "Stack",
    "mirror_amplitudes",
]
