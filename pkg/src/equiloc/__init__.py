"""Numerical verification of equivariant localization with a pair of Killing fields."""

from .calculus import FormField, constant_form, exp_form, exterior_derivative, wedge
from .equivariant import GeneratorKind, TwistPair, lemma_residual, special_closed_form
from .errors import EquilocError
from .localization import (LocalizationReport, decay_profile, integrate, localization_rhs,
                           s_deformation_integral, verify_localization)
from .scenarios import CATALOG, Scenario, builtin, load_scenario
from .symplectic import SymplecticData, verify_dh
from .zeroset import find_zero_components, pfaffian

__all__ = [
    "CATALOG", "EquilocError", "FormField", "GeneratorKind", "LocalizationReport", "Scenario",
    "SymplecticData", "TwistPair", "builtin", "constant_form", "decay_profile", "exp_form",
    "exterior_derivative", "find_zero_components", "integrate", "lemma_residual",
    "load_scenario", "localization_rhs", "pfaffian", "s_deformation_integral",
    "special_closed_form", "verify_dh", "verify_localization", "wedge",
]
