"""Lie-symmetry workbench for the incompressible Navier-Stokes equations.

Expressions, exterior calculus on (x, y, z, t, u, v, w, p), the point-symmetry
generators, isobaric weights, self-similar solutions and conserved forms.
"""

from .expr import Expr, call, const, declare, diff, substitute, symbol, to_str
from .parser import ParseError, parse, parse_form, parse_solution
from .ratfunc import simplify
from .numeric import Verdict, is_zero
from .exterior import KForm, VectorField, d, interior_product, lie_derivative, pullback, wedge
from .symmetry import (EQ40_GENERATORS, GENERATOR_NAMES, apply_generator, covariance_factor,
                       finite_rotation, finite_scaling, generator, time_translation)
from .weights import Weight, classify, homogeneity_degree, smoothness_scenario, weight_of
from .solutions import (bouton_ansatz, classical_family, euler_number, nse_residual,
                        stagnation_solution, verify_isobaricity)
from .catalog import catalog_form
from .conserved import (AnsatzBasis, compare_with_catalog, invariant_arguments, solve_forms,
                        verify_conserved)

__all__ = [
    "Expr", "call", "const", "declare", "diff", "substitute", "symbol", "to_str",
    "ParseError", "parse", "parse_form", "parse_solution", "simplify", "Verdict", "is_zero",
    "KForm", "VectorField", "d", "interior_product", "lie_derivative", "pullback", "wedge",
    "EQ40_GENERATORS", "GENERATOR_NAMES", "apply_generator", "covariance_factor",
    "finite_rotation", "finite_scaling", "generator", "time_translation",
    "Weight", "classify", "homogeneity_degree", "smoothness_scenario", "weight_of",
    "bouton_ansatz", "classical_family", "euler_number", "nse_residual",
    "stagnation_solution", "verify_isobaricity", "catalog_form",
    "AnsatzBasis", "compare_with_catalog", "invariant_arguments", "solve_forms",
    "verify_conserved",
]

__version__ = "0.1.0"
