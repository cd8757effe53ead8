"""Exact computation with quadratic Weyl group multiple Dirichlet series.

The zeta average Z(x; u) of a finite root system, its residues along the
divisors x_i = 1/u, the cascade kernels that express it as a parabolic
average, and the function-field coefficients it controls.

    >>> from wmds import build_root_system, zeta_direct
    >>> from wmds.exact_algebra import render_poly
    >>> render_poly(zeta_direct(build_root_system("A1")).numerator)
    '1 + u*x1'
"""

from .root_system import RootSystem, build_root_system, weyl_elements, inversion_set, orthogonal_complement
from .exact_algebra import LaurentPoly, RatFunc, QSqrtNumber, rat_equals
from .zeta_average import ZetaAverage, zeta_direct, zeta_average, numerator_recursive
from .residues import verify_theorem_A, verify_theorem_A_g2, residue_function
from .cascade import build_cascade, admissible_nodes, kernel, verify_theorem_D, verify_theorem_D_g2
from .global_mds import MonicPoly, residue_symbol, h_coefficient, verify_local_to_global, verify_twisted_mult_residue

__version__ = "0.1.0"

__all__ = [
    "RootSystem",
    "build_root_system",
    "weyl_elements",
    "inversion_set",
    "orthogonal_complement",
    "LaurentPoly",
    "RatFunc",
    "QSqrtNumber",
    "rat_equals",
    "ZetaAverage",
    "zeta_direct",
    "zeta_average",
    "numerator_recursive",
    "verify_theorem_A",
    "verify_theorem_A_g2",
    "residue_function",
    "build_cascade",
    "admissible_nodes",
    "kernel",
    "verify_theorem_D",
    "verify_theorem_D_g2",
    "MonicPoly",
    "residue_symbol",
    "h_coefficient",
    "verify_local_to_global",
    "verify_twisted_mult_residue",
]
