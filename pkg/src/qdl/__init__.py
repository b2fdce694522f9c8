"""Numerical laboratory for the one-level density of low-lying zeros of
quadratic Dirichlet L-functions, with the function-field analogue.

The same statistic is computed three independent ways and the pieces are
cross-checked against each other:

 * zeros.empirical_density sums a test function over zeros computed
   directly on the critical line;
 * explicit.density evaluates the same family average exactly through
   the explicit formula (conductor, prime and archimedean blocks);
 * predict.theorem_rhs assembles the closed-form expansions in powers
   of 1/log X, including the phase-transition terms at support 1.

ffield mirrors the construction for hyperelliptic curves over F_q.
"""

from .arith import SieveTables, Constants, build_sieves, compute_constants
from .testfn import TestFunction, fejer, fejer_squared
from .weightfn import (WeightFunction, MobiusKernels, build_mobius_kernels,
                       gaussian_weight, get_mobius_kernels)
from .explicit import (F_ALL, F_STAR, FamilySpec, DensityBreakdown,
                       build_family, conductor, density,
                       log_conductor_average, scale_length, single_L_density,
                       total_weight)
from .zeros import (LFunction, ZeroSet, dirichlet_L, empirical_density,
                    find_zeros, find_zeros_cached, z_function, zero_sum)
from .predict import (ExpansionReport, J_X, R_w1, T1_1, T1_2, T1_3, T3_5,
                      THEOREMS, U1, U2, c_w1, default_constants,
                      default_tables, error_exponents, euler_prime_sum,
                      katz_sarnak_main, r_w1_bracket, s_even_expansion,
                      theorem_rhs, v_w1)
from .ffield import (LPolynomial, RudnickPrediction, enumerate_monic_squarefree,
                     ff_one_level_density, l_polynomial, point_counts,
                     rudnick_rhs, validate_family)

__version__ = "0.1.0"

__all__ = [
    "SieveTables", "Constants", "build_sieves", "compute_constants",
    "TestFunction", "fejer", "fejer_squared",
    "WeightFunction", "MobiusKernels", "build_mobius_kernels",
    "gaussian_weight", "get_mobius_kernels",
    "F_ALL", "F_STAR", "FamilySpec", "DensityBreakdown", "build_family",
    "conductor", "density", "log_conductor_average", "scale_length",
    "single_L_density", "total_weight",
    "LFunction", "ZeroSet", "dirichlet_L", "empirical_density", "find_zeros",
    "find_zeros_cached", "z_function", "zero_sum",
    "ExpansionReport", "J_X", "R_w1", "T1_1", "T1_2", "T1_3", "T3_5",
    "THEOREMS", "U1", "U2", "c_w1", "default_constants", "default_tables",
    "error_exponents", "euler_prime_sum", "katz_sarnak_main", "r_w1_bracket",
    "s_even_expansion", "theorem_rhs", "v_w1",
    "LPolynomial", "RudnickPrediction", "enumerate_monic_squarefree",
    "ff_one_level_density", "l_polynomial", "point_counts", "rudnick_rhs",
    "validate_family",
    "__version__",
]
