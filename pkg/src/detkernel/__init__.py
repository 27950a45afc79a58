"""
detkernel - generalized self-contracting kernels for bilinear determinants.

Two arbitrary sets of functions {phi_j}, {psi_j} define the bilinear
``Q_n(x, y) = sum_j phi_j(x) psi_j(y)``.  Dressing ``Q_n`` with the inverse
of the overlap matrix ``<i,k> = int phi_i psi_k`` gives a kernel that is
self-contracting, so multi-fold integrals of ``det[Q_n]`` collapse to small
determinants of that kernel.  The package builds the kernel, evaluates it,
and checks the integration identities against tensor-product quadrature.
"""

from .basis import (FAMILIES, HALF_LINE, HERMITE, LAGUERRE, LEGENDRE, REAL_LINE,
                    SYMMETRIC_UNIT, UNIT, Composite, DomainError, FunctionSet, Interval,
                    MonicPoly, Monomial, OrthoFamily, WaveFunction, eval_member,
                    monic_norms, monomials, wave_function, wave_functions)
from .gram import (GramMatrix, SingularNormalizationError, WeightConventionError,
                   compute_gram, inverse_row_solve, signed_minor)
from .kernel import (BilinearQ, GeneralizedKernel, k_kernel, kernel_det, kernel_eval,
                     kernel_eval_column_oracle, q_eval)
from .quadrature import (BudgetError, NonFiniteIntegrandError, QuadratureRule, gauss_rule,
                         integrate_1d, integrate_nd)
from .fixtures import FIXTURES, get_fixture, rule_for
from .theorems import (TheoremReport, lhs_theorem1, rhs_theorem1, run_suite,
                       verify_andreief, verify_contraction_k, verify_dyson_classical,
                       verify_knorm, verify_step_iii, verify_theorem1)
from .rmt import (Ensemble, cd_kernel, cd_kernel_ratio, correlation_Rk, partition_function,
                  vandermonde_sq)

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "HALF_LINE",
    "HERMITE",
    "LAGUERRE",
    "LEGENDRE",
    "REAL_LINE",
    "SYMMETRIC_UNIT",
    "UNIT",
    "Composite",
    "DomainError",
    "FunctionSet",
    "Interval",
    "MonicPoly",
    "Monomial",
    "OrthoFamily",
    "WaveFunction",
    "eval_member",
    "monic_norms",
    "monomials",
    "wave_function",
    "wave_functions",
    "GramMatrix",
    "SingularNormalizationError",
    "WeightConventionError",
    "compute_gram",
    "inverse_row_solve",
    "signed_minor",
    "BilinearQ",
    "GeneralizedKernel",
    "k_kernel",
    "kernel_det",
    "kernel_eval",
    "kernel_eval_column_oracle",
    "q_eval",
    "BudgetError",
    "NonFiniteIntegrandError",
    "QuadratureRule",
    "gauss_rule",
    "integrate_1d",
    "integrate_nd",
    "FIXTURES",
    "get_fixture",
    "rule_for",
    "TheoremReport",
    "lhs_theorem1",
    "rhs_theorem1",
    "run_suite",
    "verify_andreief",
    "verify_contraction_k",
    "verify_dyson_classical",
    "verify_knorm",
    "verify_step_iii",
    "verify_theorem1",
    "Ensemble",
    "cd_kernel",
    "cd_kernel_ratio",
    "correlation_Rk",
    "partition_function",
    "vandermonde_sq",
]
