"""
k-variable kernels: contraction and normalisation.

``K^(k)(p; q) = det_k[K(p_i, q_j)] / k!`` contracts with itself and
integrates to a binomial coefficient.
"""

# %%
import math

from detkernel import GeneralizedKernel, get_fixture, rule_for
from detkernel.theorems import verify_contraction_k, verify_knorm

for name in ("mixed", "laguerre-wave"):
    phi, psi = get_fixture(name, 5)
    rule = rule_for(phi, psi, 24)
    K = GeneralizedKernel.build(phi, psi, rule)
    for k in (1, 2, 3):
        c = verify_contraction_k(K, k, rule=rule, seed=1)
        nrm = verify_knorm(K, k, rule=rule)
        print(f"{name:14s} k={k}  contraction rel {c.rel_residual:.1e}   "
              f"norm {nrm.lhs:.10f} (binomial {math.comb(5, k)})")
