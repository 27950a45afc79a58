"""
What happens when the overlap determinant C vanishes.

The kernel is then kept multiplied by C (the adjugate replaces C * inverse).
With rank n-1 it factorises into a single product, with lower rank it is
identically zero.
"""

# %%
import numpy as np

from detkernel import GeneralizedKernel, get_fixture, rule_for
from detkernel.theorems import run_suite

x = np.linspace(-1, 1, 5)
for name in ("degenerate-rank1", "degenerate-rank2of3", "degenerate-rank1of3"):
    phi, psi = get_fixture(name)
    K = GeneralizedKernel.build(phi, psi, rule_for(phi, psi, 20))
    M = K.matrix(x, x)
    print(f"{name}: rank {K.gram.rank} of {K.n}, mode {K.mode}")
    print("  singular values of C*K on a 5x5 grid:",
          np.array2string(np.linalg.svd(M, compute_uv=False), precision=3))

# %%
# the C-multiplied integration identities still hold
reports = run_suite("degenerate")
print(sum(r.passed for r in reports), "of", len(reports), "checks pass")
for r in reports[:4]:
    print(" ", r.theorem_id, "k =", r.k, "lhs", f"{r.lhs:.3e}", "rhs", f"{r.rhs:.3e}")
