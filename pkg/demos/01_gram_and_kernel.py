"""
Overlap matrix and kernel for two small function sets.

Run with ``python demos/01_gram_and_kernel.py``.
"""

# %%
import numpy as np

from detkernel import GeneralizedKernel, gauss_rule, kernel_eval_column_oracle, monomials
from detkernel.basis import UNIT

# phi = psi = {1, x} on [0, 1]; the overlap matrix is the 2x2 Hilbert matrix
s = monomials(2)
rule = gauss_rule(UNIT, 8)
K = GeneralizedKernel.build(s, s, rule)
print("overlap matrix:\n", K.gram.entries)
print("C =", K.det_C, "(1/12 =", 1 / 12, ")")

# %%
# the kernel is 4 - 6p - 6q + 12pq; compare the fast form with the
# column-replacement sum on a few points
for p, q in [(0.0, 0.0), (0.25, 0.75), (1.0, 1.0)]:
    fast = K(p, q)
    slow = kernel_eval_column_oracle(K, p, q)
    print(f"K({p}, {q}) = {fast:.15f}   column sum = {slow:.15f}")

# %%
# the trace integrates to the number of functions
print("int K(x, x) dx =", rule.weights @ K(rule.nodes, rule.nodes))

# %%
# self-contraction: int K(p, x) K(x, q) dx reproduces K(p, q)
p, q = 0.3, 0.8
print("contracted:", np.sum(rule.weights * K(p, rule.nodes) * K(rule.nodes, q)),
      "direct:", K(p, q))
