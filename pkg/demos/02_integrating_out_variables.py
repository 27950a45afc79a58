"""
Integrating a bilinear determinant down to a small kernel determinant.

For non-orthogonal sets the n-by-n determinant of ``Q(x_i, y_j)`` with
``n - k`` variables integrated out equals ``(n - k)! C det_k[K]``.  The
script checks this for every k on one fixture and prints the residuals.
"""

# %%
from detkernel import GeneralizedKernel, get_fixture, rule_for
from detkernel.theorems import lhs_theorem1, free_points, rhs_theorem1

phi, psi = get_fixture("hermite-nonorth", 4)
rule = rule_for(phi, psi, 30)
K = GeneralizedKernel.build(phi, psi, rule)
print("n =", K.n, " C =", K.det_C)

# %%
for k in range(K.n + 1):
    pts = free_points(phi.domain, 2 * k, seed=3)
    p, q = pts[:k], pts[k:]
    lhs = lhs_theorem1(K, k, p, q, rule)
    rhs = rhs_theorem1(K, k, p, q)
    print(f"k={k}: integral/C = {lhs: .12e}   (n-k)! det K = {rhs: .12e}   "
          f"rel diff {abs(lhs - rhs) / abs(rhs):.1e}")

# %%
# at k = 0 the integral is n! C, so dividing by C leaves n!
print("k=0 value:", lhs_theorem1(K, 0, [], [], rule), "= 4! =", 24)
