"""
Unitary-ensemble eigenvalue correlations from the kernel.

Density, pair correlation and the partition function of a Gaussian ensemble,
with the integration hierarchy checked numerically.
"""

# %%
import numpy as np

from detkernel.rmt import (Ensemble, cd_kernel_ratio, correlation_Rk, integrate_all_Rk,
                           integrate_Rk, partition_function)

E = Ensemble("hermite", 6)
xs = np.linspace(-4, 4, 9)
print("density R1:", np.array2string(np.array([correlation_Rk(E, [x]) for x in xs]),
                                    precision=4))
print("int R1 =", integrate_all_Rk(E, 1))

# %%
# pair correlation vanishes on the diagonal (level repulsion)
for y in (0.0, 0.1, 0.5, 1.0):
    print(f"R2(0, {y}) = {correlation_Rk(E, [0.0, y]):.5f}")

# %%
# integrating out one variable of R2 gives (n-1) R1
x0 = 0.7
print("int R2(x0, y) dy =", integrate_Rk(E, [x0]), " (n-1) R1(x0) =",
      5 * correlation_Rk(E, [x0]))

# %%
# the closed Christoffel-Darboux form agrees with the direct sum
print("CD ratio:", cd_kernel_ratio(E, 0.3, -1.1), " direct:", E.kernel_matrix([0.3], [-1.1])[0, 0])

# %%
small = Ensemble("hermite", 3)
print("Z_3 closed form", partition_function(small), " oracle", partition_function(small, "oracle"))
