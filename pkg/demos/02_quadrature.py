# %% [markdown]
# # Composite Gauss-Legendre rules
#
# Training and assembly both integrate over the same tensor-product rule:
# `n_sub` equal subintervals per axis with `n_pts` Gauss points each.

# %%
import numpy as np

from snnw.quadrature import box_rule, gauss_legendre, integrate

x, w = gauss_legendre(4)
print("4-point nodes  ", x)
print("4-point weights", w)

# %%
helm = box_rule([(0.0, 2.0)], 100, 10)
square = box_rule([(0.0, 1.0), (0.0, 1.0)], 16, 4)
print("Helmholtz rule:", helm.size, "nodes; unit square:", square.size, "nodes")

# %% [markdown]
# An n-point rule is exact up to degree 2n - 1, and whole periods of a
# sine integrate to zero.

# %%
P = np.polynomial.Polynomial(np.arange(1.0, 21.0))
print("degree 19, 10 pts:", integrate(box_rule([(0, 1)], 1, 10), lambda x: P(x[:, 0])),
      "exact", P.integ()(1.0))
print("sin(3 pi x) on [0, 2]:", integrate(helm, lambda x: np.sin(3 * np.pi * x[:, 0])))
print("area of the square:", integrate(square, lambda x: np.ones(len(x))))
