# %% [markdown]
# # Weak-form solve over a fixed basis
#
# For a basis `phi_j = h * phibar_j` the coefficients solve `A omega = b`
# with `A_ij = a(phi_j, phi_i)` and `b_i = (f, phi_i)`. With the sine basis
# on (0, 1) the Poisson stiffness matrix is diagonal with entries
# `k^2 pi^2 / 2`.

# %%
import numpy as np

from snnw import galerkin
from snnw.bench.metrics import evaluation_grid, relative_l2
from snnw.bench.problems import problem_helmholtz
from snnw.checks import sine_basis
from snnw.network import NetworkConfig, freeze_basis, init
from snnw.quadrature import box_rule

rule = box_rule([(0.0, 1.0)], 20, 10)
system = galerkin.assemble(sine_basis(5), galerkin.BilinearForm.poisson(1),
                           lambda x: np.pi**2 * np.sin(np.pi * x[:, 0]), rule)
print(np.round(np.diag(system.A) / (np.pi**2 / 2), 12))
print("omega", np.round(galerkin.solve(system), 12))

# %% [markdown]
# A random (untrained) network basis already solves the Helmholtz problem
# to some accuracy; adding the exact solution as one more lifted column
# makes the Galerkin solve recover it to rounding.

# %%
p = problem_helmholtz()
rule = box_rule(p.domain, *p.default_nodes)
grid = evaluation_grid(p.domain)
lifted = galerkin.LiftedBasis(freeze_basis(init(NetworkConfig(input_dim=1))), p.lift)
for name, basis in [("random basis", lifted),
                    ("random + u*", galerkin.ConcatBasis(lifted, galerkin.FunctionBasis(p.exact_jet, 1)))]:
    sysm = galerkin.assemble(basis, p.form, p.f, rule)
    omega = galerkin.solve(sysm)
    err = relative_l2(galerkin.evaluate_uh(basis, omega, grid), p.exact(grid), grid)
    print(f"{name:13s} rank {sysm.rank:3d}/{sysm.size}  rel_l2 {err:.2e}")
