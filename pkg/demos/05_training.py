# %% [markdown]
# # Training the subspace
#
# The three variants differ only in the loss: mean squared strong residual
# (SNNW-P), its quadrature L2 norm (SNNW-G), or the Ritz energy of the
# lifted output (SNNW-R). P and G stop once `loss / initial_loss <= eps`;
# R runs a fixed number of epochs. A smaller network keeps this quick.

# %%
from snnw import galerkin
from snnw.bench.metrics import evaluation_grid, relative_l2
from snnw.bench.problems import problem_helmholtz
from snnw.network import NetworkConfig, freeze_basis, init
from snnw.quadrature import box_rule
from snnw.training import TrainConfig, train

p = problem_helmholtz()
rule = box_rule(p.domain, 100, 10)
grid = evaluation_grid(p.domain)
net = init(NetworkConfig(input_dim=1, depth=2, width=50, subspace_dim=100))

for variant in ("p", "g", "r"):
    trained, rep = train(net, p, rule, TrainConfig(variant, n_max=1500, drm_epochs=600))
    raw = relative_l2(trained(grid), p.exact(grid), grid)
    basis = galerkin.LiftedBasis(freeze_basis(trained), p.lift)
    omega = galerkin.solve(galerkin.assemble(basis, p.form, p.f, rule))
    err = relative_l2(galerkin.evaluate_uh(basis, omega, grid), p.exact(grid), grid)
    print(f"{rep.stop_reason:>12s} after {rep.epochs_run:4d} epochs: trained output {raw:.1e}, "
          f"after the Galerkin solve {err:.1e}")

# %% [markdown]
# The P and G losses carry no boundary term, so the trained output itself
# can be far from the solution: it matches the PDE only up to the null space
# of the operator. The span of its subspace layer is still good, and the
# lifted Galerkin solve fixes both the boundary values and the coefficients.
