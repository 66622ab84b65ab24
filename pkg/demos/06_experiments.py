# %% [markdown]
# # End-to-end experiments and sweeps
#
# `run_experiment` chains init, training, freezing, lifting, assembly,
# solve and the error metric. The full default configuration is what the
# CLI runs:
#
#     snnw run --problem helmholtz --variant p --out result.json
#     snnw run --problem anisotropic --variant g --k-ratio 1e6 --out aniso.json
#     snnw sweep --spec sweep.json --out table.csv
#
# Below, a reduced configuration so the script finishes in about a minute.

# %%
from snnw.bench import get_problem, run_experiment, run_sweep

quick = dict(depth=2, width=40, subspace_dim=80, n_max=1000, drm_epochs=300)
for ratio in (1.0, 1e3, 1e6):
    r = run_experiment(get_problem("anisotropic", ratio), "p", quick)
    print(f"k2/k1 = {ratio:7.0e}: rel_l2 {r.rel_l2_error:.2e} after {r.epochs} epochs, rank {r.rank}")

# %% [markdown]
# Undersampling: with only 60 Helmholtz nodes the trained basis cannot be
# trusted and the error is large, but the sweep still reports every cell.

# %%
table = run_sweep(get_problem("helmholtz"), "p", [60, 200], [20, 80], "points", quick)
table.to_csv("sweep_demo.csv")
print(open("sweep_demo.csv").read())
