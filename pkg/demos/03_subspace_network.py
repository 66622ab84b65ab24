# %% [markdown]
# # The subspace network
#
# Hidden Tanh layers feed a subspace layer of width M; the output is the
# bias-free combination `u = sum_j omega_j phi_j`. After training, the
# subspace outputs are frozen and used as a basis.

# %%
import numpy as np

from snnw.network import NetworkConfig, freeze_basis, init

net = init(NetworkConfig(input_dim=1, depth=4, width=100, subspace_dim=300, seed=1))
print("layers", net.config.layer_sizes, "parameters", net.n_parameters)

x = np.linspace(0, 2, 5)[:, None]
u, phis = net.forward_jets(x)
print("phis", phis.value.shape, " u", u.value.shape)
print("u = phis @ omega:", np.allclose(u.value, phis.value @ net.omega, atol=1e-15))

# %% [markdown]
# Freezing copies the hidden parameters into a read-only basis.

# %%
basis = freeze_basis(net)
print("basis dim", basis.dim, " identical to network:", np.array_equal(basis(x), phis.value))
s = np.linalg.svd(basis(np.linspace(0, 2, 1000)[:, None]), compute_uv=False)
print("singular values of the untrained basis (first, 50th, last):", s[0], s[49], s[-1])
