# %% [markdown]
# # Input jets inside a reverse tape
#
# A `Jet2` carries a value, its spatial gradient and the diagonal of its
# Hessian. Jets of network outputs give PDE residuals without finite
# differences; recording the jet arithmetic on a `Tape` then gives exact
# gradients of any loss built from those residuals.

# %%
import numpy as np

from snnw.autodiff import Jet2, Tape, backward, jet_seeds, total

x = np.array([[0.3, 0.7], [1.0, -0.5]])
a, b = jet_seeds(x)
u = (a * b).sin() + b.square()
print("u      ", u.value)
print("du/dx  ", u.grad[0], " expected", b.value * np.cos(a.value * b.value))
print("d2u/dy2", u.diag2[1], " expected", -a.value**2 * np.sin(a.value * b.value) + 2)

# %% [markdown]
# Parameters enter as tape leaves. Here the "network" is `tanh(x @ W)` and
# the loss penalizes its Laplacian; the gradient with respect to `W` flows
# through the jet rules themselves.

# %%
rng = np.random.default_rng(0)
tape = Tape()
W = tape.param(rng.normal(size=(2, 3)))
# the input as an (N, 2) jet: d x_k / d x_i = delta_ik
grad = np.zeros((2,) + x.shape)
grad[0, :, 0] = grad[1, :, 1] = 1.0
inp = Jet2(x, grad, np.zeros_like(grad))
h = inp.linear(W).tanh()
lap = h.diag2[0] + h.diag2[1]
loss = total(lap * lap)
(gW,) = backward(tape, loss)
print("loss", float(loss.value))
print("dloss/dW\n", gW)

# %% [markdown]
# A quick central-difference check on one entry.

# %%
def plain_loss(Wv):
    t = Tape()
    Wn = t.param(Wv)
    hh = inp.linear(Wn).tanh()
    ll = hh.diag2[0] + hh.diag2[1]
    return float(total(ll * ll).value)


W0 = W.value.copy()
e = np.zeros_like(W0)
e[1, 2] = 1e-6
print("fd", (plain_loss(W0 + e) - plain_loss(W0 - e)) / 2e-6, " tape", gW[1, 2])
