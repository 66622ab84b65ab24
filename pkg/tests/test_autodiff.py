import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snnw.autodiff import (
    Jet2, Tape, backward, dense_tanh, tanh, jet_constant, jet_seed, jet_seeds, stack_jet, total, unstack_jet,
)
from snnw.errors import ConfigurationError, InvariantError, UsageError


def test_seed_examples():
    j = jet_seed(np.array([0.3, 0.7]), 1)
    assert j.value == 0.7
    np.testing.assert_array_equal(j.grad, [0.0, 1.0])
    np.testing.assert_array_equal(j.diag2, [0.0, 0.0])
    j = jet_seed(np.array([2.0]), 0)
    assert (j.value, j.grad.tolist(), j.diag2.tolist()) == (2.0, [1.0], [0.0])


def test_seed_identity_and_range():
    x = np.random.default_rng(0).normal(size=(7, 3))
    for i, s in enumerate(jet_seeds(x)):
        np.testing.assert_array_equal(s.value, x[:, i])
        assert s.grad[i].tolist() == [1.0] * 7
        assert not s.diag2.any()
    with pytest.raises(ConfigurationError):
        jet_seed(x, 3)


def test_constant_has_zero_derivatives():
    c = jet_constant(np.ones(4) * 2.5, 2)
    assert not c.grad.any() and not c.diag2.any()


def test_elementary_examples():
    t = jet_seed(np.array([0.0]), 0).tanh()
    assert (t.value, t.grad[0], t.diag2[0]) == (0.0, 1.0, 0.0)
    sq = jet_seed(np.array([3.0]), 0).square()
    assert (sq.value, sq.grad[0], sq.diag2[0]) == (9.0, 6.0, 2.0)


def _fd_scalar(fn, x, h=1e-5):
    """Central differences of a plain float function along each axis."""
    d = x.size
    g, hh = np.empty(d), np.empty(d)
    f0 = fn(x)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        fp, fm = fn(x + e), fn(x - e)
        g[i] = (fp - fm) / (2 * h)
        hh[i] = (fp - 2 * f0 + fm) / h**2
    return g, hh


OPS = {
    "sin": (lambda j: j.sin(), np.sin),
    "cos": (lambda j: j.cos(), np.cos),
    "exp": (lambda j: (j * 0.3).exp(), lambda v: np.exp(0.3 * v)),
    "tanh": (lambda j: j.tanh(), np.tanh),
    "recip": (lambda j: (j.square() + 1.0).reciprocal(), lambda v: 1 / (v * v + 1)),
}


@pytest.mark.parametrize("name", OPS)
@settings(max_examples=25, deadline=None)
@given(x=st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2))
def test_chain_rules_match_fd(name, x):
    jet_fn, np_fn = OPS[name]
    x = np.array(x)
    a, b = jet_seeds(x)
    out = jet_fn(a * b + a * 0.5 - b)

    def plain(p):
        return float(np_fn(p[0] * p[1] + 0.5 * p[0] - p[1]))

    g, hh = _fd_scalar(plain, x)
    np.testing.assert_allclose(out.grad, g, rtol=1e-6, atol=1e-7)
    np.testing.assert_allclose(out.diag2, hh, rtol=1e-4, atol=1e-4)


def test_two_layer_tanh_matches_fd():
    rng = np.random.default_rng(5)
    W1, b1, W2 = rng.normal(size=(2, 6)), rng.normal(size=6), rng.normal(size=(6, 1))
    x = rng.uniform(-1, 1, size=(5, 2))

    def plain(p):
        return (np.tanh(np.tanh(p @ W1 + b1) @ W2))[..., 0]

    seeds = jet_seeds(x)
    # build a (N, 2) input jet from the seeds
    inp = Jet2(np.stack([s.value for s in seeds], -1), np.stack([s.grad for s in seeds], -1),
               np.stack([s.diag2 for s in seeds], -1))
    out = inp.linear(W1, b1).tanh().linear(W2[:, 0]).tanh()
    h = 1e-5
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fp, fm, f0 = plain(x + e), plain(x - e), plain(x)
        np.testing.assert_allclose(out.grad[i], (fp - fm) / (2 * h), rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(out.diag2[i], (fp - 2 * f0 + fm) / h**2, rtol=1e-4, atol=1e-4)


def test_dimension_mismatch():
    with pytest.raises(InvariantError):
        jet_seed(np.zeros(2), 0) + jet_seed(np.zeros(3), 0)


def test_order_one_drops_second_derivatives():
    s = jet_seed(np.array([0.4]), 0)
    first = Jet2(s.value, s.grad, None)
    assert (first * s).diag2 is None
    assert first.sin().order == 1


def test_backward_examples():
    tape = Tape()
    p = tape.param(1.5)
    (g,) = backward(tape, p * p)
    assert g == pytest.approx(3.0)

    tape = Tape()
    c = np.array([1.0, -2.0, 0.5])
    q = tape.param(np.array([0.2, 0.3, 0.4]))
    r = q - c
    (g,) = backward(tape, total(r * r))
    np.testing.assert_allclose(g, 2 * (q.value - c), rtol=1e-15)


def test_backward_rejects_bad_input():
    with pytest.raises(UsageError):
        backward(Tape(), 1.0)
    tape = Tape()
    p = tape.param(np.ones(3))
    with pytest.raises(UsageError):
        backward(tape, p * 2.0)


def test_unused_parameter_gets_zero_gradient():
    tape = Tape()
    a, b = tape.param(2.0), tape.param(np.ones(3))
    ga, gb = backward(tape, a * a)
    assert ga == 4.0 and not gb.any() and gb.shape == (3,)


def test_backward_is_linear_in_the_loss():
    rng = np.random.default_rng(1)
    W0, v0 = rng.normal(size=(3, 4)), rng.normal(size=(5, 3))

    def grads(scale):
        tape = Tape()
        W = tape.param(W0)
        return backward(tape, total(tanh(v0 @ W)) * scale)[0]

    np.testing.assert_allclose(grads(3.0), 3.0 * grads(1.0), rtol=1e-12)


def test_backward_determinism():
    def run():
        tape = Tape()
        W = tape.param(np.linspace(-1, 1, 12).reshape(3, 4))
        return backward(tape, total(tanh(np.ones((2, 3)) @ W) * 2.0))[0]

    np.testing.assert_array_equal(run(), run())


def test_reset_keeps_only_parameter_leaves():
    tape = Tape()
    a = tape.param(1.0)
    _ = a * a + a
    assert len(tape) > 1
    tape.reset()
    assert len(tape) == 1 and tape.nodes[0] is a


def test_stack_roundtrip():
    j = jet_seed(np.random.default_rng(0).normal(size=(4, 2)), 1)
    j = Jet2(j.value[:, None], j.grad[..., None], j.diag2[..., None])
    back = unstack_jet(stack_jet(j), 2)
    np.testing.assert_array_equal(back.grad, j.grad)
    np.testing.assert_array_equal(back.diag2, j.diag2)


@pytest.mark.parametrize("order", [1, 2])
def test_fused_layer_matches_generic_rules(order):
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, size=(6, 2))
    seeds = jet_seeds(x)
    inp = Jet2(np.stack([s.value for s in seeds], -1), np.stack([s.grad for s in seeds], -1),
               np.stack([s.diag2 for s in seeds], -1) if order == 2 else None)
    W0, b0 = rng.normal(size=(2, 5)), rng.normal(size=5)
    ref = inp.linear(W0, b0).tanh()
    out = unstack_jet(dense_tanh(stack_jet(inp), W0, b0, 2), 2)
    np.testing.assert_allclose(out.value, ref.value, atol=1e-15)
    np.testing.assert_allclose(out.grad, ref.grad, atol=1e-14)
    if order == 2:
        np.testing.assert_allclose(out.diag2, ref.diag2, atol=1e-14)

    # parameter gradients through both paths agree
    weights = rng.normal(size=out.value.shape)

    def loss_grads(fused):
        tape = Tape()
        W, b = tape.param(W0), tape.param(b0)
        if fused:
            j = unstack_jet(dense_tanh(stack_jet(inp), W, b, 2), 2)
        else:
            j = inp.linear(W, b).tanh()
        parts = [j.value, j.grad[0]] + ([j.diag2[1]] if order == 2 else [])
        loss = sum(total(p * weights) for p in parts)
        return backward(tape, loss)

    for gf, gg in zip(loss_grads(True), loss_grads(False)):
        np.testing.assert_allclose(gf, gg, rtol=1e-12, atol=1e-13)
