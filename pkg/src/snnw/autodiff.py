"""Forward jets in the spatial inputs, nested inside a reverse-mode tape.

Two layers cooperate here:

* :class:`Tape` / :class:`Node` record array-valued operations and run
  reverse accumulation to obtain gradients with respect to registered
  parameters.
* :class:`Jet2` carries a value together with its first derivatives and the
  diagonal of its Hessian with respect to the ``d`` spatial inputs. Its
  components may be plain ``ndarray`` (no parameter dependence) or
  :class:`Node` (recorded on a tape), so the propagation rules themselves are
  differentiated exactly by the tape.

All arrays are batched: a jet over ``N`` points with ``k`` channels has
``value.shape == (N, k)`` and ``grad.shape == diag2.shape == (d, N, k)``.
The leading axis of ``grad``/``diag2`` is always the spatial axis.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, InvariantError, UsageError

__all__ = [
    "Tape",
    "Node",
    "Jet2",
    "jet_seed",
    "jet_seeds",
    "jet_constant",
    "backward",
    "tanh",
    "sin",
    "cos",
    "exp",
    "square",
    "reciprocal",
    "total",
    "matmul",
    "value_of",
    "stack_jet",
    "unstack_jet",
    "dense_tanh",
]


# ---------------------------------------------------------------------------
# Reverse-mode tape
# ---------------------------------------------------------------------------


class Node:
    """A recorded array value. ``parents`` holds ``(node, vjp)`` pairs."""

    __slots__ = ("value", "tape", "index", "parents")
    # make ``ndarray <op> Node`` dispatch to Node's reflected operators
    __array_ufunc__ = None

    def __init__(self, value, tape, parents):
        self.value = value
        self.tape = tape
        self.parents = parents
        self.index = len(tape.nodes)
        tape.nodes.append(self)

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    def __repr__(self):
        return f"Node(index={self.index}, shape={self.value.shape})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, Node):
            return mul(self, reciprocal(other))
        return mul(self, 1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return mul(other, reciprocal(self))

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __pow__(self, power):
        if power != 2:
            raise NotImplementedError("only squaring is supported")
        return square(self)

    def __getitem__(self, key):
        return getitem(self, key)


class Tape:
    """Append-only record of operations.

    Parameters are leaf nodes created with :meth:`param`; their positions in
    :attr:`params` define the order of the gradient list returned by
    :func:`backward`.
    """

    def __init__(self):
        self.nodes: list[Node] = []
        self.params: list[Node] = []

    def __len__(self):
        return len(self.nodes)

    def param(self, value) -> Node:
        node = Node(np.array(value, dtype=float), self, ())
        self.params.append(node)
        return node

    def release(self) -> None:
        """Drop all nodes and parameters.

        Nodes and their tape reference each other; releasing breaks the cycle
        so large intermediate arrays are freed without waiting for the GC.
        """
        for node in self.nodes:
            node.parents = ()
        self.nodes = []
        self.params = []

    def reset(self) -> None:
        """Drop every recorded operation, keeping only the parameter leaves."""
        for node in self.nodes:
            node.parents = ()
        self.nodes = []
        for node in self.params:
            node.index = len(self.nodes)
            self.nodes.append(node)


def value_of(x):
    """Underlying ndarray of a Node, or ``x`` itself as an array."""
    if isinstance(x, Node):
        return x.value
    return np.asarray(x, dtype=float)


def _tape_of(*xs):
    tape = None
    for x in xs:
        if isinstance(x, Node):
            if tape is None:
                tape = x.tape
            elif x.tape is not tape:
                raise InvariantError("operands recorded on different tapes")
    return tape


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def add(a, b):
    tape = _tape_of(a, b)
    av, bv = value_of(a), value_of(b)
    out = av + bv
    if tape is None:
        return out
    parents = []
    if isinstance(a, Node):
        parents.append((a, lambda g, s=av.shape: _unbroadcast(g, s)))
    if isinstance(b, Node):
        parents.append((b, lambda g, s=bv.shape: _unbroadcast(g, s)))
    return Node(out, tape, tuple(parents))


def sub(a, b):
    tape = _tape_of(a, b)
    av, bv = value_of(a), value_of(b)
    out = av - bv
    if tape is None:
        return out
    parents = []
    if isinstance(a, Node):
        parents.append((a, lambda g, s=av.shape: _unbroadcast(g, s)))
    if isinstance(b, Node):
        parents.append((b, lambda g, s=bv.shape: -_unbroadcast(g, s)))
    return Node(out, tape, tuple(parents))


def neg(a):
    if not isinstance(a, Node):
        return -value_of(a)
    return Node(-a.value, a.tape, ((a, lambda g: -g),))


def mul(a, b):
    tape = _tape_of(a, b)
    av, bv = value_of(a), value_of(b)
    out = av * bv
    if tape is None:
        return out
    parents = []
    if isinstance(a, Node):
        parents.append((a, lambda g: _unbroadcast(g * bv, av.shape)))
    if isinstance(b, Node):
        parents.append((b, lambda g: _unbroadcast(g * av, bv.shape)))
    return Node(out, tape, tuple(parents))


def matmul(a, b):
    """``a @ b`` with ``b`` a 1-D or 2-D operand contracted on ``a``'s last axis."""
    tape = _tape_of(a, b)
    av, bv = value_of(a), value_of(b)
    if bv.ndim not in (1, 2):
        raise InvariantError("matmul right operand must be 1-D or 2-D")
    out = av @ bv
    if tape is None:
        return out
    k = av.shape[-1]
    parents = []
    if isinstance(a, Node):
        if bv.ndim == 1:
            parents.append((a, lambda g: g[..., None] * bv))
        else:
            parents.append((a, lambda g: g @ bv.T))
    if isinstance(b, Node):
        if bv.ndim == 1:
            parents.append((b, lambda g: av.reshape(-1, k).T @ g.reshape(-1)))
        else:
            m = bv.shape[1]
            parents.append((b, lambda g: av.reshape(-1, k).T @ g.reshape(-1, m)))
    return Node(out, tape, tuple(parents))


def getitem(a, key):
    if not isinstance(a, Node):
        return value_of(a)[key]
    shape = a.value.shape

    def vjp(g):
        full = np.zeros(shape)
        if _needs_add_at(key):
            np.add.at(full, key, g)
        else:
            full[key] = g
        return full

    return Node(a.value[key], a.tape, ((a, vjp),))


def _needs_add_at(key):
    # fancy indices may repeat; basic indexing (ints/slices) never does
    keys = key if isinstance(key, tuple) else (key,)
    return any(isinstance(k, (list, np.ndarray)) for k in keys)


def total(a, axis=None):
    """Sum over ``axis`` (all axes by default)."""
    if not isinstance(a, Node):
        return np.sum(value_of(a), axis=axis)
    shape = a.value.shape
    out = np.sum(a.value, axis=axis)

    def vjp(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g, shape)

    return Node(np.asarray(out), a.tape, ((a, vjp),))


def _unary(a, fn, dfn):
    """Apply ``fn``; ``dfn(x, y)`` gives the local derivative from input and output."""
    if not isinstance(a, Node):
        return fn(value_of(a))
    x = a.value
    y = fn(x)
    return Node(y, a.tape, ((a, lambda g: g * dfn(x, y)),))


def tanh(a):
    return _unary(a, np.tanh, lambda x, y: 1.0 - y * y)


def sin(a):
    return _unary(a, np.sin, lambda x, y: np.cos(x))


def cos(a):
    return _unary(a, np.cos, lambda x, y: -np.sin(x))


def exp(a):
    return _unary(a, np.exp, lambda x, y: y)


def square(a):
    return _unary(a, np.square, lambda x, y: 2.0 * x)


def reciprocal(a):
    return _unary(a, np.reciprocal, lambda x, y: -y * y)


def backward(tape: Tape, loss) -> list[np.ndarray]:
    """Gradient of a scalar ``loss`` with respect to every parameter of ``tape``.

    ``loss`` may be a :class:`Node` or a :class:`Jet2` (its value is used).
    Parameters that the loss does not depend on get a zero gradient.
    """
    if not tape.nodes:
        raise UsageError("backward called on an empty tape")
    if isinstance(loss, Jet2):
        loss = loss.value
    if not isinstance(loss, Node) or loss.tape is not tape:
        raise UsageError("loss is not recorded on this tape")
    if loss.value.size != 1:
        raise UsageError(f"loss must be scalar, got shape {loss.value.shape}")

    adjoints: list = [None] * (loss.index + 1)
    adjoints[loss.index] = np.ones_like(loss.value)
    for node in reversed(tape.nodes[: loss.index + 1]):
        g = adjoints[node.index]
        if g is None or not node.parents:
            continue
        for parent, vjp in node.parents:
            contrib = vjp(g)
            prev = adjoints[parent.index]
            adjoints[parent.index] = contrib if prev is None else prev + contrib
        adjoints[node.index] = None

    grads = []
    for p in tape.params:
        g = adjoints[p.index] if p.index <= loss.index else None
        grads.append(np.zeros_like(p.value) if g is None else np.array(g, dtype=float).reshape(p.value.shape))
    return grads


# ---------------------------------------------------------------------------
# Second-order jets in the spatial inputs
# ---------------------------------------------------------------------------


class Jet2:
    """Value with spatial gradient and Hessian diagonal.

    ``diag2`` may be ``None`` for first-order-only propagation; any operation
    touching such a jet drops second derivatives as well.
    """

    __slots__ = ("value", "grad", "diag2")

    def __init__(self, value, grad, diag2=None):
        self.value = value
        self.grad = grad
        self.diag2 = diag2

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    @property
    def order(self) -> int:
        return 1 if self.diag2 is None else 2

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, diag2={self.diag2!r})"

    def _check(self, other):
        if self.dim != other.dim:
            raise InvariantError(f"jet dimension mismatch: {self.dim} vs {other.dim}")

    def numpy(self) -> "Jet2":
        """Detach from any tape, returning plain-array components."""
        d2 = None if self.diag2 is None else value_of(self.diag2)
        return Jet2(value_of(self.value), value_of(self.grad), d2)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            d2 = None if self.diag2 is None or other.diag2 is None else self.diag2 + other.diag2
            return Jet2(self.value + other.value, self.grad + other.grad, d2)
        return Jet2(self.value + other, self.grad, self.diag2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, None if self.diag2 is None else -self.diag2)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            a, b = self, other
            value = a.value * b.value
            grad = a.value * b.grad + a.grad * b.value
            d2 = None
            if a.diag2 is not None and b.diag2 is not None:
                d2 = a.value * b.diag2 + 2.0 * (a.grad * b.grad) + a.diag2 * b.value
            return Jet2(value, grad, d2)
        return Jet2(self.value * other, self.grad * other, None if self.diag2 is None else self.diag2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # linear maps ------------------------------------------------------------

    def linear(self, weight, bias=None) -> "Jet2":
        """Right-multiply the channel axis by ``weight`` and add ``bias``."""
        value = self.value @ weight
        if bias is not None:
            value = value + bias
        d2 = None if self.diag2 is None else self.diag2 @ weight
        return Jet2(value, self.grad @ weight, d2)

    def __matmul__(self, weight):
        return self.linear(weight)

    # elementwise functions --------------------------------------------------

    def _chain(self, f0, f1, f2) -> "Jet2":
        g = self.grad
        grad = f1 * g
        d2 = None
        if self.diag2 is not None:
            d2 = f1 * self.diag2 + f2 * (g * g)
        return Jet2(f0, grad, d2)

    def tanh(self) -> "Jet2":
        t = tanh(self.value)
        s = 1.0 - t * t
        return self._chain(t, s, -2.0 * (t * s))

    def sin(self) -> "Jet2":
        s, c = sin(self.value), cos(self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = sin(self.value), cos(self.value)
        return self._chain(c, -s, -c)

    def exp(self) -> "Jet2":
        e = exp(self.value)
        return self._chain(e, e, e)

    def square(self) -> "Jet2":
        return self * self

    def reciprocal(self) -> "Jet2":
        r = reciprocal(self.value)
        r2 = r * r
        return self._chain(r, -r2, 2.0 * (r2 * r))

    # reductions over channels ------------------------------------------------

    def __getitem__(self, key) -> "Jet2":
        """Index the value axes; the leading spatial axis of the derivatives is kept."""
        k = key if isinstance(key, tuple) else (key,)
        dk = (slice(None),) + k
        d2 = None if self.diag2 is None else self.diag2[dk]
        return Jet2(self.value[key], self.grad[dk], d2)


def jet_seed(x, i: int) -> Jet2:
    """Jet of the coordinate function ``x -> x_i``.

    ``x`` is a point of shape ``(d,)`` or a batch of shape ``(N, d)``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    d = x.shape[-1]
    if not 0 <= i < d:
        raise ConfigurationError(f"axis {i} out of range for dimension {d}")
    value = x[..., i].copy()
    grad = np.zeros((d,) + value.shape)
    grad[i] = 1.0
    return Jet2(value, grad, np.zeros_like(grad))


def jet_seeds(x) -> list[Jet2]:
    """Seed jets for every coordinate of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    return [jet_seed(x, i) for i in range(x.shape[-1])]


def jet_constant(value, dim: int) -> Jet2:
    value = np.asarray(value, dtype=float)
    zeros = np.zeros((dim,) + value.shape)
    return Jet2(value, zeros, zeros.copy())


# ---------------------------------------------------------------------------
# Stacked jets and the fused dense layer
# ---------------------------------------------------------------------------
#
# A stacked jet packs value, gradient and Hessian diagonal into one array of
# shape (1 + d * order, N, k) so a layer needs a single matrix product.


def stack_jet(jet: Jet2):
    """Pack a jet into one array (or node) of shape ``(1 + d*order, ...)``."""
    parts = [jet.value, jet.grad] + ([] if jet.diag2 is None else [jet.diag2])
    if any(isinstance(p, Node) for p in parts):
        raise InvariantError("stack_jet expects plain-array jets")
    parts[0] = np.asarray(parts[0])[None]
    return np.concatenate(parts)


def unstack_jet(stacked, d: int) -> Jet2:
    """Inverse of :func:`stack_jet`; works on arrays and tape nodes."""
    rows = value_of(stacked).shape[0]
    if rows == 1 + 2 * d:
        return Jet2(stacked[0], stacked[1 : 1 + d], stacked[1 + d :])
    if rows == 1 + d:
        return Jet2(stacked[0], stacked[1 : 1 + d], None)
    raise InvariantError(f"stacked jet with {rows} rows does not match dimension {d}")


def dense_tanh(stacked, weight, bias, d: int, activate: bool = True):
    """``tanh(jet @ weight + bias)`` on a stacked jet in one fused step.

    Equivalent to ``unstack_jet(stacked, d).linear(weight, bias).tanh()``;
    the local derivatives are hand-derived and applied by numba kernels.
    """
    from . import _kernels

    tape = _tape_of(stacked, weight, bias)
    S, W, b = value_of(stacked), value_of(weight), value_of(bias)
    R, N, kin = S.shape
    order = 2 if R == 1 + 2 * d else 1
    kout = W.shape[1]
    Z = (S.reshape(R * N, kin) @ W).reshape(R, N, kout)
    Z[0] += b
    if activate:
        out = np.empty_like(Z)
        T = np.tanh(Z[0].reshape(-1))
        _kernels.tanh_jet_forward(Z.reshape(R, -1), d, order, out.reshape(R, -1), T)
    else:
        out = Z
    if tape is None:
        return out

    cache = {}

    def zbar(g):
        key = id(g)
        if cache.get("key") != key:
            if activate:
                zb = np.empty_like(Z)
                _kernels.tanh_jet_backward(np.ascontiguousarray(g).reshape(R, -1), Z.reshape(R, -1), T, d, order,
                                           zb.reshape(R, -1))
            else:
                zb = np.asarray(g)
            cache["key"], cache["g"], cache["zb"] = key, g, zb
        return cache["zb"]

    parents = []
    if isinstance(stacked, Node):
        parents.append((stacked, lambda g: (zbar(g).reshape(R * N, kout) @ W.T).reshape(R, N, kin)))
    if isinstance(weight, Node):
        parents.append((weight, lambda g: S.reshape(R * N, kin).T @ zbar(g).reshape(R * N, kout)))
    if isinstance(bias, Node):
        parents.append((bias, lambda g: zbar(g)[0].sum(axis=0)))
    return Node(out, tape, tuple(parents))
