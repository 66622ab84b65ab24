"""Fully connected Tanh network with a subspace layer and a linear output.

Layout: ``input (d) -> depth x [width, tanh] -> subspace layer (M, tanh) ->
u = sum_j omega_j * phi_j``. The subspace layer's outputs are the basis
functions; the output layer has no bias and no activation.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .autodiff import Jet2, Node, dense_tanh, stack_jet, unstack_jet, value_of
from .errors import ConfigurationError

CHECKPOINT_SCHEMA = "snnw-network/1"


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    depth: int = 4
    width: int = 100
    subspace_dim: int = 300
    seed: int = 1
    activation: str = "tanh"
    subspace_activation: bool = True

    def __post_init__(self):
        if self.input_dim < 1:
            raise ConfigurationError("input_dim must be >= 1")
        if self.depth < 0:
            raise ConfigurationError("depth must be >= 0")
        if self.width < 1:
            raise ConfigurationError("width must be >= 1")
        if self.subspace_dim < 1:
            raise ConfigurationError("subspace_dim must be >= 1")
        if self.activation != "tanh":
            raise ConfigurationError(f"unsupported activation {self.activation!r}")

    @property
    def layer_sizes(self) -> list[int]:
        return [self.input_dim] + [self.width] * self.depth + [self.subspace_dim]


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def _input_jet(x) -> Jet2:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    d = x.shape[1]
    grad = np.zeros((d,) + x.shape)
    for i in range(d):
        grad[i, :, i] = 1.0
    return Jet2(x, grad, np.zeros_like(grad))


def _features(weights, biases, x, order, subspace_activation, fused=True):
    h = _input_jet(x)
    if order == 1:
        h = Jet2(h.value, h.grad, None)
    d = h.dim
    last = len(weights) - 1
    if fused:
        s = stack_jet(h)
        for k, (W, b) in enumerate(zip(weights, biases)):
            s = dense_tanh(s, W, b, d, activate=k < last or subspace_activation)
        return unstack_jet(s, d), s
    for k, (W, b) in enumerate(zip(weights, biases)):
        h = h.linear(W, b)
        if k < last or subspace_activation:
            h = h.tanh()
    return h, None


@dataclass
class Network:
    config: NetworkConfig
    weights: list[np.ndarray] = field(repr=False)
    biases: list[np.ndarray] = field(repr=False)
    omega: np.ndarray = field(repr=False)

    @property
    def theta(self) -> list[np.ndarray]:
        """Hidden and subspace-layer parameters, interleaved ``W0, b0, W1, b1, ...``."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out += [W, b]
        return out

    def parameters(self) -> list[np.ndarray]:
        """All trainable arrays: ``theta`` followed by ``omega``."""
        return self.theta + [self.omega]

    def set_parameters(self, params) -> None:
        params = [np.array(value_of(p), dtype=float) for p in params]
        n = len(self.weights)
        self.weights = params[0 : 2 * n : 2]
        self.biases = params[1 : 2 * n : 2]
        self.omega = params[2 * n]

    def copy(self) -> "Network":
        return Network(
            self.config,
            [W.copy() for W in self.weights],
            [b.copy() for b in self.biases],
            self.omega.copy(),
        )

    @property
    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def forward_jets(self, x, params=None, order: int = 2, fused: bool = True):
        """Jets of ``u`` and of the subspace outputs at points ``x``.

        ``params`` overrides the stored arrays (pass tape nodes to record a
        differentiable evaluation). Returns ``(u, phis)`` where ``u.value``
        has shape ``(N,)`` and ``phis.value`` has shape ``(N, M)``.
        ``fused=False`` runs the layer-by-layer :class:`Jet2` rules instead of
        the fused dense kernel; both give the same numbers up to rounding.
        """
        if params is None:
            params = self.parameters()
        n = len(self.weights)
        weights = params[0 : 2 * n : 2]
        biases = params[1 : 2 * n : 2]
        omega = params[2 * n]
        phis, stacked = _features(weights, biases, x, order, self.config.subspace_activation, fused)
        if stacked is None:
            return phis.linear(omega), phis
        return unstack_jet(stacked @ omega, phis.dim), phis

    def __call__(self, x) -> np.ndarray:
        u, _ = self.forward_jets(x, order=1)
        return u.value


def init(config: NetworkConfig) -> Network:
    """Xavier-uniform weights, zero biases, Xavier ``omega``; fully determined by the seed."""
    rng = np.random.default_rng(config.seed)
    sizes = config.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(xavier_uniform(rng, fan_in, fan_out))
        biases.append(np.zeros(fan_out))
    omega = xavier_uniform(rng, config.subspace_dim, 1)[:, 0]
    return Network(config, weights, biases, omega)


def forward_jets(net: Network, x, order: int = 2):
    return net.forward_jets(x, order=order)


class SubspaceBasis:
    """Read-only evaluator of the trained subspace functions and their jets."""

    def __init__(self, weights, biases, subspace_activation=True):
        self._weights = [_frozen(W) for W in weights]
        self._biases = [_frozen(b) for b in biases]
        self._act = subspace_activation

    @property
    def dim(self) -> int:
        return self._weights[-1].shape[1]

    @property
    def input_dim(self) -> int:
        return self._weights[0].shape[0]

    def jets(self, x, order: int = 2) -> Jet2:
        return _features(self._weights, self._biases, x, order, self._act)[0]

    def __call__(self, x) -> np.ndarray:
        return self.jets(x, order=1).value


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def freeze_basis(net: Network) -> SubspaceBasis:
    if any(isinstance(p, Node) for p in net.parameters()):
        raise ConfigurationError("cannot freeze a network holding tape nodes")
    return SubspaceBasis(net.weights, net.biases, net.config.subspace_activation)


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------


def save_network(net: Network, path) -> None:
    """Write config and parameters as JSON. Python float repr round-trips float64 exactly."""
    record = {
        "schema": CHECKPOINT_SCHEMA,
        "config": asdict(net.config),
        "weights": [W.tolist() for W in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "omega": net.omega.tolist(),
    }
    Path(path).write_text(json.dumps(record))


def load_network(path) -> Network:
    record = json.loads(Path(path).read_text())
    if record.get("schema") != CHECKPOINT_SCHEMA:
        raise ConfigurationError(f"unsupported checkpoint schema {record.get('schema')!r}")
    config = NetworkConfig(**record["config"])
    weights = [np.array(W, dtype=float).reshape(a, b) for W, a, b in
               zip(record["weights"], config.layer_sizes[:-1], config.layer_sizes[1:])]
    biases = [np.array(b, dtype=float) for b in record["biases"]]
    return Network(config, weights, biases, np.array(record["omega"], dtype=float))
