"""Composite Gauss-Legendre rules on intervals and tensor-product boxes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, NumericalError

MAX_POINTS = 32


def _legendre(n, x):
    """``(P_n(x), P_n'(x))`` by the three-term recurrence."""
    p_prev, p = np.ones_like(x), x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p, n * (x * p - p_prev) / (x * x - 1.0)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (ascending) and weights of the ``n``-point Gauss-Legendre rule on [-1, 1].

    The roots of P_n are found by Newton iteration from the usual cosine
    initial guesses; only the non-negative half is iterated, the rest follows
    by symmetry.
    """
    if not 1 <= n <= MAX_POINTS:
        raise ConfigurationError(f"n_pts must be in [1, {MAX_POINTS}], got {n}")
    m = (n + 1) // 2
    x = np.cos(np.pi * (np.arange(1, m + 1) - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    _, dp = _legendre(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    if n % 2:
        x[-1] = 0.0
    nodes = np.concatenate([-x, x[::-1][n % 2:]])
    weights = np.concatenate([w, w[::-1][n % 2:]])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True)
class Axis:
    a: float
    b: float
    n_sub: int
    n_pts: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigurationError(f"axis bounds must satisfy a < b, got ({self.a}, {self.b})")
        if self.n_sub < 1:
            raise ConfigurationError("n_sub must be >= 1")
        if not 1 <= self.n_pts <= MAX_POINTS:
            raise ConfigurationError(f"n_pts must be in [1, {MAX_POINTS}], got {self.n_pts}")

    @property
    def n_nodes(self) -> int:
        return self.n_sub * self.n_pts


def composite_1d(a, b, n_sub, n_pts):
    """Nodes and weights of the composite rule on [a, b], ordered left to right."""
    t, w = gauss_legendre(n_pts)
    edges = np.linspace(a, b, n_sub + 1)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    nodes = (0.5 * (left + right) + half * t).ravel()
    weights = (half * w).ravel()
    return nodes, weights


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes of shape ``(Q, d)`` and positive weights of shape ``(Q,)``."""

    nodes: np.ndarray
    weights: np.ndarray
    axes: tuple = ()

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def __len__(self):
        return self.size

    @property
    def bounds(self) -> tuple:
        return tuple((ax.a, ax.b) for ax in self.axes)

    @property
    def volume(self) -> float:
        return float(np.prod([ax.b - ax.a for ax in self.axes])) if self.axes else float(self.weights.sum())


def gauss_composite(axes) -> QuadratureRule:
    """Tensor product of composite Gauss-Legendre rules, one per axis.

    ``axes`` is a sequence of ``(a, b, n_sub, n_pts)`` tuples or :class:`Axis`.
    Nodes are ordered with the first axis varying slowest.
    """
    axes = tuple(ax if isinstance(ax, Axis) else Axis(*ax) for ax in axes)
    if not axes:
        raise ConfigurationError("at least one axis is required")
    per_axis = [composite_1d(ax.a, ax.b, ax.n_sub, ax.n_pts) for ax in axes]
    grids = np.meshgrid(*[x for x, _ in per_axis], indexing="ij")
    wgrids = np.meshgrid(*[w for _, w in per_axis], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=0), axis=0)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes, weights, axes)


def box_rule(bounds, n_sub, n_pts) -> QuadratureRule:
    """Same ``n_sub`` x ``n_pts`` composite rule along every axis of ``bounds``."""
    return gauss_composite([(a, b, n_sub, n_pts) for a, b in bounds])


def integrate(rule: QuadratureRule, g) -> float:
    """``sum_i w_i g(x_i)``; ``g`` is called once on the ``(Q, d)`` node array."""
    values = np.asarray(g(rule.nodes), dtype=float).reshape(-1)
    if values.shape[0] != rule.size:
        raise ConfigurationError(f"integrand returned {values.shape[0]} values for {rule.size} nodes")
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argmax(bad))
        raise NumericalError(f"non-finite integrand value {values[k]} at node {rule.nodes[k].tolist()}")
    return float(rule.weights @ values)
