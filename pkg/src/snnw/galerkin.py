"""Weak-form solve over a frozen basis.

The trial/test space is spanned by ``phi_j = h * phibar_j`` where ``h``
vanishes on the boundary of the box. The coefficients solve
``A omega = b`` with ``A_ij = a(phi_j, phi_i)`` and ``b_i = (f, phi_i)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .autodiff import Jet2, jet_seed, value_of
from .errors import AssemblyError, ConfigurationError, DegenerateBasisError
from .quadrature import QuadratureRule


@dataclass(frozen=True)
class BilinearForm:
    """``a(u, v) = integral of sum_i kappa_i u_i v_i + reaction * u v``.

    The matching strong operator is ``-sum_i kappa_i u_ii + reaction * u``; it
    covers the Poisson, Helmholtz and diagonal anisotropic diffusion problems.
    """

    kind: str
    kappa: tuple
    reaction: float = 0.0

    @classmethod
    def poisson(cls, dim: int = 2) -> "BilinearForm":
        return cls("poisson", (1.0,) * dim)

    @classmethod
    def helmholtz(cls, lam: float = 1.0) -> "BilinearForm":
        return cls("helmholtz", (1.0,), float(lam))

    @classmethod
    def anisotropic(cls, k1: float, k2: float) -> "BilinearForm":
        if not (k1 > 0 and k2 > 0):
            raise ConfigurationError(f"diffusion coefficients must be positive, got ({k1}, {k2})")
        return cls("anisotropic", (float(k1), float(k2)))

    @property
    def dim(self) -> int:
        return len(self.kappa)

    def strong(self, u: Jet2):
        """Strong-form operator applied to a second-order jet (value of the result)."""
        if u.diag2 is None:
            raise ConfigurationError("the strong operator needs second derivatives")
        out = -self.kappa[0] * u.diag2[0]
        for i in range(1, self.dim):
            out = out - self.kappa[i] * u.diag2[i]
        if self.reaction:
            out = out + self.reaction * u.value
        return out

    def density(self, u: Jet2, v: Jet2):
        """Pointwise integrand of ``a(u, v)``."""
        out = self.kappa[0] * (u.grad[0] * v.grad[0])
        for i in range(1, self.dim):
            out = out + self.kappa[i] * (u.grad[i] * v.grad[i])
        if self.reaction:
            out = out + self.reaction * (u.value * v.value)
        return out

    def matrix(self, phi: Jet2, weights) -> np.ndarray:
        """``A_ij = sum_q w_q density(phi_j, phi_i)(x_q)`` for plain-array column jets."""
        w = np.asarray(weights)[:, None]
        A = 0.0
        for i in range(self.dim):
            G = value_of(phi.grad[i])
            A = A + self.kappa[i] * ((G * w).T @ G)
        if self.reaction:
            V = value_of(phi.value)
            A = A + self.reaction * ((V * w).T @ V)
        return np.asarray(A)


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------


class BoxLift:
    """``h(x) = prod_i (x_i - a_i)(b_i - x_i)``: zero on the box boundary, positive inside."""

    def __init__(self, bounds):
        self.bounds = tuple((float(a), float(b)) for a, b in bounds)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def jets(self, x, order: int = 2) -> Jet2:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        h = None
        for i, (a, b) in enumerate(self.bounds):
            s = jet_seed(x, i)
            factor = (s - a) * (b - s)
            h = factor if h is None else h * factor
        if order == 1:
            h = Jet2(h.value, h.grad, None)
        return h

    def __call__(self, x) -> np.ndarray:
        return self.jets(x, order=1).value


def _columns(jet: Jet2) -> Jet2:
    """Broadcast an ``(N,)`` jet against ``(N, M)`` column jets."""
    d2 = None if jet.diag2 is None else jet.diag2[..., None]
    return Jet2(jet.value[:, None], jet.grad[..., None], d2)


class FunctionBasis:
    """Basis given by a callable ``x -> Jet2`` with ``(N, M)`` value."""

    def __init__(self, jet_fn, dim: int):
        self._fn = jet_fn
        self.dim = dim

    def jets(self, x, order: int = 2) -> Jet2:
        j = self._fn(np.atleast_2d(np.asarray(x, dtype=float)))
        if j.value.ndim == 1:
            j = _columns(j)
        if order == 1:
            j = Jet2(j.value, j.grad, None)
        return j

    def __call__(self, x) -> np.ndarray:
        return self.jets(x, order=1).value


class ConcatBasis:
    """Columns of several bases side by side."""

    def __init__(self, *bases):
        self.bases = bases

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.bases)

    def jets(self, x, order: int = 2) -> Jet2:
        parts = [b.jets(x, order) for b in self.bases]
        d2 = None if order == 1 else np.concatenate([p.diag2 for p in parts], axis=-1)
        return Jet2(
            np.concatenate([p.value for p in parts], axis=-1),
            np.concatenate([p.grad for p in parts], axis=-1),
            d2,
        )

    def __call__(self, x) -> np.ndarray:
        return self.jets(x, order=1).value


class LiftedBasis:
    """``phi_j = h * phibar_j`` for a frozen basis ``phibar`` and a lift ``h``."""

    def __init__(self, basis, lift, domain=None):
        self.basis = basis
        self.lift = lift
        self.domain = tuple(domain) if domain is not None else getattr(lift, "bounds", None)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def jets(self, x, order: int = 2) -> Jet2:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return _columns(self.lift.jets(x, order)) * self.basis.jets(x, order)

    def __call__(self, x) -> np.ndarray:
        return self.jets(x, order=1).value


# ---------------------------------------------------------------------------
# linear system
# ---------------------------------------------------------------------------


@dataclass
class GalerkinSystem:
    A: np.ndarray
    b: np.ndarray
    asymmetry: float = 0.0
    omega: np.ndarray | None = None
    rank: int | None = None
    residual_norm: float | None = None
    singular_values: np.ndarray | None = field(default=None, repr=False)
    tol: float | None = None

    @property
    def size(self) -> int:
        return self.b.shape[0]


def assemble(basis, form: BilinearForm, f, rule: QuadratureRule) -> GalerkinSystem:
    """Assemble ``A`` and ``b`` by quadrature; ``A`` is symmetrized afterwards.

    ``asymmetry`` records ``||A - A^T|| / ||A||`` of the raw assembly.
    """
    x, w = rule.nodes, rule.weights
    phi = basis.jets(x, order=1)
    fx = np.asarray(f(x), dtype=float).reshape(-1)
    V = value_of(phi.value)
    A = form.matrix(phi, w)
    b = V.T @ (w * fx)
    _check_finite(A, b, phi, fx, x)
    norm = np.linalg.norm(A)
    asym = float(np.linalg.norm(A - A.T) / norm) if norm > 0 else 0.0
    return GalerkinSystem(0.5 * (A + A.T), b, asym)


def _check_finite(A, b, phi, fx, x):
    if np.isfinite(A).all() and np.isfinite(b).all():
        return
    bad_node = -1
    cols = np.concatenate([phi.value[None], phi.grad])
    node_ok = np.isfinite(cols).all(axis=(0, 2)) & np.isfinite(fx)
    if not node_ok.all():
        bad_node = int(np.argmin(node_ok))
    if not np.isfinite(A).all():
        i, j = (int(k) for k in np.argwhere(~np.isfinite(A))[0])
        where = f"A[{i}, {j}]"
    else:
        i = int(np.argwhere(~np.isfinite(b))[0, 0])
        where = f"b[{i}]"
    node = x[bad_node].tolist() if bad_node >= 0 else None
    raise AssemblyError(f"non-finite entry {where} (first bad node index {bad_node}, x = {node})")


DEFAULT_RANK_TOL = 1e-15


def solve(system: GalerkinSystem, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Minimal-norm least-squares solution via SVD.

    Singular values below ``tol * sigma_max`` are treated as zero. The
    singular values of ``A`` are squares of those of the basis, so the
    default sits near machine precision rather than at its square root. The
    system is updated in place with ``omega``, ``rank``, ``residual_norm``
    and ``singular_values``.
    """
    A, b = system.A, system.b
    U, s, Vt = np.linalg.svd(A)
    if s.size == 0 or s[0] == 0.0:
        raise DegenerateBasisError("Galerkin matrix is identically zero")
    rank = int(np.count_nonzero(s > tol * s[0]))
    coef = (U[:, :rank].T @ b) / s[:rank]
    omega = Vt[:rank].T @ coef
    system.omega = omega
    system.rank = rank
    system.singular_values = s
    system.residual_norm = float(np.linalg.norm(A @ omega - b))
    system.tol = tol
    return omega


def evaluate_uh(basis, omega, x, jets: bool = False):
    """``u_h(x) = sum_j omega_j phi_j(x)``; a :class:`Jet2` when ``jets`` is true."""
    omega = np.asarray(omega, dtype=float)
    if jets:
        return basis.jets(x, order=2).linear(omega)
    return basis(x) @ omega


def dump_system(system: GalerkinSystem, path) -> None:
    """Write ``A``, ``b``, ``omega`` and the singular values to a JSON file."""
    def arr(a):
        return None if a is None else np.asarray(a).tolist()

    record = {
        "schema": "snnw-system/1",
        "size": system.size,
        "rank": system.rank,
        "tol": system.tol,
        "residual_norm": system.residual_norm,
        "asymmetry": system.asymmetry,
        "A": arr(system.A),
        "b": arr(system.b),
        "omega": arr(system.omega),
        "singular_values": arr(system.singular_values),
    }
    Path(path).write_text(json.dumps(record))
