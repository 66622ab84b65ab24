"""Manufactured benchmark problems with homogeneous Dirichlet data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..autodiff import Jet2, jet_seed
from ..errors import ConfigurationError
from ..galerkin import BilinearForm, BoxLift

PI = np.pi


def sin_pi(x, i: int, k: float) -> Jet2:
    """Jet of ``sin(k pi x_i)``; the argument is reduced mod 2 before the multiply by pi.

    The reduction is exact for integer ``k x_i``, so the boundary zeros come
    out exactly zero instead of at the rounding level of ``k pi``.
    """
    t = jet_seed(x, i) * k
    t = Jet2(np.fmod(t.value, 2.0), t.grad, t.diag2)
    return (t * PI).sin()


def _zero(x):
    return np.zeros(np.atleast_2d(x).shape[0])


@dataclass(frozen=True)
class ProblemSpec:
    """Strong operator ``form.strong(u) = f`` on a box, ``u = g`` on the boundary.

    ``exact_jet(x)`` returns the exact solution as a second-order jet so that
    manufactured consistency can be checked without finite differences.
    """

    name: str
    domain: tuple
    form: BilinearForm
    source: Callable
    exact_jet: Callable
    boundary: Callable = _zero
    default_nodes: tuple = (16, 4)
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.domain)

    @property
    def lift(self) -> BoxLift:
        return BoxLift(self.domain)

    @property
    def volume(self) -> float:
        return float(np.prod([b - a for a, b in self.domain]))

    def exact(self, x) -> np.ndarray:
        return self.exact_jet(np.atleast_2d(x)).value

    def f(self, x) -> np.ndarray:
        return np.asarray(self.source(np.atleast_2d(np.asarray(x, dtype=float))), dtype=float)

    def residual(self, u: Jet2, x):
        """``A u - f`` at the points ``x`` (works on tape-recorded jets)."""
        return self.form.strong(u) - self.f(x)


def problem_helmholtz(lam: float = 1.0, a: float = 0.0, b: float = 2.0) -> ProblemSpec:
    """``-u'' + lam u = f`` on (a, b) with exact ``sin(3 pi x) + cos(4 pi x + pi/2)``."""

    def exact_jet(x):
        # cos(4 pi x + pi/2) = -sin(4 pi x)
        return sin_pi(x, 0, 3.0) - sin_pi(x, 0, 4.0)

    def source(x):
        x = x[:, 0]
        return (9 * PI**2 + lam) * np.sin(3 * PI * x) + (16 * PI**2 + lam) * np.cos(4 * PI * x + 0.5 * PI)

    return ProblemSpec(
        "helmholtz", ((float(a), float(b)),), BilinearForm.helmholtz(lam), source, exact_jet,
        default_nodes=(100, 10), params={"lambda": lam},
    )


def _sin_sin_jet(x):
    return sin_pi(x, 0, 1.0) * sin_pi(x, 1, 1.0)


def problem_poisson2d() -> ProblemSpec:
    """``-Laplace(u) = f`` on the unit square with exact ``sin(pi x) sin(pi y)``."""

    def source(x):
        return 2 * PI**2 * np.sin(PI * x[:, 0]) * np.sin(PI * x[:, 1])

    return ProblemSpec("poisson2d", ((0.0, 1.0), (0.0, 1.0)), BilinearForm.poisson(2), source, _sin_sin_jet)


def problem_anisotropic(k1: float = 1.0, k2: float = 1.0) -> ProblemSpec:
    """``-div(diag(k1, k2) grad u) = f`` on the unit square, exact ``sin(pi x) sin(pi y)``."""
    if not (k1 > 0 and k2 > 0):
        raise ConfigurationError(f"diffusion coefficients must be positive, got ({k1}, {k2})")

    def source(x):
        return (k1 + k2) * PI**2 * np.sin(PI * x[:, 0]) * np.sin(PI * x[:, 1])

    return ProblemSpec(
        "anisotropic", ((0.0, 1.0), (0.0, 1.0)), BilinearForm.anisotropic(k1, k2), source, _sin_sin_jet,
        params={"k1": float(k1), "k2": float(k2)},
    )


def get_problem(name: str, k_ratio: float = 1.0) -> ProblemSpec:
    """Problem by CLI name; ``k_ratio`` is ``k2 / k1`` with ``k1 = 1``."""
    if name == "helmholtz":
        return problem_helmholtz()
    if name == "poisson2d":
        return problem_poisson2d()
    if name == "anisotropic":
        return problem_anisotropic(1.0, float(k_ratio))
    raise ConfigurationError(f"unknown problem {name!r}")
