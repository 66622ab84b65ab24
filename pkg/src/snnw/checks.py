"""Built-in oracle suite run by ``snnw check``.

Each check compares a production code path against an independent
reference (exact polynomial integrals, finite differences in extended
precision, analytic Galerkin matrices, the pseudoinverse).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import galerkin
from .autodiff import Jet2, Tape, backward, jet_seed
from .bench.problems import problem_helmholtz
from .network import NetworkConfig, init
from .quadrature import gauss_composite, integrate
from .training import loss_pinn


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _poly_integral(coeffs, a, b):
    """Exact integral of sum c_k x^k over [a, b] using rational arithmetic."""
    a, b = Fraction(a), Fraction(b)
    return float(sum(Fraction(c) * (b ** (k + 1) - a ** (k + 1)) / (k + 1) for k, c in enumerate(coeffs)))


def check_quadrature_exactness(tol=1e-12) -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3, 4, 5, 8, 10, 16, 32):
        for n_sub in (1, 3):
            rule = gauss_composite([(-0.5, 2.0, n_sub, n)])
            for deg in range(2 * n):
                coeffs = [Fraction(k % 5 + 1, 7) for k in range(deg + 1)]
                exact = _poly_integral(coeffs, -0.5, 2.0)
                cf = np.array([float(c) for c in coeffs])
                approx = integrate(rule, lambda x: np.polynomial.polynomial.polyval(x[:, 0], cf))
                worst = max(worst, abs(approx - exact) / abs(exact))
    return CheckResult("quadrature exactness (degree <= 2n-1)", worst <= tol, f"max rel err {worst:.2e}")


def _fd_network(net, x):
    """Plain long-double forward pass, independent of the jet machinery."""
    h = np.asarray(x, dtype=np.longdouble)
    last = len(net.weights) - 1
    for k, (W, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ W.astype(np.longdouble) + b.astype(np.longdouble)
        if k < last or net.config.subspace_activation:
            h = np.tanh(h)
    return h @ net.omega.astype(np.longdouble)


def _rel(a, b):
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))) / scale)


def check_input_jets(tol=1e-6, step=1e-5) -> CheckResult:
    net = init(NetworkConfig(input_dim=2, depth=1, width=10, subspace_dim=10, seed=3))
    rng = np.random.default_rng(0)
    x = rng.uniform(-2, 2, size=(16, 2))
    u, _ = net.forward_jets(x)
    worst_g = worst_h = 0.0
    f0 = _fd_network(net, x)
    for i in range(2):
        e = np.zeros(2, dtype=np.longdouble)
        e[i] = step
        fp, fm = _fd_network(net, x + e), _fd_network(net, x - e)
        worst_g = max(worst_g, _rel(u.grad[i], (fp - fm) / (2 * step)))
        worst_h = max(worst_h, _rel(u.diag2[i], (fp - 2 * f0 + fm) / step**2))
    ok = worst_g <= tol and worst_h <= tol
    return CheckResult("input jets vs finite differences (1x10)", ok, f"grad {worst_g:.2e}, diag2 {worst_h:.2e}")


def check_parameter_gradients(tol=1e-6, step=1e-4) -> CheckResult:
    problem = problem_helmholtz()
    net = init(NetworkConfig(input_dim=1, depth=1, width=10, subspace_dim=10, seed=2))
    rule = gauss_composite([(0.0, 2.0, 5, 4)])
    tape = Tape()
    params = [tape.param(p) for p in net.parameters()]
    grads = backward(tape, loss_pinn(net, problem, rule, params))
    base = [p.copy() for p in net.parameters()]
    worst = 0.0
    for k, p in enumerate(base):
        fd = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            vals = []
            for off in (2.0, 1.0, -1.0, -2.0):
                trial = [q.copy() for q in base]
                trial[k][idx] += off * step
                probe = net.copy()
                probe.set_parameters(trial)
                vals.append(loss_pinn(probe, problem, rule))
            # fourth-order central stencil
            fd[idx] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * step)
        worst = max(worst, _rel(grads[k], fd))
    return CheckResult("parameter gradients vs finite differences (1x10)", worst <= tol, f"max rel err {worst:.2e}")


def sine_basis(K=5):
    def fn(x):
        s = jet_seed(x, 0)
        cols = [(s * (k * np.pi)).sin() for k in range(1, K + 1)]
        return Jet2(np.stack([c.value for c in cols], -1), np.stack([c.grad for c in cols], -1),
                    np.stack([c.diag2 for c in cols], -1))

    return galerkin.FunctionBasis(fn, K)


def check_sine_galerkin(tol=1e-10) -> CheckResult:
    K = 5
    basis = sine_basis(K)
    rule = gauss_composite([(0.0, 1.0, 20, 10)])
    form = galerkin.BilinearForm.poisson(1)
    c = np.array([1.0, -0.5, 0.25, 2.0, -1.5])
    k = np.arange(1, K + 1)

    def f(x):
        return (np.sin(np.outer(x[:, 0], k * np.pi)) * (k * np.pi) ** 2) @ c

    system = galerkin.assemble(basis, form, f, rule)
    err_a = np.max(np.abs(system.A - np.diag(k**2 * np.pi**2 / 2)))
    omega = galerkin.solve(system)
    err_w = np.max(np.abs(omega - c))
    ok = err_a <= tol and err_w <= tol
    return CheckResult("sine-basis Galerkin oracle", ok, f"|A - diag| {err_a:.2e}, |omega - c| {err_w:.2e}")


def check_min_norm_solve(tol=1e-10) -> CheckResult:
    A = np.array([[2.0, 2.0, 1.0], [2.0, 2.0, 1.0], [1.0, 1.0, 3.0]])
    b = A @ np.array([0.3, 0.7, -0.2])
    system = galerkin.GalerkinSystem(A, b)
    omega = galerkin.solve(system, tol=1e-12)
    ref = np.linalg.pinv(A) @ b
    err = np.max(np.abs(omega - ref))
    ok = err <= tol and abs(omega[0] - omega[1]) <= tol and system.rank == 2
    return CheckResult("minimal-norm solve vs pseudoinverse", ok, f"max err {err:.2e}, rank {system.rank}")


CHECKS = (
    check_quadrature_exactness,
    check_input_jets,
    check_parameter_gradients,
    check_sine_galerkin,
    check_min_norm_solve,
)


def run_checks() -> list[CheckResult]:
    results = []
    for check in CHECKS:
        t0 = time.perf_counter()
        try:
            res = check()
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(check.__name__, False, f"raised {type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
