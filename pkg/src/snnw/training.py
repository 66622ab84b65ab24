"""Training the subspace layer with PINN, DGM or deep-Ritz losses and Adam."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .autodiff import Jet2, Tape, backward, total, value_of
from .errors import ConfigurationError, TrainingError
from .network import Network
from .quadrature import QuadratureRule

VARIANTS = ("SNNW-P", "SNNW-G", "SNNW-R")
_ALIASES = {"p": "SNNW-P", "g": "SNNW-G", "r": "SNNW-R"}


def canonical_variant(name: str) -> str:
    key = name.strip()
    if key.lower() in _ALIASES:
        return _ALIASES[key.lower()]
    if key.upper() in VARIANTS:
        return key.upper()
    raise ConfigurationError(f"unknown variant {name!r}; expected one of {VARIANTS} or p/g/r")


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    variant: str = "SNNW-P"
    epsilon: float = 1e-3
    n_max: int = 5000
    drm_epochs: int = 2000
    adam: AdamConfig = AdamConfig()
    # None selects the per-variant default: lift only for the Ritz energy
    lift_during_training: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", canonical_variant(self.variant))
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be > 0")
        if self.n_max < 1 or self.drm_epochs < 1:
            raise ConfigurationError("n_max and drm_epochs must be >= 1")

    @property
    def lift(self) -> bool:
        if self.lift_during_training is None:
            return self.variant == "SNNW-R"
        return bool(self.lift_during_training)

    @property
    def budget(self) -> int:
        return self.drm_epochs if self.variant == "SNNW-R" else self.n_max


@dataclass
class TrainReport:
    epochs_run: int = 0
    initial_loss: float = math.nan
    final_loss: float = math.nan
    loss_history: list = field(default_factory=list)
    stop_reason: str = ""
    wall_seconds: float = 0.0


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------


def _trial(net, problem, x, params, order, lift):
    u, _ = net.forward_jets(x, params, order=order)
    if lift:
        h = problem.lift.jets(x, order)
        u = h * u
    return u


def _scalar(loss, params):
    return float(value_of(loss)) if params is None else loss


def loss_pinn(net: Network, problem, rule: QuadratureRule, params=None, lift=False):
    """Mean squared strong-form residual over the rule's nodes (no boundary term).

    With ``params=None`` the network's own arrays are used and a float is
    returned; pass tape nodes to get a differentiable loss node.
    """
    x = rule.nodes
    u = _trial(net, problem, x, params, 2, lift)
    r = problem.residual(u, x)
    return _scalar(total(r * r) * (1.0 / rule.size), params)


def loss_dgm(net: Network, problem, rule: QuadratureRule, params=None, lift=False):
    """Quadrature estimate of the squared L2 norm of the strong-form residual."""
    x = rule.nodes
    u = _trial(net, problem, x, params, 2, lift)
    r = problem.residual(u, x)
    return _scalar(total(rule.weights * (r * r)), params)


def loss_drm(net: Network, problem, rule: QuadratureRule, params=None, lift=True):
    """Ritz energy ``a(u, u) / 2 - (f, u)``."""
    x = rule.nodes
    u = _trial(net, problem, x, params, 1, lift)
    w = rule.weights
    energy = total(w * problem.form.density(u, u)) * 0.5 - total(w * (problem.f(x) * u.value))
    return _scalar(energy, params)


LOSSES = {"SNNW-P": loss_pinn, "SNNW-G": loss_dgm, "SNNW-R": loss_drm}


def energy_of_jet(problem, rule: QuadratureRule, u: Jet2) -> float:
    """Ritz energy of an arbitrary first-order jet evaluated at the rule's nodes."""
    w = rule.weights
    return float(0.5 * np.sum(w * problem.form.density(u, u)) - np.sum(w * problem.f(rule.nodes) * u.value))


# ---------------------------------------------------------------------------
# optimizer
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def zeros_like(cls, params) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params, grads, state: AdamState, config: AdamConfig = AdamConfig(), epoch=None):
    """One bias-corrected Adam update; returns ``(new_params, new_state)``."""
    if len(params) != len(grads):
        raise ConfigurationError("params and grads differ in length")
    for k, g in enumerate(grads):
        if not np.isfinite(g).all():
            where = f" at epoch {epoch}" if epoch is not None else ""
            raise TrainingError(f"non-finite gradient in parameter {k}{where}", epoch=epoch)
    t = state.t + 1
    b1, b2 = config.beta1, config.beta2
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    step = config.lr / bc1
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ConfigurationError(f"shape mismatch {p.shape} vs {g.shape}")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        denom = np.sqrt(v) / math.sqrt(bc2) + config.eps
        new_p.append(p - step * (m / denom))
        new_m.append(m)
        new_v.append(v)
    return new_p, AdamState(new_m, new_v, t)


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------


def train(net: Network, problem, rule: QuadratureRule, config: TrainConfig = TrainConfig(), log_path=None,
          callback=None):
    """Minimize the variant's loss over all parameters of a copy of ``net``.

    One epoch evaluates the loss on every node, takes one Adam step, and
    then applies the stopping rule: for SNNW-P/G stop once
    ``loss / initial_loss <= epsilon`` or after ``n_max`` epochs; SNNW-R runs
    exactly ``drm_epochs``. ``final_loss`` is the loss evaluated in the last
    epoch, before its update.
    """
    net = net.copy()
    loss_fn = LOSSES[config.variant]
    lift = config.lift
    report = TrainReport()
    state = AdamState.zeros_like(net.parameters())
    thresholded = config.variant != "SNNW-R"
    t0 = time.perf_counter()
    writer = None
    log_file = open(log_path, "w", newline="") if log_path else None
    try:
        if log_file:
            writer = csv.writer(log_file)
            writer.writerow(["epoch", "loss", "relative_loss", "wall_ms"])
        for epoch in range(1, config.budget + 1):
            tape = Tape()
            params = [tape.param(p) for p in net.parameters()]
            loss = loss_fn(net, problem, rule, params, lift)
            value = float(loss.value)
            if not math.isfinite(value):
                report.stop_reason = "non-finite"
                report.wall_seconds = time.perf_counter() - t0
                raise TrainingError(f"non-finite loss {value} at epoch {epoch}", report=report, epoch=epoch)
            if epoch == 1:
                report.initial_loss = value
            report.loss_history.append(value)
            report.final_loss = value
            report.epochs_run = epoch

            grads = backward(tape, loss)
            tape.release()
            try:
                new_params, state = adam_step(net.parameters(), grads, state, config.adam, epoch=epoch)
            except TrainingError as exc:
                exc.report = report
                raise
            net.set_parameters(new_params)

            rel = _relative(value, report.initial_loss)
            if writer:
                writer.writerow([epoch, repr(value), repr(rel), f"{(time.perf_counter() - t0) * 1e3:.3f}"])
            if callback is not None:
                callback(epoch, value, rel)
            if thresholded and rel <= config.epsilon:
                report.stop_reason = "threshold"
                break
        else:
            report.stop_reason = "cap" if thresholded else "fixed-budget"
    finally:
        if log_file:
            log_file.close()
    report.wall_seconds = time.perf_counter() - t0
    return net, report


def _relative(loss, initial):
    if initial == 0.0:
        return 0.0 if loss == 0.0 else math.inf
    return loss / initial


def with_variant(config: TrainConfig, variant: str) -> TrainConfig:
    return replace(config, variant=variant)
