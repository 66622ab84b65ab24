"""Subspace neural networks solved in weak form.

Train a network's hidden layers with a strong-form or energy loss, freeze
them as a basis, multiply by a boundary lift, and recover the output
coefficients from the Galerkin system over that basis.
"""

from .errors import (
    AssemblyError,
    ConfigurationError,
    DegenerateBasisError,
    NumericalError,
    SNNWError,
    StageError,
    TrainingError,
    UsageError,
)
from .galerkin import BilinearForm, BoxLift, GalerkinSystem, LiftedBasis, assemble, evaluate_uh, solve
from .network import Network, NetworkConfig, SubspaceBasis, freeze_basis, init
from .quadrature import Axis, QuadratureRule, box_rule, gauss_composite, gauss_legendre, integrate
from .training import AdamConfig, TrainConfig, TrainReport, loss_dgm, loss_drm, loss_pinn, train

__version__ = "0.1.0"

__all__ = [
    "AdamConfig", "AssemblyError", "Axis", "BilinearForm", "BoxLift", "ConfigurationError",
    "DegenerateBasisError", "GalerkinSystem", "LiftedBasis", "Network", "NetworkConfig", "NumericalError",
    "QuadratureRule", "SNNWError", "StageError", "SubspaceBasis", "TrainConfig", "TrainReport",
    "TrainingError", "UsageError", "assemble", "box_rule", "evaluate_uh", "freeze_basis", "gauss_composite",
    "gauss_legendre", "init", "integrate", "loss_dgm", "loss_drm", "loss_pinn", "solve", "train",
]
