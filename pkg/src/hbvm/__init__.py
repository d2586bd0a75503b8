"""Energy-conserving Hamiltonian Boundary Value Methods with a blended stage
solver, spectral-in-time order selection and Fourier-Galerkin models of the
sine-Gordon, nonlinear Schroedinger and Korteweg-de Vries equations."""

from .basis_quadrature import HbvmTableau, QuadratureRule, build_tableau, gauss_rule
from .blended import BlendedConfig
from .errors import ConfigError, HbvmError, NonConvergence, NumericalBreakdown, OrderSelectionFailure
from .fourier import SpectralBasis, project, reconstruct
from .integrator import Monitor, StepResult, TrajectorySummary, hbvm_step, integrate, select_spectral_order
from .system import FIRST_ORDER, SECOND_ORDER, LinearPart, SemiDiscreteSystem

__all__ = [
    "BlendedConfig", "ConfigError", "FIRST_ORDER", "HbvmError", "HbvmTableau", "LinearPart",
    "Monitor", "NonConvergence", "NumericalBreakdown", "OrderSelectionFailure", "QuadratureRule",
    "SECOND_ORDER", "SemiDiscreteSystem", "SpectralBasis", "StepResult", "TrajectorySummary",
    "build_tableau", "gauss_rule", "hbvm_step", "integrate", "project", "reconstruct",
    "select_spectral_order",
]
__version__ = "0.1.0"
