"""Exception types raised by the solvers and drivers."""

from __future__ import annotations


class HbvmError(Exception):
    """Base class for all package errors."""


class NonConvergence(HbvmError):
    """The nonlinear stage solver exceeded its iteration budget."""

    def __init__(self, iterations: int, final_residual_norm: float, step_index: int | None = None):
        self.iterations = iterations
        self.final_residual_norm = final_residual_norm
        self.step_index = step_index
        where = "" if step_index is None else f" at step {step_index}"
        super().__init__(
            f"stage solver did not converge{where}: {iterations} iterations, "
            f"last update norm {final_residual_norm:.3e}"
        )

    def at_step(self, step_index: int) -> "NonConvergence":
        return NonConvergence(self.iterations, self.final_residual_norm, step_index)


class NumericalBreakdown(HbvmError):
    """Non-finite values appeared in a right-hand side or an iterate."""


class OrderSelectionFailure(HbvmError):
    """No spectral order up to ``s_max`` met the truncation criterion."""


class ConfigError(HbvmError, ValueError):
    """Invalid experiment configuration."""
