"""Semi-discrete Hamiltonian systems as consumed by the integrators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

FIRST_ORDER = "first-order"
SECOND_ORDER = "special-second-order"


@dataclass(frozen=True)
class LinearPart:
    """Constant linear operator stored by its diagonals.

    ``kind == "diagonal"``: the matrix ``diag(d)``.
    ``kind == "skew-block"``: the ``2n x 2n`` matrix ``[[0, diag(d)], [-diag(d), 0]]``.
    """

    kind: str
    d: np.ndarray

    def __post_init__(self):
        if self.kind not in ("diagonal", "skew-block"):
            raise ValueError(f"unknown linear part kind {self.kind!r}")
        d = np.asarray(self.d, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def dim(self) -> int:
        n = self.d.shape[0]
        return n if self.kind == "diagonal" else 2 * n

    def matvec(self, y: np.ndarray) -> np.ndarray:
        if self.kind == "diagonal":
            return self.d * y
        n = self.d.shape[0]
        y1, y2 = y[..., :n], y[..., n:]
        return np.concatenate([self.d * y2, -self.d * y1], axis=-1)

    def dense(self) -> np.ndarray:
        if self.kind == "diagonal":
            return np.diag(self.d)
        n = self.d.shape[0]
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = np.diag(self.d)
        A[n:, :n] = -np.diag(self.d)
        return A

    @classmethod
    def zero(cls, dim: int) -> "LinearPart":
        return cls("diagonal", np.zeros(dim))


@dataclass(frozen=True)
class SemiDiscreteSystem:
    """An autonomous ODE system in one of two forms.

    ``form == FIRST_ORDER``: ``y' = rhs(y)`` with ``y`` of length ``dim`` and
    ``linear_part`` the matrix ``A`` of the split ``rhs(y) = A y + g(y)``.

    ``form == SECOND_ORDER``: ``q'' = rhs(q)`` (the gradient of ``U``) with
    ``q`` of length ``dim``; the state handed around is ``concat(q, p)`` and
    ``linear_part`` describes ``A^2`` in ``rhs(q) = -A^2 q + g(q)``.

    ``rhs`` must accept stacked inputs of shape ``(..., dim)``. The Hamiltonian
    and the extra invariants take the full state vector.
    """

    dim: int
    form: str
    rhs: Callable[[np.ndarray], np.ndarray]
    hamiltonian: Callable[[np.ndarray], float]
    linear_part: LinearPart | None = None
    extra_invariants: Mapping[str, Callable[[np.ndarray], float]] = field(default_factory=dict)
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""

    def __post_init__(self):
        if self.form not in (FIRST_ORDER, SECOND_ORDER):
            raise ValueError(f"unknown form {self.form!r}")
        if self.linear_part is None:
            object.__setattr__(self, "linear_part", LinearPart.zero(self.dim))
        if self.linear_part.dim != self.dim:
            raise ValueError(
                f"linear part has size {self.linear_part.dim}, system has {self.dim}"
            )

    @property
    def state_size(self) -> int:
        return self.dim if self.form == FIRST_ORDER else 2 * self.dim

    def split(self, state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return state[: self.dim], state[self.dim :]

    def invariants(self, state: np.ndarray) -> dict[str, float]:
        vals = {"H": float(self.hamiltonian(state))}
        for name, fn in self.extra_invariants.items():
            vals[name] = float(fn(state))
        return vals
