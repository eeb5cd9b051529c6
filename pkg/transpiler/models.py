"""
Transpiler models for qbench.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from circuits.exceptions import CircuitError
from circuits.models import Circuit, Gate


@dataclass(frozen=True)
class Layout:
    """
    Where each logical qubit ended up: ``physical[l]`` holds logical qubit l.
    """

    physical: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'physical', tuple(int(p) for p in self.physical))
        if sorted(self.physical) != list(range(len(self.physical))):
            raise CircuitError(f"Layout {self.physical} is not a permutation")

    @classmethod
    def identity(cls, num_qubits: int) -> Layout:
        return cls(tuple(range(num_qubits)))

    @property
    def num_qubits(self) -> int:
        return len(self.physical)

    @property
    def is_identity(self) -> bool:
        return all(p == l for l, p in enumerate(self.physical))

    def logical_at(self, physical: int) -> int:
        return self.physical.index(physical)

    def swapped(self, a: int, b: int) -> Layout:
        """Layout after exchanging the contents of physical qubits a and b."""
        moved = [b if p == a else a if p == b else p for p in self.physical]
        return Layout(tuple(moved))

    def basis_permutation(self) -> np.ndarray:
        """
        Index map of P(layout): basis state x goes to ``result[x]``, the
        state with bit ``physical[l]`` set to bit l of x.
        """
        indices = np.arange(1 << self.num_qubits, dtype=np.int64)
        images = np.zeros_like(indices)
        for logical, physical in enumerate(self.physical):
            images |= ((indices >> logical) & 1) << physical
        return images

    def to_list(self) -> List[int]:
        return list(self.physical)


@dataclass(frozen=True, eq=False)
class RewriteRule:
    """
    A named two-qubit identity.

    ``target`` is the 4x4 unitary the rule stands for with operand i as
    qubit 0 and operand j as qubit 1; ``expand(i, j)`` returns the gates
    that implement it.
    """

    name: str
    target: np.ndarray
    expand: Callable[[int, int], List[Gate]]
    description: str = ''

    def __call__(self, i: int, j: int) -> List[Gate]:
        return self.expand(i, j)


@dataclass(frozen=True)
class RoutingResult:
    """Routed circuit, final layout and gate accounting."""

    circuit: Circuit
    layout: Layout
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self) -> Any:
        return iter((self.circuit, self.layout))
