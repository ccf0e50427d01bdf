"""ReturnVector class for vector-valued rewards and returns."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from src.logic.validator import ContractViolationError

KEY_DECIMALS = 9


class ReturnVector:
    """An immutable n-dimensional real-valued reward or return.

    Used for immediate rewards, accrued returns, future returns and
    cumulative returns alike. The length is the owning environment's
    objective count and never changes.

    Attributes:
        values: Tuple of floats, one per objective
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float]) -> None:
        """Initialize a return vector.

        Args:
            values: One real number per objective

        Raises:
            ValueError: If no values are given
        """
        self._values: tuple[float, ...] = tuple(float(v) for v in values)
        if not self._values:
            raise ValueError("ReturnVector needs at least one objective")

    @classmethod
    def zeros(cls, n: int) -> ReturnVector:
        """Additive identity with ``n`` objectives."""
        if n < 1:
            raise ValueError("Objective count must be >= 1")
        return cls([0.0] * n)

    @classmethod
    def from_array(cls, array: NDArray[np.float64] | Sequence[float]) -> ReturnVector:
        """Build from a numpy array or sequence of numbers."""
        return cls(float(v) for v in np.asarray(array, dtype=np.float64).ravel())

    @property
    def values(self) -> tuple[float, ...]:
        """Per-objective values."""
        return self._values

    def as_array(self) -> NDArray[np.float64]:
        """Copy of the values as a float64 array."""
        return np.array(self._values, dtype=np.float64)

    def key(self, decimals: int = KEY_DECIMALS) -> tuple[float, ...]:
        """Values rounded for use in dictionary keys.

        Floating-point noise below ``decimals`` places maps to the same key.
        """
        return tuple(round(v, decimals) + 0.0 for v in self._values)

    def _check_same_length(self, other: ReturnVector) -> None:
        if len(self._values) != len(other._values):
            raise ContractViolationError(
                f"ReturnVector length mismatch: {len(self._values)} vs "
                f"{len(other._values)}"
            )

    def __add__(self, other: object) -> ReturnVector:
        if not isinstance(other, ReturnVector):
            return NotImplemented
        self._check_same_length(other)
        return ReturnVector(a + b for a, b in zip(self._values, other._values))

    def __sub__(self, other: object) -> ReturnVector:
        if not isinstance(other, ReturnVector):
            return NotImplemented
        self._check_same_length(other)
        return ReturnVector(a - b for a, b in zip(self._values, other._values))

    def scale(self, factor: float) -> ReturnVector:
        """Multiply every objective by ``factor``."""
        return ReturnVector(v * factor for v in self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __iter__(self) -> Iterator[float]:
        return iter(self._values)

    def __getitem__(self, index: int) -> float:
        return self._values[index]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReturnVector):
            return NotImplemented
        return self._values == other._values

    def __hash__(self) -> int:
        return hash(self._values)

    def __repr__(self) -> str:
        return f"ReturnVector({list(self._values)})"


def accumulate_returns(
    accrued: ReturnVector, step_reward: ReturnVector
) -> ReturnVector:
    """Add one step's reward to the accrued return.

    Args:
        accrued: Return collected so far in the episode
        step_reward: Reward received at the current step

    Returns:
        Elementwise sum

    Raises:
        ContractViolationError: If the lengths differ
    """
    return accrued + step_reward


def sum_returns(rewards: Iterable[ReturnVector], n: int) -> ReturnVector:
    """Fold a sequence of rewards into one return, starting from zero."""
    total = ReturnVector.zeros(n)
    for reward in rewards:
        total = accumulate_returns(total, reward)
    return total
