"""Bootstrap Thompson Sampling distributions.

Each node of the search tree owns a ``BootstrapDistribution``: J bootstrap
replicates of (alpha, beta) statistics approximating a posterior over the
expected utility (ESR, scalar alpha) or the expected return vector (SER,
vector alpha). Replicates absorb an observation when an independent fair
coin lands heads.
"""

from __future__ import annotations

from collections.abc import Sequence
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.logic.validator import ContractViolationError
from src.models.returns import ReturnVector
from src.models.utility import UtilityFunction, evaluate_utility

DEFAULT_REPLICATES = 50


class Criterion(str, Enum):
    """Optimality criterion a distribution is maintained for."""

    ESR = "ESR"
    SER = "SER"


class BootstrapDistribution:
    """J replicates of (alpha, beta) statistics.

    In ESR mode ``alpha`` has shape ``(J,)``; in SER mode ``(J, n)``.
    ``beta`` always has shape ``(J,)``, starts at 1 and only grows by 1.

    Attributes:
        mode: ESR or SER
        prior: Initial alpha value of every replicate (and objective)
        n_objectives: Length of SER alpha vectors (1 in ESR mode)
        update_count: Number of ``update`` calls absorbed
    """

    __slots__ = ("_alpha", "_beta", "_mode", "_prior", "_n", "_updates")

    def __init__(
        self,
        replicates: int,
        mode: Criterion = Criterion.ESR,
        n_objectives: int = 1,
        alpha_prior: float = 1.0,
    ) -> None:
        """Initialize a fresh distribution.

        Args:
            replicates: Number of bootstrap replicates J
            mode: ESR (scalar alpha) or SER (vector alpha)
            n_objectives: Objective count n for SER alpha vectors
            alpha_prior: Initial alpha value

        Raises:
            ContractViolationError: If J or n is zero or the prior is not
                positive
        """
        if replicates < 1:
            raise ContractViolationError("Bootstrap distribution needs J >= 1")
        if n_objectives < 1:
            raise ContractViolationError("Bootstrap distribution needs n >= 1")
        if alpha_prior <= 0:
            raise ContractViolationError("alpha_prior must be positive")

        self._mode = Criterion(mode)
        self._prior = float(alpha_prior)
        self._n = n_objectives if self._mode is Criterion.SER else 1
        shape: tuple[int, ...] = (
            (replicates, n_objectives) if self._mode is Criterion.SER else (replicates,)
        )
        self._alpha: NDArray[np.float64] = np.full(shape, self._prior)
        self._beta: NDArray[np.float64] = np.ones(replicates)
        self._updates = 0

    @property
    def replicates(self) -> int:
        """Number of replicates J."""
        return int(self._beta.shape[0])

    @property
    def mode(self) -> Criterion:
        return self._mode

    @property
    def prior(self) -> float:
        return self._prior

    @property
    def n_objectives(self) -> int:
        return self._n

    @property
    def update_count(self) -> int:
        return self._updates

    @property
    def alpha(self) -> NDArray[np.float64]:
        """Read-only view of the alpha statistics."""
        view = self._alpha.view()
        view.flags.writeable = False
        return view

    @property
    def beta(self) -> NDArray[np.float64]:
        """Read-only view of the beta counts."""
        view = self._beta.view()
        view.flags.writeable = False
        return view

    def update(
        self, observation: float | ReturnVector, rng: np.random.Generator
    ) -> NDArray[np.bool_]:
        """Absorb one observation into a random half of the replicates.

        Args:
            observation: ``u(R_t)`` in ESR mode, ``R_t`` in SER mode
            rng: Source of the Bernoulli(1/2) coin flips

        Returns:
            Boolean mask of the replicates that absorbed the observation

        Raises:
            ContractViolationError: On an SER dimension mismatch or an
                observation of the wrong kind
        """
        value = self._coerce(observation)
        heads = np.asarray(rng.integers(0, 2, size=self.replicates)).astype(bool)
        self._alpha[heads] += value
        self._beta[heads] += 1.0
        self._updates += 1
        return heads

    def _coerce(self, observation: float | ReturnVector) -> Any:
        if self._mode is Criterion.ESR:
            if isinstance(observation, ReturnVector):
                raise ContractViolationError(
                    "ESR distributions absorb scalar utilities, not return vectors"
                )
            return float(observation)
        if not isinstance(observation, ReturnVector):
            raise ContractViolationError(
                "SER distributions absorb return vectors, not scalars"
            )
        if len(observation) != self._n:
            raise ContractViolationError(
                f"SER observation length {len(observation)} does not match "
                f"n={self._n}"
            )
        return observation.as_array()

    def replicate_mean(self, j: int) -> float | ReturnVector:
        """``alpha_j / beta_j`` for replicate ``j`` (0-based).

        Raises:
            ContractViolationError: If ``j`` is out of range
        """
        if not (0 <= j < self.replicates):
            raise ContractViolationError(
                f"Replicate index {j} out of range 0..{self.replicates - 1}"
            )
        if self._mode is Criterion.ESR:
            return float(self._alpha[j] / self._beta[j])
        return ReturnVector.from_array(self._alpha[j] / self._beta[j])

    def pooled_mean(self) -> float | ReturnVector:
        """Mean over all acquired data, ignoring the replicate split."""
        total_beta = float(self._beta.sum())
        if self._mode is Criterion.ESR:
            return float(self._alpha.sum() / total_beta)
        return ReturnVector.from_array(self._alpha.sum(axis=0) / total_beta)

    def to_dict(self) -> dict[str, Any]:
        """JSON snapshot of the replicate arrays."""
        return {
            "mode": self._mode.value,
            "prior": self._prior,
            "n_objectives": self._n,
            "update_count": self._updates,
            "alpha": self._alpha.tolist(),
            "beta": self._beta.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BootstrapDistribution:
        """Restore a snapshot written by ``to_dict``.

        Raises:
            ValueError: If the snapshot is inconsistent
        """
        for field in ("mode", "prior", "alpha", "beta"):
            if field not in data:
                raise ValueError(f"Missing required field: {field}")
        beta = np.asarray(data["beta"], dtype=np.float64)
        alpha = np.asarray(data["alpha"], dtype=np.float64)
        mode = Criterion(data["mode"])
        n = int(data.get("n_objectives", 1))
        dist = cls(len(beta), mode, n, float(data["prior"]))
        if alpha.shape != dist._alpha.shape:
            raise ValueError(
                f"alpha shape {alpha.shape} does not match {dist._alpha.shape}"
            )
        if np.any(beta < 1):
            raise ValueError("beta counts must be >= 1")
        dist._alpha = alpha
        dist._beta = beta
        dist._updates = int(data.get("update_count", 0))
        return dist

    def __repr__(self) -> str:
        return (
            f"BootstrapDistribution(J={self.replicates}, mode={self._mode.value}, "
            f"updates={self._updates})"
        )


def new_distribution(
    replicates: int,
    mode: Criterion = Criterion.ESR,
    n_objectives: int = 1,
    alpha_prior: float = 1.0,
) -> BootstrapDistribution:
    """Create a distribution with every replicate at ``(alpha_prior, 1)``."""
    return BootstrapDistribution(replicates, mode, n_objectives, alpha_prior)


def update(
    dist: BootstrapDistribution,
    observation: float | ReturnVector,
    rng: np.random.Generator,
) -> NDArray[np.bool_]:
    """Bernoulli re-weighted update of ``dist``; see ``BootstrapDistribution.update``."""
    return dist.update(observation, rng)


def replicate_mean(dist: BootstrapDistribution, j: int) -> float | ReturnVector:
    """``alpha_j / beta_j``; see ``BootstrapDistribution.replicate_mean``."""
    return dist.replicate_mean(j)


def _score(value: float | ReturnVector, u: UtilityFunction | None) -> float:
    if isinstance(value, ReturnVector):
        if u is None:
            raise ContractViolationError("SER selection requires a utility function")
        return evaluate_utility(u, value)
    return value


def _argmax(scores: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best


def thompson_select(
    children: Sequence[BootstrapDistribution],
    u: UtilityFunction | None,
    rng: np.random.Generator,
) -> int:
    """Pick a child by sampling one replicate per child and maximising.

    Every child draws its own replicate index uniformly. ESR scores are
    ``alpha/beta``; SER scores are ``u(alpha/beta)``. Ties go to the lowest
    index.

    Raises:
        ContractViolationError: If ``children`` is empty
    """
    if not children:
        raise ContractViolationError("Cannot select among zero children")
    scores = []
    for child in children:
        j = int(rng.integers(0, child.replicates))
        scores.append(_score(child.replicate_mean(j), u))
    return _argmax(scores)


def greedy_select(
    children: Sequence[BootstrapDistribution], u: UtilityFunction | None
) -> int:
    """Pick the child with the best pooled mean (execution-time choice).

    Raises:
        ContractViolationError: If ``children`` is empty
    """
    if not children:
        raise ContractViolationError("Cannot select among zero children")
    return _argmax([_score(child.pooled_mean(), u) for child in children])
