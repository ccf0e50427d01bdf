"""Exact reference solutions for small or structured instances.

``ESROracle`` enumerates every outcome sequence of an environment that
exposes ``outcomes()``, memoised on (state, timestep, accrued return), and
maximises the expected utility of the full episode return. The risk MDP
also has a closed multiplicative recursion under the exponential utility,
and DDST maps are solved by breadth-first search over safe cells.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Callable, Hashable
from typing import Any

from src.envs.ddst import DangerousDST
from src.envs.risk_mdp import RiskMDP
from src.logic.validator import ContractViolationError
from src.models.environment import Environment, State
from src.models.returns import ReturnVector
from src.models.utility import (
    ExponentialRiskUtility,
    UtilityFunction,
    evaluate_utility,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_ENTRIES = 2_000_000

Policy = Callable[[State, int], int]


class OracleTooLargeError(ValueError):
    """Raised when an instance exceeds the oracle's enumeration bound."""

    def __init__(self, entries: int, bound: int) -> None:
        self.entries = entries
        self.bound = bound
        super().__init__(
            f"Instance needs more than {bound} memoised (state, t, accrued) entries "
            f"(reached {entries}); refusing to enumerate"
        )


class ESROracle:
    """Brute-force expected-utility values under the ESR criterion.

    ``value`` maximises over actions unless a fixed ``policy`` is given, in
    which case it evaluates that policy.
    """

    def __init__(
        self,
        env: Environment,
        u: UtilityFunction,
        max_entries: int = DEFAULT_MAX_ENTRIES,
        policy: Policy | None = None,
    ) -> None:
        self.env = env
        self.u = u
        self.max_entries = max_entries
        self.policy = policy
        self._memo: dict[tuple[Hashable, int, tuple[float, ...]], float] = {}

    @property
    def entries(self) -> int:
        return len(self._memo)

    def value(self, state: State, t: int, accrued: ReturnVector) -> float:
        """Optimal (or policy) expected utility from ``state`` at ``t``.

        Raises:
            OracleTooLargeError: If the memo outgrows ``max_entries``
        """
        key = (state, t, accrued.key())
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if self.policy is not None:
            result = self._action_value(state, t, accrued, self.policy(state, t))
        else:
            result = max(self.action_values(state, t, accrued))
        if len(self._memo) >= self.max_entries:
            raise OracleTooLargeError(len(self._memo), self.max_entries)
        self._memo[key] = result
        return result

    def action_values(
        self, state: State, t: int, accrued: ReturnVector
    ) -> list[float]:
        """Expected utility of each action followed by optimal play."""
        return [
            self._action_value(state, t, accrued, a)
            for a in range(self.env.num_actions(state))
        ]

    def _action_value(
        self, state: State, t: int, accrued: ReturnVector, action: int
    ) -> float:
        total = 0.0
        for p, transition in self.env.outcomes(state, t, action):
            cumulative = accrued + transition.reward
            if transition.terminal or t + 1 >= self.env.horizon:
                total += p * evaluate_utility(self.u, cumulative)
            else:
                total += p * self.value(transition.next_state, t + 1, cumulative)
        return total

    def best_action(self, state: State, t: int, accrued: ReturnVector) -> int:
        """Optimal action; ties go to the lowest index."""
        values = self.action_values(state, t, accrued)
        return max(range(len(values)), key=lambda a: (values[a], -a))

    def initial_value(self, starts: list[tuple[float, State]]) -> float:
        """Expected optimal utility over a start-state distribution."""
        zero = ReturnVector.zeros(self.env.n_objectives)
        return math.fsum(p * self.value(s, 0, zero) for p, s in starts)


def esr_oracle_report(
    env: Environment,
    u: UtilityFunction,
    starts: list[tuple[float, State]],
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> dict[str, Any]:
    """Optimal value and root action values of a small instance.

    Raises:
        OracleTooLargeError: If enumeration exceeds ``max_entries``
    """
    oracle = ESROracle(env, u, max_entries)
    zero = ReturnVector.zeros(env.n_objectives)
    roots = []
    for p, s in starts:
        values = oracle.action_values(s, 0, zero)
        roots.append(
            {
                "state": _jsonable(s),
                "probability": p,
                "action_values": values,
                "best_action": oracle.best_action(s, 0, zero),
            }
        )
    value = oracle.initial_value(starts)
    logger.info("ESR oracle solved %s with %d entries", env.name, oracle.entries)
    return {"domain": env.name, "optimal_value": value, "roots": roots, "entries": oracle.entries}


def risk_mdp_oracle(env: RiskMDP, u: ExponentialRiskUtility) -> dict[str, Any]:
    """Optimal policy and constant-investment values of the risk MDP.

    With ``u = 1 - exp(-k R)`` the episode utility is
    ``1 - E[prod_t exp(-k r_t)]``, so the optimal policy minimises the
    expected product backwards over (state, t) with no dependence on the
    accrued return.
    """
    k = u.risk_aversion
    n, horizon = env.n_states, env.horizon
    # g[t][s] = min_a E[exp(-k r) g[t+1][s']], g[horizon] = 1
    g = [[1.0] * n for _ in range(horizon + 1)]
    policy: list[list[int]] = [[0] * n for _ in range(horizon)]
    for t in range(horizon - 1, -1, -1):
        future = math.fsum(g[t + 1]) / n
        for s in range(n):
            factors = [
                _expected_discount(env, s, a, k) * future
                for a in range(env.num_actions(s))
            ]
            best = min(range(len(factors)), key=lambda a: (factors[a], a))
            g[t][s] = factors[best]
            policy[t][s] = best
    optimal = 1.0 - math.fsum(g[0]) / n

    constant = {}
    for a in range(env.num_actions(0)):
        per_step = math.fsum(_expected_discount(env, s, a, k) for s in range(n)) / n
        constant[f"invest-{env.investment(a)}"] = 1.0 - per_step**horizon
    return {
        "domain": env.name,
        "optimal_value": optimal,
        "optimal_policy": policy,
        "constant_policies": constant,
        "optimal_constant_policy": max(constant, key=lambda name: constant[name]),
    }


def _expected_discount(env: RiskMDP, state: int, action: int, k: float) -> float:
    stock = env.stocks[state]
    invested = env.investment(action)
    return stock.p_up * math.exp(-k * invested * stock.gain) + (
        1.0 - stock.p_up
    ) * math.exp(k * invested * stock.loss)


def shortest_safe_paths(env: DangerousDST) -> dict[tuple[int, int], int]:
    """Fewest steps from the start to every treasure avoiding all sharks.

    Paths never pass through another treasure, since reaching one ends the
    episode.
    """
    start = env.start
    distance = {start: 0}
    found: dict[tuple[int, int], int] = {}
    queue = deque([start])
    while queue:
        row, col = queue.popleft()
        for action in range(env.num_actions((row, col, 0.0))):
            cell_pos = env.move(row, col, action)
            if cell_pos in distance:
                continue
            cell = env.cell(*cell_pos)
            if cell.kind == "shark":
                continue
            distance[cell_pos] = distance[(row, col)] + 1
            if cell.kind == "treasure":
                found[cell_pos] = distance[cell_pos]
            else:
                queue.append(cell_pos)
    return found


def ddst_oracle(env: DangerousDST, u: UtilityFunction) -> dict[str, Any]:
    """Safe treasure routes, their returns and utilities.

    Raises:
        ContractViolationError: If ``u`` does not take 3-objective returns
    """
    if u.n_objectives != env.n_objectives:
        raise ContractViolationError(
            f"DDST returns have {env.n_objectives} objectives, utility expects "
            f"{u.n_objectives}"
        )
    treasures = env.treasures()
    routes = []
    for cell, steps in sorted(shortest_safe_paths(env).items()):
        if steps > env.horizon:
            continue
        ret = ReturnVector([treasures[cell], 0.0, -float(steps)])
        routes.append(
            {
                "cell": list(cell),
                "treasure": treasures[cell],
                "steps": steps,
                "return": list(ret.values),
                "utility": evaluate_utility(u, ret),
            }
        )
    best = max(routes, key=lambda r: r["utility"]) if routes else None
    return {"domain": env.name, "safe_routes": routes, "best_route": best}


def _jsonable(state: State) -> Any:
    if isinstance(state, tuple):
        return [_jsonable(s) for s in state]
    return state
