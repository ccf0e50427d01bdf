"""Unit tests for the Q-learning baselines."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.envs.fishwood import Fishwood
from src.envs.tabular import TabularEnv
from src.logic.baselines import (
    BaselineConfig,
    QLearningAgent,
    QTable,
    ScalarisedQLearningAgent,
    epsilon_greedy,
    greedy_action,
    q_update,
    scalarised_q_select,
)
from src.logic.validator import ContractViolationError
from src.models.returns import ReturnVector
from src.models.utility import FishwoodUtility, LinearUtility
from src.utils.file_io import load_json

CHAIN = Path(__file__).parent.parent / "fixtures" / "two-state-chain.json"


def chain() -> TabularEnv:
    return TabularEnv.from_config(load_json(CHAIN))


class TestBaselineConfig:
    """Test baseline hyperparameters."""

    def test_defaults(self) -> None:
        """Test the default section."""
        cfg = BaselineConfig.from_section(None)
        assert cfg.epsilon == 0.1
        assert cfg.learning_rate == 0.1
        assert cfg.signal == "raw"

    def test_epsilon_decay(self) -> None:
        """Test the exponential exploration schedule."""
        cfg = BaselineConfig.from_section({"epsilon_decay": 0.9})
        assert cfg.epsilon_at(0) == 1.0
        assert cfg.epsilon_at(2) == pytest.approx(0.81)

    def test_to_dict(self) -> None:
        """Test the metadata record."""
        cfg = BaselineConfig.from_section({"signal": "linear", "weights": [1, 2]})
        assert cfg.to_dict()["weights"] == [1.0, 2.0]


class TestQTable:
    """Test temporal-difference updates."""

    def test_terminal_update(self) -> None:
        """Test one update from zero with alpha 0.1."""
        table = QTable(learning_rate=0.1)
        q_update(table, ("s", 0), 1, 1.0, ("s", 1), True, 2)
        assert table.values(("s", 0), 2).tolist() == pytest.approx([0.0, 0.1])

    def test_bootstraps_from_best_next_action(self) -> None:
        """Test the max over next-state values."""
        table = QTable(learning_rate=0.1)
        q_update(table, ("s", 1), 1, 10.0, ("s", 2), True, 2)
        q_update(table, ("s", 0), 0, 0.0, ("s", 1), False, 2)
        assert table.values(("s", 0), 2)[0] == pytest.approx(0.1)

    def test_unvisited_reads_zero(self) -> None:
        """Test that reading does not create entries."""
        table = QTable()
        assert table.values(("s", 0), 3).tolist() == [0.0, 0.0, 0.0]
        assert len(table) == 0

    def test_vector_update(self) -> None:
        """Test componentwise updates of a vector table."""
        table = QTable(learning_rate=0.5, n_objectives=2)
        table.update(("s", 1), 0, ReturnVector([2, 4]), ("s", 2), True, 1)
        table.update(("s", 0), 0, ReturnVector([0, 0]), ("s", 1), False, 1, next_action=0)
        assert table.values(("s", 0), 1)[0].tolist() == pytest.approx([0.5, 1.0])

    def test_vector_update_needs_next_action(self) -> None:
        """Test that non-terminal vector updates name the next action."""
        table = QTable(n_objectives=2)
        with pytest.raises(ContractViolationError, match="next greedy action"):
            table.update(("s", 0), 0, ReturnVector([0, 0]), ("s", 1), False, 1)

    def test_reward_kind_checked(self) -> None:
        """Test that scalar and vector rewards are not mixed."""
        with pytest.raises(ContractViolationError, match="scalar rewards"):
            QTable().update(("s", 0), 0, ReturnVector([1]), ("s", 1), True, 1)
        with pytest.raises(ContractViolationError, match="2-objective"):
            QTable(n_objectives=2).update(("s", 0), 0, 1.0, ("s", 1), True, 1)


class TestActionSelection:
    """Test greedy and epsilon-greedy choices."""

    def test_greedy_ties_go_low_without_rng(self) -> None:
        """Test deterministic tie breaking."""
        assert greedy_action([1.0, 3.0, 3.0]) == 1

    def test_greedy_ties_random_with_rng(self) -> None:
        """Test that both tied actions are chosen with a generator."""
        rng = np.random.default_rng(0)
        picks = {greedy_action([1.0, 3.0, 3.0], rng) for _ in range(100)}
        assert picks == {1, 2}

    def test_explore(self, mocker) -> None:
        """Test that a draw below epsilon picks a uniform action."""
        rng = mocker.Mock()
        rng.random.return_value = 0.0
        rng.integers.return_value = 2
        assert epsilon_greedy([5.0, 0.0, 0.0], 0.1, rng) == 2

    def test_exploit(self, mocker) -> None:
        """Test that a draw above epsilon picks the best action."""
        rng = mocker.Mock()
        rng.random.return_value = 0.5
        assert epsilon_greedy([5.0, 0.0, 0.0], 0.1, rng) == 0

    def test_scalarised_select_applies_utility(self) -> None:
        """Test that the utility of Q-vectors drives the choice."""
        table = QTable(learning_rate=1.0, n_objectives=2)
        table.update(("s", 0), 0, ReturnVector([3, 0]), ("s", 1), True, 2)
        table.update(("s", 0), 1, ReturnVector([1, 2]), ("s", 1), True, 2)
        rng = np.random.default_rng(0)
        assert scalarised_q_select(table, ("s", 0), FishwoodUtility(), 2, 0.0, rng) == 1


class TestQLearningAgent:
    """Test the scalar Q-learning agent."""

    def test_raw_signal_needs_one_objective(self) -> None:
        """Test that vector domains need a scalarisation."""
        with pytest.raises(ContractViolationError, match="single-objective"):
            QLearningAgent(BaselineConfig(), FishwoodUtility(), 1, 2, np.random.default_rng(0))

    def test_linear_signal_needs_weights(self) -> None:
        """Test the weight count check."""
        cfg = BaselineConfig(signal="linear", weights=(1.0,))
        with pytest.raises(ContractViolationError, match="2 weights"):
            QLearningAgent(cfg, FishwoodUtility(), 1, 2, np.random.default_rng(0))

    def test_linear_signal(self) -> None:
        """Test the scalarised learning signal."""
        cfg = BaselineConfig(signal="linear", weights=(1.0, 0.5))
        agent = QLearningAgent(cfg, FishwoodUtility(), 1, 2, np.random.default_rng(0))
        assert agent.signal(ReturnVector([1, 2])) == pytest.approx(2.0)

    def test_learns_the_paying_action(self) -> None:
        """Test that simulated episodes find the rewarding action."""
        env = chain()
        rng = np.random.default_rng(1)
        env.reset(rng)
        agent = QLearningAgent(
            BaselineConfig(epsilon=0.3), LinearUtility([1.0]), 300, 1, rng
        )
        agent.begin_episode(env, 0)
        agent.act(env, ReturnVector.zeros(1))
        values = agent.table.values((0, 0), 2)
        assert values[1] > values[0]
        assert values[1] == pytest.approx(2.0, abs=0.2)

    def test_simulations_run_on_clones(self, mocker) -> None:
        """Test that planning leaves the live episode untouched."""
        env = chain()
        rng = np.random.default_rng(2)
        env.reset(rng)
        agent = QLearningAgent(BaselineConfig(), LinearUtility([1.0]), 7, 1, rng)
        spy = mocker.spy(agent, "simulate")
        agent.act(env, ReturnVector.zeros(1))
        assert spy.call_count == 7
        assert agent.executions_last_step == 7
        assert env.t == 0
        assert env.state == 0
        assert agent.episode_statistics()["simulated_episodes"] == 7

    def test_begin_episode_decays_epsilon(self) -> None:
        """Test the per-episode exploration rate."""
        cfg = BaselineConfig(epsilon_decay=0.5)
        agent = QLearningAgent(cfg, LinearUtility([1.0]), 1, 1, np.random.default_rng(0))
        agent.begin_episode(chain(), 3)
        assert agent.epsilon == pytest.approx(0.125)

    def test_same_seed_same_actions(self) -> None:
        """Test that the agent is deterministic given its generator."""

        def play(seed: int) -> list[int]:
            env = Fishwood(horizon=5)
            rng = np.random.default_rng(seed)
            env.reset(rng)
            cfg = BaselineConfig(signal="linear", weights=(1.0, 1.0))
            agent = QLearningAgent(cfg, FishwoodUtility(), 3, 2, rng)
            actions = []
            while not env.done:
                action = agent.act(env, ReturnVector.zeros(2))
                env.step(action, rng)
                actions.append(action)
            return actions

        assert play(11) == play(11)


class TestScalarisedQLearningAgent:
    """Test the vector Q-learning agent."""

    def test_vector_table(self) -> None:
        """Test that the agent keeps vector values."""
        env = Fishwood(horizon=3)
        rng = np.random.default_rng(0)
        env.reset(rng)
        agent = ScalarisedQLearningAgent(BaselineConfig(), FishwoodUtility(), 5, 2, rng)
        action = agent.act(env, ReturnVector.zeros(2))
        assert action in (0, 1)
        assert agent.table.is_vector
        assert agent.table.values((env.state, 0), 2).shape == (2, 2)

    def test_signal_is_the_reward_vector(self) -> None:
        """Test that no scalarisation happens before learning."""
        agent = ScalarisedQLearningAgent(
            BaselineConfig(), FishwoodUtility(), 1, 2, np.random.default_rng(0)
        )
        reward = ReturnVector([1, 0])
        assert agent.signal(reward) is reward
