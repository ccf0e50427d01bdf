"""Unit tests for search tree nodes."""

from __future__ import annotations

from src.logic.bts import Criterion, new_distribution
from src.models.environment import Transition
from src.models.returns import ReturnVector
from src.models.tree import (
    ChanceNode,
    DecisionNode,
    iter_nodes,
    outcome_key,
    tree_statistics,
)


def chance(state: object = 0, action: int = 0) -> ChanceNode:
    return ChanceNode(state, action, new_distribution(3))


class TestOutcomeKey:
    """Test outcome keys."""

    def test_same_state_and_reward_share_a_key(self) -> None:
        """Test that rewards equal up to float noise share a key."""
        a = Transition(1, ReturnVector([0.1 + 0.2]), False)
        b = Transition(1, ReturnVector([0.3]), False)
        assert outcome_key(a) == outcome_key(b)

    def test_different_rewards_differ(self) -> None:
        """Test that the reward is part of the key."""
        a = Transition(1, ReturnVector([1.0]), False)
        b = Transition(1, ReturnVector([0.0]), False)
        assert outcome_key(a) != outcome_key(b)

    def test_different_states_differ(self) -> None:
        """Test that the next state is part of the key."""
        a = Transition(1, ReturnVector([1.0]), False)
        b = Transition(2, ReturnVector([1.0]), False)
        assert outcome_key(a) != outcome_key(b)


class TestChanceNode:
    """Test outcome children of chance nodes."""

    def test_child_created_once(self) -> None:
        """Test that a repeated outcome reuses its decision node."""
        node = chance()
        transition = Transition(3, ReturnVector([1.0]), False)
        first, created = node.child_for(transition)
        second, created_again = node.child_for(transition)
        assert created is True
        assert created_again is False
        assert first is second
        assert len(node.children) == 1

    def test_child_records_incoming_reward_and_terminal(self) -> None:
        """Test the fields of a created decision node."""
        node = chance()
        child, _ = node.child_for(Transition(2, ReturnVector([5.0]), True))
        assert child.state == 2
        assert child.incoming_reward == ReturnVector([5.0])
        assert child.terminal is True

    def test_distinct_outcomes_get_distinct_children(self) -> None:
        """Test that two observed outcomes give two children."""
        node = chance()
        node.child_for(Transition(1, ReturnVector([1.0]), False))
        node.child_for(Transition(1, ReturnVector([-1.0]), False))
        assert len(node.children) == 2


class TestDecisionNode:
    """Test decision nodes."""

    def test_new_node_is_empty(self) -> None:
        """Test defaults of a root node."""
        root = DecisionNode("s0")
        assert root.children == {}
        assert root.incoming_reward is None
        assert root.terminal is False
        assert root.visit_count == 0

    def test_expanded_actions_sorted(self) -> None:
        """Test that expanded actions are listed in ascending order."""
        root = DecisionNode(0)
        root.children[2] = chance(0, 2)
        root.children[0] = chance(0, 0)
        assert root.expanded_actions() == [0, 2]


class TestTreeStatistics:
    """Test the tree walk and statistics dump."""

    def build(self) -> DecisionNode:
        root = DecisionNode(0)
        for action in (0, 1):
            node = chance(0, action)
            root.children[action] = node
            node.visit_count = action + 1
        child, _ = root.children[0].child_for(Transition(1, ReturnVector([1.0]), False))
        grandchild_chance = chance(1, 0)
        child.children[0] = grandchild_chance
        grandchild_chance.child_for(Transition(2, ReturnVector([0.0]), True))
        root.children[1].child_for(Transition(2, ReturnVector([0.0]), False))
        return root

    def test_iter_nodes_depths(self) -> None:
        """Test that decision depth grows below each chance node."""
        depths = sorted(
            depth for depth, node in iter_nodes(self.build()) if isinstance(node, DecisionNode)
        )
        assert depths == [0, 1, 1, 2]

    def test_counts_and_histogram(self) -> None:
        """Test node counts and the depth histogram."""
        stats = tree_statistics(self.build())
        assert stats["decision_nodes"] == 4
        assert stats["chance_nodes"] == 3
        assert stats["depth_histogram"] == {"0": 1, "1": 2, "2": 1}

    def test_root_children(self) -> None:
        """Test per-action visits, outcome counts and pooled means."""
        stats = tree_statistics(self.build())
        assert stats["root_children"]["0"] == {"visits": 1, "outcomes": 1, "pooled_mean": 1.0}
        assert stats["root_children"]["1"]["visits"] == 2

    def test_ser_pooled_means_are_lists(self) -> None:
        """Test that vector means are JSON-friendly."""
        root = DecisionNode(0)
        root.children[0] = ChanceNode(0, 0, new_distribution(2, Criterion.SER, 2))
        stats = tree_statistics(root)
        assert stats["root_children"]["0"]["pooled_mean"] == [1.0, 1.0]
