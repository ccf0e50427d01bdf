"""Expectimax search tree nodes for the distributional planner."""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Iterator
from typing import Any

from src.logic.bts import BootstrapDistribution
from src.models.environment import State, Transition
from src.models.returns import ReturnVector

OutcomeKey = tuple[Hashable, tuple[float, ...]]


def outcome_key(transition: Transition) -> OutcomeKey:
    """Key a sampled outcome by next state and quantised reward."""
    return (transition.next_state, transition.reward.key())


class DecisionNode:
    """A state reached through an observed outcome; the agent chooses here.

    Attributes:
        state: Environment state of this node
        incoming_reward: Reward observed on the edge that created this node
            (None for a root)
        children: Lazily created chance nodes, keyed by action
        visit_count: Learning iterations whose trajectory passed through
    """

    __slots__ = ("state", "incoming_reward", "terminal", "children", "visit_count")

    def __init__(
        self,
        state: State,
        incoming_reward: ReturnVector | None = None,
        terminal: bool = False,
    ) -> None:
        self.state = state
        self.incoming_reward = incoming_reward
        self.terminal = terminal
        self.children: dict[int, ChanceNode] = {}
        self.visit_count = 0

    def expanded_actions(self) -> list[int]:
        """Actions with a chance node, in ascending order."""
        return sorted(self.children)

    def __repr__(self) -> str:
        return (
            f"DecisionNode(state={self.state!r}, children={len(self.children)}, "
            f"visits={self.visit_count})"
        )


class ChanceNode:
    """A (state, action) pair; the environment samples outcomes here.

    Attributes:
        state: State shared with the parent decision node
        action: Action this node represents
        distribution: Bootstrap posterior over the node's value
        children: Decision nodes keyed by observed (next-state, reward)
        visit_count: Learning iterations that selected this node
    """

    __slots__ = ("state", "action", "distribution", "children", "visit_count")

    def __init__(
        self, state: State, action: int, distribution: BootstrapDistribution
    ) -> None:
        self.state = state
        self.action = action
        self.distribution = distribution
        self.children: dict[OutcomeKey, DecisionNode] = {}
        self.visit_count = 0

    def child_for(self, transition: Transition) -> tuple[DecisionNode, bool]:
        """Child for an observed outcome, creating it if unseen.

        Returns:
            The child node and whether it was created by this call
        """
        key = outcome_key(transition)
        child = self.children.get(key)
        if child is not None:
            return child, False
        child = DecisionNode(
            transition.next_state, transition.reward, transition.terminal
        )
        self.children[key] = child
        return child, True

    def __repr__(self) -> str:
        return (
            f"ChanceNode(action={self.action}, outcomes={len(self.children)}, "
            f"visits={self.visit_count})"
        )


def iter_nodes(
    root: DecisionNode,
) -> Iterator[tuple[int, DecisionNode | ChanceNode]]:
    """Depth-first walk yielding ``(decision depth, node)`` pairs."""
    stack: list[tuple[int, DecisionNode | ChanceNode]] = [(0, root)]
    while stack:
        depth, node = stack.pop()
        yield depth, node
        if isinstance(node, DecisionNode):
            stack.extend((depth, child) for child in node.children.values())
        else:
            stack.extend((depth + 1, child) for child in node.children.values())


def tree_statistics(root: DecisionNode) -> dict[str, Any]:
    """Node counts, depth histogram and root child pooled means."""
    decision_nodes = 0
    chance_nodes = 0
    depths: Counter[int] = Counter()
    for depth, node in iter_nodes(root):
        if isinstance(node, DecisionNode):
            decision_nodes += 1
            depths[depth] += 1
        else:
            chance_nodes += 1

    root_children: dict[str, Any] = {}
    for action in root.expanded_actions():
        chance = root.children[action]
        mean = chance.distribution.pooled_mean()
        root_children[str(action)] = {
            "visits": chance.visit_count,
            "outcomes": len(chance.children),
            "pooled_mean": list(mean.values) if isinstance(mean, ReturnVector) else mean,
        }
    return {
        "decision_nodes": decision_nodes,
        "chance_nodes": chance_nodes,
        "depth_histogram": {str(d): depths[d] for d in sorted(depths)},
        "root_visits": root.visit_count,
        "root_children": root_children,
    }
