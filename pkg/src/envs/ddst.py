"""Dangerous Deep Sea Treasure.

A submarine starts in the top-left corner of a grid and searches for
treasure. Objectives are ``[treasure, damage, time]``. Every move costs one
unit of time; moving into the seabed or off the grid leaves the submarine
where it is. Reaching a treasure ends the episode with its value. Sharks
patrol some water cells and hit a submarine entering them with
probability ``p_shark`` (terminal-shark cells always hit and end the
episode); each hit deals ``-10`` damage and the submarine is destroyed once
its damage reaches the destruction threshold.

Maps are grids of glyphs:

    ``.``      water
    ``#``      seabed
    ``T:v``    treasure worth ``v``
    ``S``      shark with the map's default ``p_shark``
    ``S:p``    shark with its own hit probability
    ``X``      terminal shark
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.models.environment import Environment, State, Transition
from src.models.returns import ReturnVector

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
MOVES = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}

SHARK_DAMAGE = -10.0
TIME_PENALTY = -1.0


@dataclass(frozen=True)
class Cell:
    """Parsed map glyph."""

    kind: str
    value: float = 0.0
    p_hit: float = 0.0
    terminal: bool = False

    @property
    def passable(self) -> bool:
        return self.kind != "seabed"


def parse_glyph(glyph: str, p_shark: float) -> Cell:
    """Parse one map glyph.

    Raises:
        ValueError: If the glyph is unknown or its parameter is invalid
    """
    glyph = glyph.strip()
    if glyph == ".":
        return Cell("water")
    if glyph == "#":
        return Cell("seabed")
    if glyph == "X":
        return Cell("shark", p_hit=1.0, terminal=True)
    if glyph == "S":
        return Cell("shark", p_hit=p_shark)
    head, sep, arg = glyph.partition(":")
    if sep and head in ("T", "S"):
        try:
            number = float(arg)
        except ValueError as e:
            raise ValueError(f"Invalid glyph parameter in {glyph!r}") from e
        if head == "T":
            return Cell("treasure", value=number)
        if not (0.0 <= number <= 1.0):
            raise ValueError(f"Shark probability out of range in {glyph!r}")
        return Cell("shark", p_hit=number)
    raise ValueError(f"Unknown map glyph: {glyph!r}")


class DangerousDST(Environment):
    """Grid world with treasures, a seabed and sharks.

    States are ``(row, col, damage)`` tuples.
    """

    name = "ddst"

    def __init__(
        self,
        grid: Sequence[Sequence[Cell]],
        start: tuple[int, int] = (0, 0),
        horizon: int = 50,
        destruction_threshold: float = SHARK_DAMAGE,
        p_shark: float = 0.5,
    ) -> None:
        """Initialize the map.

        Args:
            grid: Parsed cells, row-major
            start: Start cell
            horizon: Step limit per episode
            destruction_threshold: Damage at or below which the submarine
                is destroyed; ``-10`` means one hit
            p_shark: Default hit probability recorded for ``S`` glyphs

        Raises:
            ValueError: If the grid is ragged or the start cell is unusable
        """
        super().__init__()
        errors = []
        if not grid or not grid[0]:
            errors.append("map must have at least one cell")
        elif any(len(row) != len(grid[0]) for row in grid):
            errors.append("map rows must all have the same width")
        if horizon < 1:
            errors.append("horizon must be >= 1")
        if destruction_threshold > SHARK_DAMAGE:
            errors.append("destruction_threshold must be <= -10")
        if not errors:
            r, c = start
            if not (0 <= r < len(grid) and 0 <= c < len(grid[0])):
                errors.append(f"start {start} is off the map")
            elif grid[r][c].kind != "water":
                errors.append(f"start {start} must be a water cell")
        if errors:
            raise ValueError("Invalid DDST map: " + "; ".join(errors))

        self._grid = tuple(tuple(row) for row in grid)
        self._start = (int(start[0]), int(start[1]))
        self._horizon = horizon
        self._threshold = destruction_threshold
        self.p_shark = p_shark

    @property
    def n_objectives(self) -> int:
        return 3

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def rows(self) -> int:
        return len(self._grid)

    @property
    def cols(self) -> int:
        return len(self._grid[0])

    @property
    def start(self) -> tuple[int, int]:
        return self._start

    def cell(self, row: int, col: int) -> Cell:
        return self._grid[row][col]

    def treasures(self) -> dict[tuple[int, int], float]:
        """Treasure values keyed by cell."""
        return {
            (r, c): cell.value
            for r, row in enumerate(self._grid)
            for c, cell in enumerate(row)
            if cell.kind == "treasure"
        }

    def num_actions(self, state: State) -> int:
        return len(MOVES)

    def initial_state(self, rng: np.random.Generator) -> State:
        return (*self._start, 0.0)

    def initial_outcomes(self) -> list[tuple[float, State]]:
        return [(1.0, (*self._start, 0.0))]

    def move(self, row: int, col: int, action: int) -> tuple[int, int]:
        """Cell reached by ``action``; blocked moves stay put."""
        dr, dc = MOVES[action]
        r, c = row + dr, col + dc
        if 0 <= r < self.rows and 0 <= c < self.cols and self._grid[r][c].passable:
            return r, c
        return row, col

    def transition(
        self, state: State, t: int, action: int, rng: np.random.Generator
    ) -> Transition:
        row, col, damage = state  # type: ignore[misc]
        r, c = self.move(row, col, action)
        cell = self._grid[r][c]
        hit = cell.kind == "shark" and rng.random() < cell.p_hit
        return self._outcome(r, c, damage, hit, t)

    def outcomes(
        self, state: State, t: int, action: int
    ) -> list[tuple[float, Transition]]:
        row, col, damage = state  # type: ignore[misc]
        r, c = self.move(row, col, action)
        cell = self._grid[r][c]
        if cell.kind != "shark":
            return [(1.0, self._outcome(r, c, damage, False, t))]
        return [
            (p, self._outcome(r, c, damage, hit, t))
            for p, hit in ((cell.p_hit, True), (1.0 - cell.p_hit, False))
            if p > 0.0
        ]

    def _outcome(
        self, r: int, c: int, damage: float, hit: bool, t: int
    ) -> Transition:
        cell = self._grid[r][c]
        treasure = cell.value if cell.kind == "treasure" else 0.0
        hit_damage = SHARK_DAMAGE if hit else 0.0
        total_damage = damage + hit_damage
        terminal = (
            cell.kind == "treasure"
            or (hit and cell.terminal)
            or total_damage <= self._threshold
            or t + 1 >= self._horizon
        )
        return Transition(
            (r, c, total_damage),
            ReturnVector([treasure, hit_damage, TIME_PENALTY]),
            terminal,
        )

    def config_dict(self) -> dict[str, Any]:
        return {
            "map": [[_glyph(cell, self.p_shark) for cell in row] for row in self._grid],
            "start": list(self._start),
            "horizon": self._horizon,
            "destruction_threshold": self._threshold,
            "p_shark": self.p_shark,
        }

    @classmethod
    def from_config(cls, data: Mapping[str, Any]) -> DangerousDST:
        """Build from ``ddst-map.json``-style parameters.

        ``map`` is a list of rows, each either a list of glyphs or a string
        of space-separated glyphs.

        Raises:
            ValueError: If the map is missing or contains unknown glyphs
        """
        if "map" not in data:
            raise ValueError("Missing required field: map")
        p_shark = float(data.get("p_shark", 0.5))
        if not (0.0 <= p_shark <= 1.0):
            raise ValueError(f"p_shark must be in [0, 1], got {p_shark}")
        grid = []
        for row in data["map"]:
            glyphs = row.split() if isinstance(row, str) else row
            grid.append([parse_glyph(g, p_shark) for g in glyphs])
        start = data.get("start", [0, 0])
        return cls(
            grid,
            start=(int(start[0]), int(start[1])),
            horizon=int(data.get("horizon", 50)),
            destruction_threshold=float(
                data.get("destruction_threshold", SHARK_DAMAGE)
            ),
            p_shark=p_shark,
        )


def _glyph(cell: Cell, p_shark: float) -> str:
    if cell.kind == "water":
        return "."
    if cell.kind == "seabed":
        return "#"
    if cell.kind == "treasure":
        return f"T:{cell.value:g}"
    if cell.terminal:
        return "X"
    if cell.p_hit == p_shark:
        return "S"
    return f"S:{cell.p_hit:g}"
