"""Grid-world core: coordinates, mazes, movement semantics, plan execution.

Axis convention: ``(0, 0)`` is the bottom-left corner, ``x`` grows to the
right (columns) and ``y`` grows upward (rows), so ``up`` increments ``y``.
All values here are immutable and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Sequence

from .errors import DomainError


class Coord(NamedTuple):
    x: int
    y: int


class Action(Enum):
    """The four unit moves. Enumeration order is the fixed expansion order."""

    UP = (0, 1)
    DOWN = (0, -1)
    LEFT = (-1, 0)
    RIGHT = (1, 0)

    @property
    def delta(self) -> tuple[int, int]:
        return self.value

    def apply(self, c: Coord) -> Coord:
        dx, dy = self.value
        return Coord(c.x + dx, c.y + dy)


ACTIONS = tuple(Action)

# A plan is simply an ordered sequence of actions.
Plan = tuple[Action, ...]


@dataclass(frozen=True)
class GridMaze:
    """A rectangular maze instance: free/wall cells plus start and goal."""

    width: int
    height: int
    walls: frozenset[Coord] = field(default_factory=frozenset)
    start: Coord = Coord(0, 0)
    goal: Coord = Coord(0, 1)

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise DomainError(f"degenerate maze size {self.width}x{self.height}")
        if self.start == self.goal:
            raise DomainError("start and goal must differ")
        for name, c in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(c):
                raise DomainError(f"{name} {c} out of bounds")
            if c in self.walls:
                raise DomainError(f"{name} {c} is a wall cell")
        for w in self.walls:
            if not self.in_bounds(w):
                raise DomainError(f"wall {w} out of bounds")

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c.x < self.width and 0 <= c.y < self.height

    def is_free(self, c: Coord) -> bool:
        return self.in_bounds(c) and c not in self.walls

    def free_cells(self) -> list[Coord]:
        """All free cells in row-major order (y, then x ascending)."""
        return [
            Coord(x, y)
            for y in range(self.height)
            for x in range(self.width)
            if Coord(x, y) not in self.walls
        ]


class PlanFailure(NamedTuple):
    step: int
    reason: str  # "hit_wall" | "out_of_bounds" | "off_goal"


class PlanVerdict(NamedTuple):
    valid: bool
    failure: Optional[PlanFailure] = None


def manhattan(a: Coord, b: Coord) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def neighbors(maze: GridMaze, c: Coord) -> list[Coord]:
    """Free in-bounds cells one step from ``c``, in up/down/left/right order."""
    if not maze.in_bounds(c):
        raise DomainError(f"cell {c} out of bounds")
    out = []
    for action in ACTIONS:
        n = action.apply(c)
        if maze.is_free(n):
            out.append(n)
    return out


def execute_plan(maze: GridMaze, plan: Sequence[Action]) -> PlanVerdict:
    """Simulate ``plan`` from the start cell.

    Valid iff every step lands on a free in-bounds cell and the final cell is
    the goal. Failures are verdicts, never exceptions; the reported step is
    the first offending action (``len(plan)`` when the walk merely ends off
    the goal).
    """
    cur = maze.start
    for i, action in enumerate(plan):
        cur = action.apply(cur)
        if not maze.in_bounds(cur):
            return PlanVerdict(False, PlanFailure(i, "out_of_bounds"))
        if cur in maze.walls:
            return PlanVerdict(False, PlanFailure(i, "hit_wall"))
    if cur != maze.goal:
        return PlanVerdict(False, PlanFailure(len(plan), "off_goal"))
    return PlanVerdict(True)


def path_to_plan(path: Sequence[Coord]) -> Plan:
    """Convert a cell path into the action sequence that walks it."""
    deltas = {a.value: a for a in Action}
    actions = []
    for a, b in zip(path, path[1:]):
        step = (b.x - a.x, b.y - a.y)
        if step not in deltas:
            raise DomainError(f"cells {a} and {b} are not adjacent")
        actions.append(deltas[step])
    return tuple(actions)
