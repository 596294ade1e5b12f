"""Sokoban on a 7x7 board: state space, push semantics, generator, heuristic.

Boards carry an all-wall outer ring plus two extra interior walls, two docks,
two boxes and one worker. Box pairs are kept in sorted order everywhere so
state identity is well-defined.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .errors import DomainError, GenerationError, SearchFailure
from .grid import Action, Coord, manhattan

BOARD_SIZE = 7
DEFAULT_ATTEMPTS = 10_000


class SokobanState(NamedTuple):
    worker: Coord
    boxes: tuple[Coord, Coord]  # always sorted


def make_state(worker: Coord, boxes: Sequence[Coord]) -> SokobanState:
    a, b = sorted(boxes)
    return SokobanState(worker, (a, b))


@dataclass(frozen=True)
class SokobanInstance:
    walls: frozenset[Coord]
    docks: tuple[Coord, Coord]
    boxes_start: tuple[Coord, Coord]
    worker_start: Coord
    width: int = BOARD_SIZE
    height: int = BOARD_SIZE

    def __post_init__(self) -> None:
        # Canonical ordering: dock/box pair order carries no meaning.
        object.__setattr__(self, "docks", tuple(sorted(self.docks)))
        object.__setattr__(self, "boxes_start", tuple(sorted(self.boxes_start)))
        occupied = (*self.docks, *self.boxes_start, self.worker_start)
        for c in occupied:
            if not self.in_bounds(c):
                raise DomainError(f"{c} out of bounds")
            if c in self.walls:
                raise DomainError(f"{c} overlaps a wall")
        if len(set(self.docks)) != 2 or len(set(self.boxes_start)) != 2:
            raise DomainError("docks and boxes must each be two distinct cells")
        if self.worker_start in self.boxes_start:
            raise DomainError("worker cannot share a cell with a box")
        if set(self.boxes_start) == set(self.docks):
            raise DomainError("instance is already solved")

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c.x < self.width and 0 <= c.y < self.height

    def is_free(self, c: Coord) -> bool:
        return self.in_bounds(c) and c not in self.walls

    def free_cells(self) -> list[Coord]:
        return [
            Coord(x, y)
            for y in range(self.height)
            for x in range(self.width)
            if Coord(x, y) not in self.walls
        ]


class SokobanFailure(NamedTuple):
    step: int
    reason: str  # "blocked_move" | "blocked_push" | "off_docks"


class SokobanVerdict(NamedTuple):
    valid: bool
    failure: Optional[SokobanFailure] = None


def start_state(instance: SokobanInstance) -> SokobanState:
    return make_state(instance.worker_start, instance.boxes_start)


def step(
    instance: SokobanInstance, state: SokobanState, action: Action
) -> Optional[SokobanState]:
    """One worker move; pushes exactly one adjacent box, never pulls.

    Returns None when the move is illegal (blocked by a wall, or pushing a
    box into a wall or another box).
    """
    target = action.apply(state.worker)
    if not instance.is_free(target):
        return None
    if target not in state.boxes:
        return SokobanState(target, state.boxes)
    beyond = action.apply(target)
    if not instance.is_free(beyond) or beyond in state.boxes:
        return None
    moved = tuple(beyond if b == target else b for b in state.boxes)
    return make_state(target, moved)


def heuristic(instance: SokobanInstance, state: SokobanState) -> int:
    """Minimum over the two box-to-dock assignments of summed Manhattan
    distances. The worker's own distance is excluded."""
    (b1, b2), (d1, d2) = state.boxes, instance.docks
    straight = manhattan(b1, d1) + manhattan(b2, d2)
    crossed = manhattan(b1, d2) + manhattan(b2, d1)
    return min(straight, crossed)


def execute_plan(
    instance: SokobanInstance, plan: Sequence[Action]
) -> SokobanVerdict:
    """Fold ``step`` over the plan; valid iff every step is legal and the
    final box set equals the dock set."""
    state = start_state(instance)
    for i, action in enumerate(plan):
        target = action.apply(state.worker)
        if target in state.boxes:
            nxt = step(instance, state, action)
            if nxt is None:
                return SokobanVerdict(False, SokobanFailure(i, "blocked_push"))
            state = nxt
        elif instance.is_free(target):
            state = SokobanState(target, state.boxes)
        else:
            return SokobanVerdict(False, SokobanFailure(i, "blocked_move"))
    if frozenset(state.boxes) != frozenset(instance.docks):
        return SokobanVerdict(False, SokobanFailure(len(plan), "off_docks"))
    return SokobanVerdict(True)


def interior_cells(width: int = BOARD_SIZE, height: int = BOARD_SIZE) -> list[Coord]:
    return [Coord(x, y) for y in range(1, height - 1) for x in range(1, width - 1)]


def boundary_cells(width: int = BOARD_SIZE, height: int = BOARD_SIZE) -> list[Coord]:
    return [
        Coord(x, y)
        for y in range(height)
        for x in range(width)
        if x in (0, width - 1) or y in (0, height - 1)
    ]


def gen_sokoban(
    seed: int,
    max_attempts: int = DEFAULT_ATTEMPTS,
    node_budget: int = 1_000_000,
) -> SokobanInstance:
    """Sample a solvable 7x7 instance: ring walls plus two random interior
    walls, then two docks, two boxes and the worker on distinct free cells.
    Unsolvable or already-solved layouts are rejected and resampled."""
    from .search import astar_sokoban

    rng = random.Random(seed)
    ring = boundary_cells()
    interior = interior_cells()
    for _ in range(max_attempts):
        walls = frozenset(ring) | frozenset(rng.sample(interior, 2))
        free = [c for c in interior if c not in walls]
        docks = tuple(rng.sample(free, 2))
        boxes = tuple(rng.sample(free, 2))
        if set(boxes) == set(docks):
            continue
        worker = rng.choice([c for c in free if c not in boxes])
        instance = SokobanInstance(
            walls=walls, docks=docks, boxes_start=boxes, worker_start=worker
        )
        try:
            astar_sokoban(instance, node_budget=node_budget)
        except SearchFailure:
            continue
        return instance
    raise GenerationError(f"no solvable instance within {max_attempts} attempts")
