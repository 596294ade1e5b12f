"""A* with open/closed lists and linearized trace emission, plus a BFS oracle.

Every search here is deterministic: children are generated in the fixed
up/down/left/right order and equal-f ties in the open list are broken by
larger g first, then by insertion order. The emitted trace records exactly
the open/closed-list operations the search performed:

- pushing a node emits a ``create`` event (also on a g-improving re-push),
- popping a node emits a ``close`` event,
- neighbors already closed, or not improved, emit nothing,
- the goal's ``close`` is the final event.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, NamedTuple, Optional

from .errors import SearchFailure
from .grid import ACTIONS, Action, Coord, GridMaze, Plan, manhattan

State = Hashable

CREATE = "create"
CLOSE = "close"


class TraceEvent(NamedTuple):
    kind: str  # "create" | "close"
    state: State  # Coord for mazes, SokobanState for Sokoban
    g: int
    h: int

    @property
    def f(self) -> int:
        return self.g + self.h


@dataclass(frozen=True)
class SearchResult:
    plan: Plan
    trace: tuple[TraceEvent, ...]
    expanded: int


def _astar(
    start: State,
    is_goal: Callable[[State], bool],
    successors: Callable[[State], Iterable[tuple[Action, State]]],
    heuristic: Callable[[State], int],
    node_budget: Optional[int] = None,
) -> SearchResult:
    """Generic A* over unit-cost edges. Raises SearchFailure when no plan exists
    or the expansion budget runs out."""
    counter = itertools.count()
    trace: list[TraceEvent] = []
    h0 = heuristic(start)
    open_entry: dict[State, tuple[int, int]] = {start: (0, h0)}
    parent: dict[State, Optional[tuple[State, Action]]] = {start: None}
    heap: list[tuple[int, int, int, State, int]] = [(h0, 0, next(counter), start, 0)]
    trace.append(TraceEvent(CREATE, start, 0, h0))
    closed: set[State] = set()
    expanded = 0

    while heap:
        _, _, _, state, g = heapq.heappop(heap)
        entry = open_entry.get(state)
        if entry is None or entry[0] != g:
            continue  # stale heap entry: already closed or superseded
        h = entry[1]
        del open_entry[state]
        closed.add(state)
        expanded += 1
        trace.append(TraceEvent(CLOSE, state, g, h))
        if is_goal(state):
            return SearchResult(_reconstruct(parent, state), tuple(trace), expanded)
        if node_budget is not None and expanded >= node_budget:
            raise SearchFailure(f"node budget of {node_budget} expansions exceeded")
        for action, child in successors(state):
            if child in closed:
                continue
            tg = g + 1
            current = open_entry.get(child)
            if current is None:
                ch = heuristic(child)
            elif tg < current[0]:
                ch = current[1]
            else:
                continue
            open_entry[child] = (tg, ch)
            parent[child] = (state, action)
            trace.append(TraceEvent(CREATE, child, tg, ch))
            heapq.heappush(heap, (tg + ch, -tg, next(counter), child, tg))

    raise SearchFailure("open list exhausted before reaching the goal")


def _reconstruct(
    parent: dict[State, Optional[tuple[State, Action]]], state: State
) -> Plan:
    actions: list[Action] = []
    link = parent[state]
    while link is not None:
        prev, action = link
        actions.append(action)
        link = parent[prev]
    actions.reverse()
    return tuple(actions)


def _maze_successors(maze: GridMaze) -> Callable[[Coord], list[tuple[Action, Coord]]]:
    def successors(c: Coord) -> list[tuple[Action, Coord]]:
        out = []
        for action in ACTIONS:
            n = action.apply(c)
            if maze.is_free(n):
                out.append((action, n))
        return out

    return successors


def astar_maze(maze: GridMaze) -> SearchResult:
    """Optimal maze search under the Manhattan heuristic, with full trace."""
    goal = maze.goal
    return _astar(
        maze.start,
        lambda c: c == goal,
        _maze_successors(maze),
        lambda c: manhattan(c, goal),
    )


def astar_sokoban(instance, node_budget: int = 1_000_000) -> SearchResult:
    """Optimal Sokoban search under the box/dock assignment heuristic."""
    from . import sokoban

    start = sokoban.start_state(instance)
    docks = frozenset(instance.docks)

    def successors(state):
        out = []
        for action in ACTIONS:
            child = sokoban.step(instance, state, action)
            if child is not None:
                out.append((action, child))
        return out

    return _astar(
        start,
        lambda s: frozenset(s.boxes) == docks,
        successors,
        lambda s: sokoban.heuristic(instance, s),
        node_budget=node_budget,
    )


def bfs_shortest_path(maze: GridMaze) -> Optional[int]:
    """Exact start-to-goal distance by breadth-first search, None if unreachable.

    Kept independent of the A* machinery on purpose: it is the oracle the
    optimality tests compare against.
    """
    if maze.start == maze.goal:
        return 0
    seen = {maze.start}
    frontier = deque([(maze.start, 0)])
    while frontier:
        cell, d = frontier.popleft()
        for action in ACTIONS:
            n = action.apply(cell)
            if n == maze.goal:
                return d + 1
            if maze.is_free(n) and n not in seen:
                seen.add(n)
                frontier.append((n, d + 1))
    return None
