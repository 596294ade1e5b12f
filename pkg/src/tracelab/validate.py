"""Formal trace validation: replay create/close events against simulated
open and closed lists, and the joint plan/trace classifier.

A trace is valid iff the replay reaches the goal's close without violating
any rule. The first violation is reported with its event index and one of
six error classes; events after the goal's close are ignored. Claimed costs
are checked so that the lowest-f rule cannot be defeated by fabrication:
h must match the domain heuristic exactly, a first creation must claim its
parent's g + 1, an open node's g may only decrease via such a re-creation,
and equal-g restatements are tolerated. Cost-claim violations on a create
count as illegal children.
"""

from __future__ import annotations

import heapq
import itertools
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence, Union

from . import sokoban as sk
from .grid import ACTIONS, Coord, GridMaze, execute_plan, manhattan
from .grammar import (
    MAZE_DOMAIN,
    SOKOBAN_DOMAIN,
    ParsedResponse,
    parse_response,
)
from .search import CREATE, State, TraceEvent


class TraceErrorClass(Enum):
    PARSING_ERROR = "parsing_error"
    INVALID_NEIGHBOR = "invalid_neighbor"
    ALREADY_CLOSED = "already_closed"
    NOT_IN_OPEN_LIST = "not_in_open_list"
    NOT_LOWEST_F = "not_lowest_f"
    GOAL_NOT_REACHED = "goal_not_reached"


class TraceError(NamedTuple):
    kind: TraceErrorClass
    event_index: int


class TraceVerdict(NamedTuple):
    valid: bool
    error: Optional[TraceError] = None


class ResponseClassification(NamedTuple):
    plan_valid: bool
    trace_valid: bool
    trace_error: Optional[TraceErrorClass] = None


def _invalid(kind: TraceErrorClass, index: int) -> TraceVerdict:
    return TraceVerdict(False, TraceError(kind, index))


def _replay(
    events: Sequence[TraceEvent],
    start: State,
    is_goal: Callable[[State], bool],
    exact_h: Callable[[State], int],
    legal_child: Callable[[State, State], bool],
) -> TraceVerdict:
    counter = itertools.count()
    open_entry: dict[State, tuple[int, int]] = {}
    open_heap: list[tuple[int, int, State, int, int]] = []
    closed: set[State] = set()
    last_closed: Optional[tuple[State, int]] = None

    for index, event in enumerate(events):
        if event.kind == CREATE:
            if last_closed is None:
                # Only the very first event may create without a parent,
                # and it must be the start node.
                if open_entry or event.state != start:
                    return _invalid(TraceErrorClass.INVALID_NEIGHBOR, index)
                expected_g = 0
            else:
                if not legal_child(last_closed[0], event.state):
                    return _invalid(TraceErrorClass.INVALID_NEIGHBOR, index)
                expected_g = last_closed[1] + 1
            if event.state in closed:
                return _invalid(TraceErrorClass.ALREADY_CLOSED, index)
            if event.h != exact_h(event.state):
                return _invalid(TraceErrorClass.INVALID_NEIGHBOR, index)
            current = open_entry.get(event.state)
            if current is None:
                # First creation: the child's cost comes from its parent.
                if event.g != expected_g:
                    return _invalid(TraceErrorClass.INVALID_NEIGHBOR, index)
            elif event.g > current[0]:
                return _invalid(TraceErrorClass.INVALID_NEIGHBOR, index)
            elif event.g < current[0] and event.g != expected_g:
                # Decreases are only legal as a re-creation via the node
                # just closed; equal-g restatements are accepted as-is.
                return _invalid(TraceErrorClass.INVALID_NEIGHBOR, index)
            open_entry[event.state] = (event.g, event.h)
            heapq.heappush(
                open_heap,
                (event.g + event.h, next(counter), event.state, event.g, event.h),
            )
        else:  # close
            entry = open_entry.get(event.state)
            if entry is None or entry != (event.g, event.h):
                return _invalid(TraceErrorClass.NOT_IN_OPEN_LIST, index)
            del open_entry[event.state]
            while open_heap:
                _, _, state, g, h = open_heap[0]
                if open_entry.get(state) == (g, h):
                    break
                heapq.heappop(open_heap)  # stale: closed or superseded
            if open_heap and open_heap[0][0] < event.g + event.h:
                return _invalid(TraceErrorClass.NOT_LOWEST_F, index)
            closed.add(event.state)
            last_closed = (event.state, event.g)
            if is_goal(event.state):
                return TraceVerdict(True)  # later events are ignored

    return _invalid(TraceErrorClass.GOAL_NOT_REACHED, len(events))


def validate_trace(maze: GridMaze, events: Sequence[TraceEvent]) -> TraceVerdict:
    """Replay a maze trace. Created cells must be free neighbors of the last
    closed cell; h claims are checked against the Manhattan heuristic."""
    goal = maze.goal

    def legal_child(parent: State, child: State) -> bool:
        return (
            isinstance(child, Coord)
            and maze.is_free(child)
            and manhattan(parent, child) == 1
        )

    return _replay(
        events,
        maze.start,
        lambda s: s == goal,
        lambda s: manhattan(s, goal),
        legal_child,
    )


def validate_sokoban_trace(
    instance: sk.SokobanInstance, events: Sequence[TraceEvent]
) -> TraceVerdict:
    """Replay a Sokoban trace. A created state must be one push/move away
    from the last closed state; h claims are checked against the assignment
    heuristic."""
    docks = frozenset(instance.docks)

    def legal_child(parent: State, child: State) -> bool:
        return any(
            sk.step(instance, parent, action) == child for action in ACTIONS
        )

    return _replay(
        events,
        sk.start_state(instance),
        lambda s: frozenset(s.boxes) == docks,
        lambda s: sk.heuristic(instance, s),
        legal_child,
    )


def verdict_from_parse(parsed: ParsedResponse) -> Optional[TraceVerdict]:
    """Map a parse failure to a ParsingError verdict at the first unparsed
    event position, or None when the stream parsed cleanly."""
    if parsed.parse_error is None:
        return None
    return _invalid(TraceErrorClass.PARSING_ERROR, len(parsed.events))


Problem = Union[GridMaze, sk.SokobanInstance]


def classify_response(
    problem: Problem, raw_tokens: Sequence[str]
) -> ResponseClassification:
    """Parse a raw response stream and judge plan and trace independently.

    The plan verdict comes from executing the parsed plan against the
    problem (an absent plan is invalid); the trace verdict comes from the
    replay, with parse failures mapped to ParsingError. The two judgments
    never influence each other, which is what populates all four confusion
    matrix cells.
    """
    if isinstance(problem, sk.SokobanInstance):
        parsed = parse_response(raw_tokens, SOKOBAN_DOMAIN)
        plan_valid = (
            parsed.plan is not None
            and sk.execute_plan(problem, parsed.plan).valid
        )
        verdict = verdict_from_parse(parsed)
        if verdict is None:
            verdict = validate_sokoban_trace(problem, parsed.events)
    else:
        parsed = parse_response(raw_tokens, MAZE_DOMAIN)
        plan_valid = (
            parsed.plan is not None and execute_plan(problem, parsed.plan).valid
        )
        verdict = verdict_from_parse(parsed)
        if verdict is None:
            verdict = validate_trace(problem, parsed.events)
    error = verdict.error.kind if verdict.error is not None else None
    return ResponseClassification(plan_valid, verdict.valid, error)
