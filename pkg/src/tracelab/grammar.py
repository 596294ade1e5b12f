"""The token grammar: serializing problems, traces and plans, and parsing
model output streams back into events and plans.

Samples are single lines of space-separated tokens. The maze vocabulary is
exactly 14 word tokens + 30 coordinate tokens + 900 cost tokens = 944; the
Sokoban vocabulary adds ``worker``, ``box`` and ``dock``. ``parse_response``
is total: it never raises on model output, it reports the longest valid
prefix plus a positioned error instead. The exact grammar is documented as
EBNF in docs/formats.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import EncodingError, InputError
from .grid import Action, Coord, GridMaze, Plan
from .search import CLOSE, CREATE, TraceEvent
from .sokoban import SokobanInstance, SokobanState, make_state

GRAMMAR_VERSION = "tracelab-1"

MAZE_DOMAIN = "maze"
SOKOBAN_DOMAIN = "sokoban"

MAZE_WORDS = (
    "create", "close", "wall", "start", "goal", "plan", "trace",
    "up", "down", "left", "right", "bos", "eos", "pad",
)
SOKOBAN_WORDS = MAZE_WORDS + ("worker", "box", "dock")

COORD_LIMIT = 30
COST_LIMIT = 900

_COORD_TOKENS = {str(i): i for i in range(COORD_LIMIT)}
_COST_TOKENS = {f"c{i}": i for i in range(COST_LIMIT)}

ACTION_TOKEN = {
    Action.UP: "up",
    Action.DOWN: "down",
    Action.LEFT: "left",
    Action.RIGHT: "right",
}
TOKEN_ACTION = {tok: act for act, tok in ACTION_TOKEN.items()}


@dataclass(frozen=True)
class Vocabulary:
    """The closed token set for one domain."""

    domain: str = MAZE_DOMAIN

    @property
    def words(self) -> tuple[str, ...]:
        return MAZE_WORDS if self.domain == MAZE_DOMAIN else SOKOBAN_WORDS

    @property
    def tokens(self) -> tuple[str, ...]:
        return (
            self.words
            + tuple(str(i) for i in range(COORD_LIMIT))
            + tuple(f"c{i}" for i in range(COST_LIMIT))
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return (
            token in self.words or token in _COORD_TOKENS or token in _COST_TOKENS
        )


class ParseIssue(NamedTuple):
    position: int  # token index the parser choked on (stream length if truncated)
    expected: str
    found: str


class ParsedResponse(NamedTuple):
    events: tuple[TraceEvent, ...]
    plan: Optional[Plan]
    parse_error: Optional[ParseIssue]


def _coord_token(value: int) -> str:
    if not 0 <= value < COORD_LIMIT:
        raise EncodingError(f"coordinate {value} outside token range 0..{COORD_LIMIT - 1}")
    return str(value)


def _cost_token(value: int) -> str:
    if not 0 <= value < COST_LIMIT:
        raise EncodingError(f"cost {value} outside token range 0..{COST_LIMIT - 1}")
    return f"c{value}"


def _sorted_walls(walls: Iterable[Coord]) -> list[Coord]:
    return sorted(walls, key=lambda c: (c.y, c.x))  # row-major


def encode_problem(maze: GridMaze) -> list[str]:
    """``bos start X Y goal X Y (wall X Y)* trace``, walls row-major."""
    tokens = ["bos", "start", _coord_token(maze.start.x), _coord_token(maze.start.y),
              "goal", _coord_token(maze.goal.x), _coord_token(maze.goal.y)]
    for wall in _sorted_walls(maze.walls):
        tokens += ["wall", _coord_token(wall.x), _coord_token(wall.y)]
    tokens.append("trace")
    return tokens


def encode_sokoban_problem(instance: SokobanInstance) -> list[str]:
    """``bos worker X Y (box X Y){2} (dock X Y){2} (wall X Y)* trace``."""
    tokens = ["bos", "worker", _coord_token(instance.worker_start.x),
              _coord_token(instance.worker_start.y)]
    for box in sorted(instance.boxes_start):
        tokens += ["box", _coord_token(box.x), _coord_token(box.y)]
    for dock in sorted(instance.docks):
        tokens += ["dock", _coord_token(dock.x), _coord_token(dock.y)]
    for wall in _sorted_walls(instance.walls):
        tokens += ["wall", _coord_token(wall.x), _coord_token(wall.y)]
    tokens.append("trace")
    return tokens


def encode_trace(events: Sequence[TraceEvent]) -> list[str]:
    """One ``create|close`` clause per event; Sokoban payloads carry the
    worker and both boxes in sorted order."""
    tokens: list[str] = []
    for event in events:
        tokens.append(event.kind)
        state = event.state
        if isinstance(state, SokobanState):
            tokens += ["worker", _coord_token(state.worker.x), _coord_token(state.worker.y)]
            for box in sorted(state.boxes):
                tokens += ["box", _coord_token(box.x), _coord_token(box.y)]
        else:
            tokens += [_coord_token(state.x), _coord_token(state.y)]
        tokens += [_cost_token(event.g), _cost_token(event.h)]
    return tokens


def encode_plan(plan: Sequence[Action]) -> list[str]:
    return ["plan"] + [ACTION_TOKEN[a] for a in plan] + ["eos"]


# -- parsing ------------------------------------------------------------------


def _take_coord(tokens: Sequence[str], i: int) -> tuple[int, Optional[ParseIssue]]:
    if i >= len(tokens):
        return 0, ParseIssue(len(tokens), "coordinate", "end of stream")
    value = _COORD_TOKENS.get(tokens[i])
    if value is None:
        return 0, ParseIssue(i, "coordinate", tokens[i])
    return value, None


def _take_cost(tokens: Sequence[str], i: int) -> tuple[int, Optional[ParseIssue]]:
    if i >= len(tokens):
        return 0, ParseIssue(len(tokens), "cost", "end of stream")
    value = _COST_TOKENS.get(tokens[i])
    if value is None:
        return 0, ParseIssue(i, "cost", tokens[i])
    return value, None


def _take_word(tokens: Sequence[str], i: int, word: str) -> Optional[ParseIssue]:
    if i >= len(tokens):
        return ParseIssue(len(tokens), word, "end of stream")
    if tokens[i] != word:
        return ParseIssue(i, word, tokens[i])
    return None


def _parse_event(
    tokens: Sequence[str], i: int, end: int, domain: str
) -> tuple[Optional[TraceEvent], int, Optional[ParseIssue]]:
    """Parse one event clause starting at ``i``; region tokens beyond ``end``
    belong to the plan section and read as end-of-stream here."""
    region = tokens[:end]
    kind = tokens[i]
    if kind not in (CREATE, CLOSE):
        return None, i, ParseIssue(i, "create or close", kind)
    j = i + 1
    if domain == SOKOBAN_DOMAIN:
        issue = _take_word(region, j, "worker")
        if issue:
            return None, j, issue
        wx, issue = _take_coord(region, j + 1)
        if issue:
            return None, j, issue
        wy, issue = _take_coord(region, j + 2)
        if issue:
            return None, j, issue
        j += 3
        boxes = []
        for _ in range(2):
            issue = _take_word(region, j, "box")
            if issue:
                return None, j, issue
            bx, issue = _take_coord(region, j + 1)
            if issue:
                return None, j, issue
            by, issue = _take_coord(region, j + 2)
            if issue:
                return None, j, issue
            boxes.append(Coord(bx, by))
            j += 3
        state: object = make_state(Coord(wx, wy), boxes)
    else:
        x, issue = _take_coord(region, j)
        if issue:
            return None, j, issue
        y, issue = _take_coord(region, j + 1)
        if issue:
            return None, j, issue
        j += 2
        state = Coord(x, y)
    g, issue = _take_cost(region, j)
    if issue:
        return None, j, issue
    h, issue = _take_cost(region, j + 1)
    if issue:
        return None, j, issue
    return TraceEvent(kind, state, g, h), j + 2, None


def parse_response(tokens: Sequence[str], domain: str = MAZE_DOMAIN) -> ParsedResponse:
    """Longest-prefix parse of ``event* plan action* eos``.

    Total over arbitrary token streams. The plan section anchors on the
    first ``plan`` token so that a mangled trace section never hides the
    plan; tokens after ``eos`` are ignored. The reported error is the
    earliest malformed position.
    """
    tokens = list(tokens)
    plan_idx = tokens.index("plan") if "plan" in tokens else None
    event_end = plan_idx if plan_idx is not None else len(tokens)

    events: list[TraceEvent] = []
    error: Optional[ParseIssue] = None
    i = 0
    while i < event_end:
        event, i, error = _parse_event(tokens, i, event_end, domain)
        if error is not None:
            # Events reflect the longest valid prefix.
            if error.position >= event_end and plan_idx is not None:
                error = ParseIssue(plan_idx, error.expected, "plan")
            break
        events.append(event)

    plan: Optional[Plan] = None
    if plan_idx is not None:
        actions = []
        j = plan_idx + 1
        while j < len(tokens) and tokens[j] in TOKEN_ACTION:
            actions.append(TOKEN_ACTION[tokens[j]])
            j += 1
        plan = tuple(actions)
        plan_issue = _take_word(tokens, j, "eos")
        if plan_issue is not None and error is None:
            error = ParseIssue(plan_issue.position, "action or eos", plan_issue.found)
    return ParsedResponse(tuple(events), plan, error)


def parse_problem(tokens: Sequence[str], width: int, height: int) -> GridMaze:
    """Inverse of encode_problem. Raises InputError on malformed input."""
    t = list(tokens)
    if len(t) < 8 or t[0] != "bos" or t[1] != "start" or t[4] != "goal":
        raise InputError("malformed problem header")
    try:
        start = Coord(_COORD_TOKENS[t[2]], _COORD_TOKENS[t[3]])
        goal = Coord(_COORD_TOKENS[t[5]], _COORD_TOKENS[t[6]])
        walls = []
        i = 7
        while i < len(t) and t[i] == "wall":
            walls.append(Coord(_COORD_TOKENS[t[i + 1]], _COORD_TOKENS[t[i + 2]]))
            i += 3
    except (KeyError, IndexError) as exc:
        raise InputError("malformed problem body") from exc
    if i >= len(t) or t[i] != "trace" or i != len(t) - 1:
        raise InputError("problem must end with a single trace delimiter")
    return GridMaze(width, height, frozenset(walls), start, goal)


def parse_sokoban_problem(tokens: Sequence[str]) -> SokobanInstance:
    """Inverse of encode_sokoban_problem. Raises InputError when malformed."""
    t = list(tokens)
    try:
        if t[0] != "bos" or t[1] != "worker":
            raise InputError("malformed problem header")
        worker = Coord(_COORD_TOKENS[t[2]], _COORD_TOKENS[t[3]])
        i = 4
        boxes, docks, walls = [], [], []
        for kind, sink in (("box", boxes), ("dock", docks)):
            for _ in range(2):
                if t[i] != kind:
                    raise InputError(f"expected {kind} at token {i}")
                sink.append(Coord(_COORD_TOKENS[t[i + 1]], _COORD_TOKENS[t[i + 2]]))
                i += 3
        while i < len(t) and t[i] == "wall":
            walls.append(Coord(_COORD_TOKENS[t[i + 1]], _COORD_TOKENS[t[i + 2]]))
            i += 3
    except (KeyError, IndexError) as exc:
        raise InputError("malformed problem body") from exc
    if i >= len(t) or t[i] != "trace" or i != len(t) - 1:
        raise InputError("problem must end with a single trace delimiter")
    return SokobanInstance(
        walls=frozenset(walls),
        docks=tuple(docks),
        boxes_start=tuple(boxes),
        worker_start=worker,
    )


def to_line(tokens: Sequence[str]) -> str:
    return " ".join(tokens)


def from_line(line: str) -> list[str]:
    return line.split()
