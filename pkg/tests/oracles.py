"""Independent oracles for the test suite.

Everything here deliberately avoids the library's search and generator code
paths: connectivity via flood fill, tree structure via union-find over the
embedded lattice, Sokoban distances via exhaustive breadth-first search over
the full state graph.
"""

from __future__ import annotations

from collections import deque

from tracelab.grid import Coord, GridMaze
from tracelab.sokoban import SokobanInstance, SokobanState

_STEPS = ((0, 1), (0, -1), (-1, 0), (1, 0))


def free_cells(maze: GridMaze) -> list[Coord]:
    return [
        Coord(x, y)
        for y in range(maze.height)
        for x in range(maze.width)
        if (x, y) not in maze.walls
    ]


def flood_fill_connected(maze: GridMaze) -> bool:
    """True iff every free cell is reachable from every other."""
    cells = free_cells(maze)
    if not cells:
        return True
    seen = {cells[0]}
    queue = deque([cells[0]])
    while queue:
        x, y = queue.popleft()
        for dx, dy in _STEPS:
            n = Coord(x + dx, y + dy)
            if maze.is_free(n) and n not in seen:
                seen.add(n)
                queue.append(n)
    return len(seen) == len(cells)


def free_edge_count(maze: GridMaze) -> int:
    """Number of adjacent free-cell pairs (each undirected edge once)."""
    count = 0
    for cell in free_cells(maze):
        for dx, dy in ((1, 0), (0, 1)):
            if maze.is_free(Coord(cell.x + dx, cell.y + dy)):
                count += 1
    return count


def has_cycle(maze: GridMaze) -> bool:
    """A connected free-cell graph has a cycle iff E > V - 1; for possibly
    disconnected graphs, union-find detects a redundant edge."""
    parent = {c: c for c in free_cells(maze)}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for cell in list(parent):
        for dx, dy in ((1, 0), (0, 1)):
            n = Coord(cell.x + dx, cell.y + dy)
            if maze.is_free(n):
                ra, rb = find(cell), find(n)
                if ra == rb:
                    return True
                parent[ra] = rb
    return False


def lattice_tree_check(maze: GridMaze) -> tuple[bool, str]:
    """Union-find spanning-tree oracle for lattice-embedded mazes.

    Free cells must be lattice nodes (even, even) or edge cells between two
    nodes; edges must connect all nodes without ever joining two already
    connected components (exactly V - 1 edges, no cycles).
    """
    nodes = []
    edges = []
    for cell in free_cells(maze):
        ex, ey = cell.x % 2, cell.y % 2
        if ex == 0 and ey == 0:
            nodes.append(cell)
        elif ex + ey == 1:
            if ex == 1:
                edges.append((Coord(cell.x - 1, cell.y), Coord(cell.x + 1, cell.y)))
            else:
                edges.append((Coord(cell.x, cell.y - 1), Coord(cell.x, cell.y + 1)))
        else:
            return False, f"free cell at odd-odd position {cell}"

    node_set = set(nodes)
    parent = {n: n for n in nodes}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for a, b in edges:
        if a not in node_set or b not in node_set:
            return False, f"edge cell between non-nodes {a}-{b}"
        ra, rb = find(a), find(b)
        if ra == rb:
            return False, f"cycle via edge {a}-{b}"
        parent[ra] = rb

    if len(edges) != len(nodes) - 1:
        return False, f"{len(edges)} edges for {len(nodes)} nodes"
    roots = {find(n) for n in nodes}
    if len(roots) != 1:
        return False, f"{len(roots)} components"
    return True, "ok"


def dead_end_count(maze: GridMaze) -> int:
    """Free cells with exactly one free neighbor."""
    count = 0
    for cell in free_cells(maze):
        degree = sum(
            1 for dx, dy in _STEPS if maze.is_free(Coord(cell.x + dx, cell.y + dy))
        )
        if degree == 1:
            count += 1
    return count


# -- Sokoban ------------------------------------------------------------------


def sokoban_all_states(instance: SokobanInstance) -> list[SokobanState]:
    """Every syntactically legal state: worker and two distinct boxes on
    free cells, worker not on a box. Box pairs in canonical sorted order."""
    cells = sorted(instance.free_cells())
    states = []
    for i, b1 in enumerate(cells):
        for b2 in cells[i + 1:]:
            for worker in cells:
                if worker not in (b1, b2):
                    states.append(SokobanState(worker, (b1, b2)))
    return states


def _sokoban_moves(instance: SokobanInstance, state: SokobanState):
    for dx, dy in _STEPS:
        target = Coord(state.worker.x + dx, state.worker.y + dy)
        if not instance.is_free(target):
            continue
        if target not in state.boxes:
            yield SokobanState(target, state.boxes)
            continue
        beyond = Coord(target.x + dx, target.y + dy)
        if instance.is_free(beyond) and beyond not in state.boxes:
            boxes = tuple(sorted(beyond if b == target else b for b in state.boxes))
            yield SokobanState(target, boxes)


def sokoban_true_distances(instance: SokobanInstance) -> dict[SokobanState, int]:
    """Exact cost-to-go for every state that can still reach a goal state,
    by backward BFS over the full state graph."""
    states = sokoban_all_states(instance)
    reverse: dict[SokobanState, list[SokobanState]] = {s: [] for s in states}
    for state in states:
        for nxt in _sokoban_moves(instance, state):
            reverse[nxt].append(state)

    docks = frozenset(instance.docks)
    dist: dict[SokobanState, int] = {}
    queue = deque()
    for state in states:
        if frozenset(state.boxes) == docks:
            dist[state] = 0
            queue.append(state)
    while queue:
        state = queue.popleft()
        for prev in reverse[state]:
            if prev not in dist:
                dist[prev] = dist[state] + 1
                queue.append(prev)
    return dist


def sokoban_bfs_plan_length(instance: SokobanInstance) -> int | None:
    """Forward BFS over (worker, boxes) states: optimal plan length."""
    from tracelab.sokoban import start_state

    docks = frozenset(instance.docks)
    start = start_state(instance)
    if frozenset(start.boxes) == docks:
        return 0
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        state, d = queue.popleft()
        for nxt in _sokoban_moves(instance, state):
            if nxt in seen:
                continue
            if frozenset(nxt.boxes) == docks:
                return d + 1
            seen.add(nxt)
            queue.append((nxt, d + 1))
    return None
