"""The five problem-instance generators, each deterministic under a seed.

Wilson, Kruskal and randomized DFS sample spanning trees of a passage
lattice: an even-sized W x H grid hosts a (W/2) x (H/2) lattice whose nodes
sit at even cell coordinates, carved edges occupy the odd cell between two
nodes, and the final row and column are padded with walls. Drunkard's walk
and the rejection-sampling generator carve directly on the cell grid and
permit cycles.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .errors import ConfigError, DomainError, GenerationError
from .grid import ACTIONS, Coord, GridMaze
from .seeds import derive_seed


class GeneratorKind(Enum):
    WILSON = "wilson"
    KRUSKAL = "kruskal"
    RANDOMIZED_DFS = "dfs"
    DRUNKARD = "drunkard"
    SEARCHFORMER_STYLE = "searchformer"


@dataclass(frozen=True)
class GeneratorConfig:
    kind: GeneratorKind
    width: int = 30
    height: int = 30
    seed: int = 0
    drunkard_floor_fraction: float = 0.4
    sf_min_wall_fraction: float = 0.30
    sf_max_wall_fraction: float = 0.50
    sf_min_plan_length: int = 8

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ConfigError(f"grid {self.width}x{self.height} too small")
        if not 0.0 < self.drunkard_floor_fraction <= 1.0:
            raise ConfigError(
                f"drunkard floor fraction {self.drunkard_floor_fraction} not in (0, 1]"
            )
        if not 0.0 < self.sf_min_wall_fraction <= self.sf_max_wall_fraction < 1.0:
            raise ConfigError("wall fractions must satisfy 0 < min <= max < 1")
        if self.sf_min_plan_length < 1:
            raise ConfigError("minimum plan length must be positive")


# -- spanning-tree generators on the passage lattice -------------------------


def _lattice_dims(cfg: GeneratorConfig) -> tuple[int, int]:
    if cfg.width < 4 or cfg.height < 4 or cfg.width % 2 or cfg.height % 2:
        raise ConfigError(
            f"{cfg.width}x{cfg.height} cannot embed a passage lattice; "
            "dimensions must be even and at least 4x4"
        )
    return cfg.width // 2, cfg.height // 2


def _lattice_neighbors(node: tuple[int, int], lw: int, lh: int) -> list[tuple[int, int]]:
    i, j = node
    out = []
    for di, dj in ((0, 1), (0, -1), (-1, 0), (1, 0)):
        ni, nj = i + di, j + dj
        if 0 <= ni < lw and 0 <= nj < lh:
            out.append((ni, nj))
    return out


def _embed_tree(
    cfg: GeneratorConfig,
    edges: Iterable[tuple[tuple[int, int], tuple[int, int]]],
) -> frozenset[Coord]:
    """Map lattice nodes and carved edges onto cells; everything else is wall."""
    lw, lh = _lattice_dims(cfg)
    free = {(2 * i, 2 * j) for i in range(lw) for j in range(lh)}
    for (i1, j1), (i2, j2) in edges:
        free.add((i1 + i2, j1 + j2))
    return frozenset(
        Coord(x, y)
        for y in range(cfg.height)
        for x in range(cfg.width)
        if (x, y) not in free
    )


def _finish(cfg: GeneratorConfig, walls: frozenset[Coord]) -> GridMaze:
    start, goal = sample_start_goal(
        walls, cfg.width, cfg.height, derive_seed(cfg.seed, "start-goal")
    )
    return GridMaze(cfg.width, cfg.height, walls, start, goal)


def gen_wilson(cfg: GeneratorConfig) -> GridMaze:
    """Uniform spanning tree via loop-erased random walks."""
    lw, lh = _lattice_dims(cfg)
    rng = random.Random(cfg.seed)
    nodes = [(i, j) for j in range(lh) for i in range(lw)]
    in_tree = {rng.choice(nodes)}
    edges = []
    for node in nodes:
        if node in in_tree:
            continue
        hop: dict[tuple[int, int], tuple[int, int]] = {}
        cur = node
        while cur not in in_tree:
            nxt = rng.choice(_lattice_neighbors(cur, lw, lh))
            hop[cur] = nxt  # revisits overwrite: this is the loop erasure
            cur = nxt
        cur = node
        while cur not in in_tree:
            in_tree.add(cur)
            edges.append((cur, hop[cur]))
            cur = hop[cur]
    return _finish(cfg, _embed_tree(cfg, edges))


class _UnionFind:
    def __init__(self, items: Iterable[tuple[int, int]]):
        self.parent = {item: item for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def gen_kruskal(cfg: GeneratorConfig) -> GridMaze:
    """Spanning tree from a shuffled edge list and a union-find structure."""
    lw, lh = _lattice_dims(cfg)
    rng = random.Random(cfg.seed)
    nodes = [(i, j) for j in range(lh) for i in range(lw)]
    candidates = [((i, j), (i + 1, j)) for j in range(lh) for i in range(lw - 1)]
    candidates += [((i, j), (i, j + 1)) for j in range(lh - 1) for i in range(lw)]
    rng.shuffle(candidates)
    uf = _UnionFind(nodes)
    edges = [edge for edge in candidates if uf.union(*edge)]
    return _finish(cfg, _embed_tree(cfg, edges))


def gen_dfs(cfg: GeneratorConfig) -> GridMaze:
    """Recursive-backtracker spanning tree (iterative, seeded)."""
    lw, lh = _lattice_dims(cfg)
    rng = random.Random(cfg.seed)
    root = (rng.randrange(lw), rng.randrange(lh))
    visited = {root}
    stack = [root]
    edges = []
    while stack:
        cur = stack[-1]
        fresh = [n for n in _lattice_neighbors(cur, lw, lh) if n not in visited]
        if not fresh:
            stack.pop()
            continue
        nxt = rng.choice(fresh)
        visited.add(nxt)
        edges.append((cur, nxt))
        stack.append(nxt)
    return _finish(cfg, _embed_tree(cfg, edges))


# -- cave generators on the raw cell grid ------------------------------------


def gen_drunkard(cfg: GeneratorConfig) -> GridMaze:
    """Random walk over an all-wall grid, carving every visited cell until
    the floor count reaches the configured fraction of the grid."""
    rng = random.Random(cfg.seed)
    target = cfg.drunkard_floor_fraction * cfg.width * cfg.height
    cur = Coord(rng.randrange(cfg.width), rng.randrange(cfg.height))
    floors = {cur}
    while len(floors) < target:
        moves = []
        for action in ACTIONS:
            n = action.apply(cur)
            if 0 <= n.x < cfg.width and 0 <= n.y < cfg.height:
                moves.append(n)
        cur = rng.choice(moves)
        floors.add(cur)
    walls = frozenset(
        Coord(x, y)
        for y in range(cfg.height)
        for x in range(cfg.width)
        if (x, y) not in floors
    )
    return _finish(cfg, walls)


def layout_digest(walls: Iterable[Coord], start: Coord, goal: Coord) -> str:
    """Content hash of a maze layout, used for session deduplication."""
    text = repr((sorted(walls), tuple(start), tuple(goal)))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def gen_searchformer_style(
    cfg: GeneratorConfig,
    session: Optional[set[str]] = None,
    max_attempts: int = 10_000,
) -> GridMaze:
    """Rejection sampling: a random 30-50% of cells become walls, start and
    goal are drawn inside the loop, and unsolvable, too-easy (optimal plan
    shorter than ``sf_min_plan_length``) or session-duplicate layouts are
    resampled."""
    from .search import bfs_shortest_path

    rng = random.Random(cfg.seed)
    cells = [Coord(x, y) for y in range(cfg.height) for x in range(cfg.width)]
    total = cfg.width * cfg.height
    for _ in range(max_attempts):
        fraction = rng.uniform(cfg.sf_min_wall_fraction, cfg.sf_max_wall_fraction)
        walls = frozenset(rng.sample(cells, round(fraction * total)))
        free = [c for c in cells if c not in walls]
        if len(free) < 2:
            continue
        start, goal = rng.sample(free, 2)
        maze = GridMaze(cfg.width, cfg.height, walls, start, goal)
        distance = bfs_shortest_path(maze)
        if distance is None or distance < cfg.sf_min_plan_length:
            continue
        if session is not None:
            key = layout_digest(walls, start, goal)
            if key in session:
                continue
            session.add(key)
        return maze
    raise GenerationError(f"no acceptable instance within {max_attempts} attempts")


def generate(cfg: GeneratorConfig, session: Optional[set[str]] = None) -> GridMaze:
    """Dispatch on the configured generator kind."""
    if cfg.kind is GeneratorKind.WILSON:
        return gen_wilson(cfg)
    if cfg.kind is GeneratorKind.KRUSKAL:
        return gen_kruskal(cfg)
    if cfg.kind is GeneratorKind.RANDOMIZED_DFS:
        return gen_dfs(cfg)
    if cfg.kind is GeneratorKind.DRUNKARD:
        return gen_drunkard(cfg)
    if cfg.kind is GeneratorKind.SEARCHFORMER_STYLE:
        return gen_searchformer_style(cfg, session=session)
    raise ConfigError(f"unknown generator kind {cfg.kind!r}")


def sample_start_goal(
    walls: Iterable[Coord], width: int, height: int, seed: int
) -> tuple[Coord, Coord]:
    """Draw a (start, goal) pair of distinct free cells with goal reachable
    from start, deterministically per seed."""
    wall_set = set(walls)
    free = [
        Coord(x, y)
        for y in range(height)
        for x in range(width)
        if (x, y) not in wall_set
    ]
    component: dict[Coord, int] = {}
    sizes: dict[int, int] = {}
    for cell in free:
        if cell in component:
            continue
        label = len(sizes)
        queue = deque([cell])
        component[cell] = label
        count = 0
        while queue:
            cur = queue.popleft()
            count += 1
            for action in ACTIONS:
                n = action.apply(cur)
                if (
                    0 <= n.x < width
                    and 0 <= n.y < height
                    and n not in wall_set
                    and n not in component
                ):
                    component[n] = label
                    queue.append(n)
        sizes[label] = count
    eligible = [c for c in free if sizes[component[c]] >= 2]
    if not eligible:
        raise DomainError("no two connected free cells to place start and goal")
    rng = random.Random(seed)
    start = rng.choice(eligible)
    mates = [c for c in eligible if component[c] == component[start] and c != start]
    goal = rng.choice(mates)
    return start, goal
