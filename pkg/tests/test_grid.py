import pytest
from hypothesis import given, strategies as st

from tracelab.errors import DomainError
from tracelab.grid import (
    Action,
    Coord,
    GridMaze,
    execute_plan,
    manhattan,
    neighbors,
    path_to_plan,
)

UP, DOWN, LEFT, RIGHT = Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT


def open_maze(width=3, height=3, walls=(), start=(0, 0), goal=None):
    if goal is None:
        goal = (width - 1, height - 1)
    return GridMaze(
        width,
        height,
        frozenset(Coord(*w) for w in walls),
        Coord(*start),
        Coord(*goal),
    )


class TestMazeInvariants:
    def test_start_must_differ_from_goal(self):
        with pytest.raises(DomainError):
            open_maze(start=(0, 0), goal=(0, 0))

    def test_start_cannot_be_wall(self):
        with pytest.raises(DomainError):
            open_maze(walls=[(0, 0)])

    def test_wall_must_be_in_bounds(self):
        with pytest.raises(DomainError):
            open_maze(walls=[(5, 5)])


class TestManhattan:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            ((0, 0), (3, 4), 7),
            ((5, 5), (5, 5), 0),
            ((29, 0), (0, 29), 58),
        ],
    )
    def test_cases(self, a, b, expected):
        assert manhattan(Coord(*a), Coord(*b)) == expected

    @given(st.integers(0, 29), st.integers(0, 29), st.integers(0, 29), st.integers(0, 29))
    def test_symmetric_and_nonnegative(self, ax, ay, bx, by):
        a, b = Coord(ax, ay), Coord(bx, by)
        assert manhattan(a, b) == manhattan(b, a) >= 0
        assert (manhattan(a, b) == 0) == (a == b)


class TestNeighbors:
    def test_all_four_free_in_fixed_order(self):
        maze = open_maze()
        assert neighbors(maze, Coord(1, 1)) == [
            Coord(1, 2), Coord(1, 0), Coord(0, 1), Coord(2, 1),
        ]

    def test_wall_removes_neighbor(self):
        maze = open_maze(walls=[(1, 2)])
        assert neighbors(maze, Coord(1, 1)) == [Coord(1, 0), Coord(0, 1), Coord(2, 1)]

    def test_corner_clipped(self):
        maze = open_maze()
        assert neighbors(maze, Coord(0, 0)) == [Coord(0, 1), Coord(1, 0)]

    def test_out_of_bounds_rejected(self):
        with pytest.raises(DomainError):
            neighbors(open_maze(), Coord(3, 0))

    @given(st.data())
    def test_count_and_distance(self, data):
        width, height = 6, 6
        cells = [Coord(x, y) for x in range(width) for y in range(height)]
        walls = data.draw(st.frozensets(st.sampled_from(cells), max_size=20))
        free = [c for c in cells if c not in walls]
        if len(free) < 2:
            return
        maze = GridMaze(width, height, frozenset(walls), free[0], free[1])
        c = data.draw(st.sampled_from(cells))
        result = neighbors(maze, c)
        assert 0 <= len(result) <= 4
        assert all(manhattan(c, n) == 1 for n in result)
        assert all(maze.is_free(n) for n in result)


class TestExecutePlan:
    def corridor(self):
        # 1-wide corridor from (0,0) up to (0,2); (1,1) is a wall.
        return open_maze(width=2, height=3, walls=[(1, 1)], start=(0, 0), goal=(0, 2))

    def test_straight_corridor_valid(self):
        verdict = execute_plan(self.corridor(), (UP, UP))
        assert verdict.valid and verdict.failure is None

    def test_step_into_wall(self):
        verdict = execute_plan(self.corridor(), (UP, RIGHT))
        assert not verdict.valid
        assert verdict.failure.step == 1
        assert verdict.failure.reason == "hit_wall"

    def test_extra_action_off_goal(self):
        maze = open_maze(width=2, height=3, start=(0, 0), goal=(0, 2))
        verdict = execute_plan(maze, (UP, UP, RIGHT))
        assert not verdict.valid
        assert verdict.failure.reason == "off_goal"
        assert verdict.failure.step == 3

    def test_out_of_bounds(self):
        verdict = execute_plan(self.corridor(), (DOWN,))
        assert not verdict.valid
        assert verdict.failure.reason == "out_of_bounds"
        assert verdict.failure.step == 0

    def test_empty_plan_never_valid(self):
        # start != goal is a maze invariant, so the empty plan ends off goal.
        verdict = execute_plan(self.corridor(), ())
        assert not verdict.valid
        assert verdict.failure.reason == "off_goal"

    def test_valid_plan_at_least_manhattan(self):
        maze = self.corridor()
        plan = (UP, UP)
        assert execute_plan(maze, plan).valid
        assert len(plan) >= manhattan(maze.start, maze.goal)


class TestPathToPlan:
    def test_round_trip(self):
        path = [Coord(0, 0), Coord(0, 1), Coord(1, 1), Coord(1, 0)]
        assert path_to_plan(path) == (UP, RIGHT, DOWN)

    def test_non_adjacent_rejected(self):
        with pytest.raises(DomainError):
            path_to_plan([Coord(0, 0), Coord(2, 0)])
