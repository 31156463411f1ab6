"""
Go rules replay
기보를 19×19 판 위에 다시 두면서 각 수 직전의 판 상태를 만든다.

Ko is not enforced (records are replayed as given). Suicide is tolerated:
the suicided group is taken off the board and a warning is logged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Set, Tuple

from .config import BOARD_SIZE
from .sgf_ingest import Color, GameRecord, Point

logger = logging.getLogger(__name__)

EMPTY = 0

_N = BOARD_SIZE
# 4-neighbour table over flat indices (index = x * 19 + y)
_NEIGHBORS: Tuple[Tuple[int, ...], ...] = tuple(
    tuple((x + dx) * _N + (y + dy)
          for dx, dy in ((-1, 0), (1, 0), (0, -1), (0, 1))
          if 0 <= x + dx < _N and 0 <= y + dy < _N)
    for x in range(_N) for y in range(_N)
)


class OccupiedPoint(ValueError):
    pass


class IllegalPoint(ValueError):
    pass


def on_board(point: Point) -> bool:
    x, y = point
    return 0 <= x < _N and 0 <= y < _N


def _index(point: Point) -> int:
    if not on_board(point):
        raise IllegalPoint(f"{point} is off the {_N}x{_N} board")
    return point[0] * _N + point[1]


class Board:
    """19×19 grid of EMPTY / Color.BLACK / Color.WHITE cells."""

    __slots__ = ("grid",)

    def __init__(self, grid: Optional[List[int]] = None):
        self.grid: List[int] = list(grid) if grid is not None else [EMPTY] * (_N * _N)

    def copy(self) -> "Board":
        return Board(self.grid)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Board) and self.grid == other.grid

    def __repr__(self) -> str:
        return f"Board(stones={self.stone_count()})"

    def get(self, point: Point) -> int:
        return self.grid[_index(point)]

    def place(self, point: Point, color: Color) -> None:
        """Put a stone without any capture logic (setup stones)."""
        self.grid[_index(point)] = int(color)

    def stone_count(self, color: Optional[Color] = None) -> int:
        if color is None:
            return sum(1 for c in self.grid if c != EMPTY)
        return self.grid.count(int(color))

    # ── groups ──
    def _group(self, start: int) -> Tuple[Set[int], Set[int]]:
        color = self.grid[start]
        stones = {start}
        liberties: Set[int] = set()
        stack = [start]
        grid = self.grid
        while stack:
            cur = stack.pop()
            for nb in _NEIGHBORS[cur]:
                c = grid[nb]
                if c == EMPTY:
                    liberties.add(nb)
                elif c == color and nb not in stones:
                    stones.add(nb)
                    stack.append(nb)
        return stones, liberties

    def group_and_liberties(self, point: Point) -> Tuple[Set[Point], Set[Point]]:
        idx = _index(point)
        if self.grid[idx] == EMPTY:
            return set(), set()
        stones, libs = self._group(idx)
        return {divmod(i, _N) for i in stones}, {divmod(i, _N) for i in libs}

    def groups(self, color: Color) -> Iterator[Tuple[Set[int], Set[int]]]:
        """(stones, liberties) as flat-index sets, one pair per `color` group."""
        seen: Set[int] = set()
        for idx, c in enumerate(self.grid):
            if c == color and idx not in seen:
                stones, libs = self._group(idx)
                seen |= stones
                yield stones, libs

    def is_eye(self, point: Point, color: Color) -> bool:
        """Empty point whose on-board orthogonal neighbours are all `color` stones."""
        idx = _index(point)
        return self.grid[idx] == EMPTY and all(self.grid[nb] == color for nb in _NEIGHBORS[idx])

    def is_legal(self, point: Point, color: Color) -> bool:
        """Empty and not suicide. Ko is not considered."""
        idx = _index(point)
        grid = self.grid
        if grid[idx] != EMPTY:
            return False
        opp = int(color.opponent)
        for nb in _NEIGHBORS[idx]:
            c = grid[nb]
            if c == EMPTY:
                return True
            _, libs = self._group(nb)
            if c == opp and len(libs) == 1:
                return True
            if c == color and len(libs) > 1:
                return True
        return False

    # ── moves ──
    def play(self, point: Point, color: Color) -> int:
        """In-place move with captures; returns the number of stones removed."""
        idx = _index(point)
        grid = self.grid
        if grid[idx] != EMPTY:
            raise OccupiedPoint(f"{point} is already occupied")
        grid[idx] = int(color)

        opp = int(color.opponent)
        captured = 0
        seen: Set[int] = set()
        for nb in _NEIGHBORS[idx]:
            if grid[nb] != opp or nb in seen:
                continue
            stones, libs = self._group(nb)
            seen |= stones
            if not libs:
                for s in stones:
                    grid[s] = EMPTY
                captured += len(stones)

        stones, libs = self._group(idx)
        if not libs:
            logger.warning(f"⚠️ suicide at {point} by {color.name}: removing {len(stones)} stone(s)")
            for s in stones:
                grid[s] = EMPTY
            captured += len(stones)
        return captured


def apply_move(board: Board, color: Color, pos: Point) -> Tuple[Board, int]:
    """Functional form of Board.play: the input board is left untouched."""
    nxt = board.copy()
    captured = nxt.play(pos, color)
    return nxt, captured


@dataclass(frozen=True)
class ReplayEvent:
    move_index: int
    color: Color
    position: Point
    board_before: Board


def setup_board(game: GameRecord) -> Board:
    board = Board()
    for p in game.setup_black:
        board.place(p, Color.BLACK)
    for p in game.setup_white:
        board.place(p, Color.WHITE)
    return board


def iter_replay(game: GameRecord) -> Iterator[ReplayEvent]:
    board = setup_board(game)
    for i, move in enumerate(game.moves):
        if move.is_pass:
            continue
        before = board.copy()
        try:
            board.play(move.point, move.color)
        except (OccupiedPoint, IllegalPoint) as e:
            logger.warning(f"{game.source_id}: move {i} ({move.color.name} {move.point}) skipped: {e}")
            continue
        yield ReplayEvent(move_index=i, color=move.color, position=move.point, board_before=before)


def replay(game: GameRecord) -> List[ReplayEvent]:
    return list(iter_replay(game))
