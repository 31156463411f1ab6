"""
3×3 pattern codec
빈 교차점 주변 8칸을 둘 차례 기준(Own/Opponent)으로 읽고,
정사각형의 8가지 대칭으로 묶어 1107개 클래스로 정규화한다.

Cell order is row-major over (dx, dy) offsets without the centre:
(-1,-1) (-1,0) (-1,1) (0,-1) (0,1) (1,-1) (1,0) (1,1).
Encoding is the base-4 number with the first cell as the most significant digit
(Empty=0, Own=1, Opponent=2, OffBoard=3); since every code has 8 digits the
numeric minimum equals the lexicographic minimum of the digit strings.
Colour swap is handled by the mover-relative recolouring, not by an extra
quotient, which is what gives 954 + 135 + 18 = 1107 classes.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import pandas as pd

from .config import BOARD_SIZE, CATALOG_SIZE
from .go_engine import EMPTY, Board
from .sgf_ingest import Color, Point

logger = logging.getLogger(__name__)


class CenterNotEmpty(ValueError):
    pass


class InvalidOffBoardGeometry(ValueError):
    pass


class CatalogMismatch(RuntimeError):
    pass


class Cell(IntEnum):
    EMPTY = 0
    OWN = 1
    OPPONENT = 2
    OFF_BOARD = 3


OFFSETS: Tuple[Tuple[int, int], ...] = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1),           (0, 1),
    (1, -1),  (1, 0),  (1, 1),
)
_OFFSET_INDEX = {off: i for i, off in enumerate(OFFSETS)}

# the 8 symmetries of the square acting on (dx, dy)
_DIHEDRAL = (
    lambda dx, dy: (dx, dy),
    lambda dx, dy: (-dy, dx),
    lambda dx, dy: (-dx, -dy),
    lambda dx, dy: (dy, -dx),
    lambda dx, dy: (dx, -dy),
    lambda dx, dy: (-dx, dy),
    lambda dx, dy: (dy, dx),
    lambda dx, dy: (-dy, -dx),
)
# TRANSFORMS[t][i] = cell index that cell i moves to under transform t
TRANSFORMS: Tuple[Tuple[int, ...], ...] = tuple(
    tuple(_OFFSET_INDEX[f(dx, dy)] for dx, dy in OFFSETS) for f in _DIHEDRAL
)

_SIDES = tuple(
    frozenset(i for i, (dx, dy) in enumerate(OFFSETS) if pred(dx, dy))
    for pred in (lambda dx, dy: dx == -1, lambda dx, dy: dx == 1,
                 lambda dx, dy: dy == -1, lambda dx, dy: dy == 1)
)
EDGE_MASKS = _SIDES
CORNER_MASKS = tuple(a | b for a in _SIDES[:2] for b in _SIDES[2:])
_VALID_OFF_MASKS = frozenset((frozenset(),) + EDGE_MASKS + CORNER_MASKS)


def _geometry_name(n_off: int) -> str:
    return {0: "interior", 3: "edge", 5: "corner"}[n_off]


@dataclass(frozen=True)
class RawPattern:
    cells: Tuple[int, ...]

    def __post_init__(self):
        if len(self.cells) != 8:
            raise ValueError(f"a pattern has 8 cells, got {len(self.cells)}")

    @property
    def off_board(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.cells) if c == Cell.OFF_BOARD)

    @property
    def geometry(self) -> str:
        return _geometry_name(len(self.off_board))

    def is_valid(self) -> bool:
        return self.off_board in _VALID_OFF_MASKS and all(0 <= c <= 3 for c in self.cells)

    def encode(self) -> int:
        code = 0
        for c in self.cells:
            code = code * 4 + int(c)
        return code

    @classmethod
    def decode(cls, code: int) -> "RawPattern":
        cells = []
        for _ in range(8):
            code, d = divmod(code, 4)
            cells.append(d)
        return cls(tuple(reversed(cells)))

    def transform(self, t: int) -> "RawPattern":
        out = [0] * 8
        for i, j in enumerate(TRANSFORMS[t]):
            out[j] = self.cells[i]
        return RawPattern(tuple(out))

    def swap_colors(self) -> "RawPattern":
        swap = {Cell.OWN: Cell.OPPONENT, Cell.OPPONENT: Cell.OWN}
        return RawPattern(tuple(int(swap.get(c, c)) for c in self.cells))


def encoding_string(code: int) -> str:
    return "".join(str(d) for d in RawPattern.decode(code).cells)


def canonical_encoding(raw: RawPattern) -> int:
    if not raw.is_valid():
        raise InvalidOffBoardGeometry(f"off-board cells {sorted(raw.off_board)} are not an edge or a corner")
    return min(raw.transform(t).encode() for t in range(8))


@dataclass(frozen=True)
class PatternCatalog:
    representatives: Tuple[RawPattern, ...]
    lookup: Dict[int, int]          # raw encoding -> class id
    orbit_sizes: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.representatives)

    def geometry_counts(self) -> Dict[str, int]:
        counts = {"interior": 0, "edge": 0, "corner": 0}
        for rep in self.representatives:
            counts[rep.geometry] += 1
        return counts

    def summary(self) -> str:
        c = self.geometry_counts()
        return f"{len(self)} classes ({c['interior']} interior, {c['edge']} edge, {c['corner']} corner)"


def _valid_raws() -> List[RawPattern]:
    raws = []
    for off in sorted(_VALID_OFF_MASKS, key=lambda m: (len(m), sorted(m))):
        free = [i for i in range(8) if i not in off]
        for values in itertools.product((0, 1, 2), repeat=len(free)):
            cells = [int(Cell.OFF_BOARD)] * 8
            for i, v in zip(free, values):
                cells[i] = v
            raws.append(RawPattern(tuple(cells)))
    return raws


def enumerate_catalog() -> PatternCatalog:
    """Group all 7641 geometrically valid raw patterns into dihedral classes."""
    classes: Dict[int, List[int]] = {}
    for raw in _valid_raws():
        classes.setdefault(canonical_encoding(raw), []).append(raw.encode())

    canon = sorted(classes)
    lookup = {code: cid for cid, c in enumerate(canon) for code in classes[c]}
    catalog = PatternCatalog(
        representatives=tuple(RawPattern.decode(c) for c in canon),
        lookup=lookup,
        orbit_sizes=tuple(len(classes[c]) for c in canon),
    )
    logger.debug(f"pattern catalog: {catalog.summary()}")
    return catalog


@lru_cache(maxsize=1)
def get_catalog() -> PatternCatalog:
    catalog = enumerate_catalog()
    if len(catalog) != CATALOG_SIZE:
        raise CatalogMismatch(f"expected {CATALOG_SIZE} classes, built {len(catalog)}")
    return catalog


def canonicalize(raw: RawPattern) -> int:
    if not raw.is_valid():
        raise InvalidOffBoardGeometry(f"off-board cells {sorted(raw.off_board)} are not an edge or a corner")
    return get_catalog().lookup[raw.encode()]


def representative(pattern_id: int) -> RawPattern:
    return get_catalog().representatives[pattern_id]


# ─────────────────────────────────────────────────────────────
# 판에서 패턴 읽기
# ─────────────────────────────────────────────────────────────
_N = BOARD_SIZE
# per board point: flat index of each of the 8 cells, or -1 when off board
_CELL_INDEX: Tuple[Tuple[int, ...], ...] = tuple(
    tuple((x + dx) * _N + (y + dy) if 0 <= x + dx < _N and 0 <= y + dy < _N else -1
          for dx, dy in OFFSETS)
    for x in range(_N) for y in range(_N)
)


def _encode_at(grid: Sequence[int], idx: int, mover: int) -> int:
    code = 0
    for cell in _CELL_INDEX[idx]:
        if cell < 0:
            d = 3
        else:
            c = grid[cell]
            d = 0 if c == EMPTY else (1 if c == mover else 2)
        code = code * 4 + d
    return code


def _center_index(board: Board, pos: Point) -> int:
    x, y = pos
    if not (0 <= x < _N and 0 <= y < _N):
        raise ValueError(f"{pos} is off the board")
    idx = x * _N + y
    if board.grid[idx] != EMPTY:
        raise CenterNotEmpty(f"{pos} is occupied")
    return idx


def extract_pattern(board: Board, pos: Point, mover: Color) -> RawPattern:
    idx = _center_index(board, pos)
    return RawPattern.decode(_encode_at(board.grid, idx, int(mover)))


def pattern_id(board: Board, pos: Point, mover: Color) -> int:
    """extract_pattern + canonicalize without building the intermediate object."""
    idx = _center_index(board, pos)
    return get_catalog().lookup[_encode_at(board.grid, idx, int(mover))]


# ─────────────────────────────────────────────────────────────
# 출력
# ─────────────────────────────────────────────────────────────
_GLYPHS = {Cell.EMPTY: ".", Cell.OWN: "X", Cell.OPPONENT: "O", Cell.OFF_BOARD: "#"}


def render_ascii(raw: RawPattern) -> str:
    """Black plays at the cross: X = mover's stones, O = opponent, # = off board."""
    rows = []
    for dy in (-1, 0, 1):
        row = []
        for dx in (-1, 0, 1):
            if (dx, dy) == (0, 0):
                row.append("+")
            else:
                row.append(_GLYPHS[Cell(raw.cells[_OFFSET_INDEX[(dx, dy)]])])
        rows.append("".join(row))
    return "\n".join(rows)


def catalog_frame(catalog: PatternCatalog) -> pd.DataFrame:
    return pd.DataFrame({
        "id": range(len(catalog)),
        "encoding": [encoding_string(r.encode()) for r in catalog.representatives],
        "geometry": [r.geometry for r in catalog.representatives],
        "orbit_size": list(catalog.orbit_sizes),
    })


def export_catalog(catalog: PatternCatalog, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    catalog_frame(catalog).to_csv(path, index=False, lineterminator="\n")
    return path
