"""
SGF ingestion
SGF 기보 파일을 GameRecord 로 변환하는 모듈 (메인 변화도만 따라간다)

Coordinates are (x, y) with x = column letter index and y = row letter index,
both counted from "a" = 0, so "pd" is (15, 3). sgfmill does the grammar work
(escapes, collections, the "tt" pass convention); this module only maps its
(row-from-bottom, col) points back onto letter indices.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from sgfmill import sgf, sgf_grammar

from .config import BOARD_SIZE, PARALLEL_MAX_WORKERS

logger = logging.getLogger(__name__)

Point = Tuple[int, int]


class SgfError(ValueError):
    """Base class for per-game SGF problems."""


class MalformedSgf(SgfError):
    pass


class UnsupportedBoardSize(SgfError):
    pass


class SgfIoError(OSError):
    pass


class Color(IntEnum):
    BLACK = 1
    WHITE = 2

    @property
    def opponent(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK

    @property
    def sgf_letter(self) -> str:
        return "b" if self is Color.BLACK else "w"

    @classmethod
    def from_sgf(cls, letter: str) -> "Color":
        return cls.BLACK if letter.lower() == "b" else cls.WHITE


@dataclass(frozen=True)
class MoveAction:
    color: Color
    point: Optional[Point] = None   # None = pass

    @property
    def is_pass(self) -> bool:
        return self.point is None


@dataclass(frozen=True)
class GameRecord:
    board_size: int
    setup_black: FrozenSet[Point]
    setup_white: FrozenSet[Point]
    moves: Tuple[MoveAction, ...]
    source_id: str
    handicap: int = 0

    @property
    def play_count(self) -> int:
        return sum(1 for m in self.moves if not m.is_pass)


@dataclass
class SgfParseReport:
    records: List[GameRecord] = field(default_factory=list)
    errors: List[SgfError] = field(default_factory=list)


# ─────────────────────────────────────────────────────────────
# 좌표 변환
# ─────────────────────────────────────────────────────────────
def _to_xy(rc: Tuple[int, int], size: int) -> Point:
    # sgfmill point = (row counted from the bottom, col)
    row, col = rc
    return (col, size - 1 - row)


def _to_rc(point: Point, size: int) -> Tuple[int, int]:
    x, y = point
    return (size - 1 - y, x)


def _game_from_tree(coarse, source_id: str) -> GameRecord:
    try:
        game = sgf.Sgf_game.from_coarse_game_tree(coarse)
    except ValueError as e:
        raise MalformedSgf(f"{source_id}: {e}") from e

    root = game.get_root()
    if root.has_property("SZ") and game.get_size() != BOARD_SIZE:
        raise UnsupportedBoardSize(f"{source_id}: SZ[{game.get_size()}] (only {BOARD_SIZE} is supported)")
    size = game.get_size()

    try:
        black_rc, white_rc, _empty = root.get_setup_stones()
    except ValueError as e:
        raise MalformedSgf(f"{source_id}: bad setup stones ({e})") from e
    setup_black = frozenset(_to_xy(rc, size) for rc in black_rc)
    setup_white = frozenset(_to_xy(rc, size) for rc in white_rc)
    if setup_black & setup_white:
        raise MalformedSgf(f"{source_id}: AB/AW overlap at {sorted(setup_black & setup_white)}")

    handicap = 0
    if root.has_property("HA"):
        try:
            handicap = int(root.get("HA"))
        except ValueError:
            logger.warning(f"{source_id}: unreadable HA value ignored")

    moves: List[MoveAction] = []
    for idx, node in enumerate(game.get_main_sequence()):
        try:
            colour, rc = node.get_move()
        except ValueError as e:
            # 잘못된 좌표는 해당 수만 건너뛴다
            logger.warning(f"{source_id}: node {idx} has an unreadable move, skipped ({e})")
            continue
        if colour is None:
            if idx > 0 and node.has_setup_stones():
                logger.debug(f"{source_id}: setup stones in node {idx} ignored")
            continue
        point = None if rc is None else _to_xy(rc, size)
        moves.append(MoveAction(Color.from_sgf(colour), point))

    return GameRecord(
        board_size=size,
        setup_black=setup_black,
        setup_white=setup_white,
        moves=tuple(moves),
        source_id=source_id,
        handicap=handicap,
    )


def parse_sgf_report(text: Union[str, bytes], source: str = "<memory>") -> SgfParseReport:
    """Parse a whole SGF collection, collecting per-game errors instead of raising."""
    data = text.encode("utf-8") if isinstance(text, str) else text
    report = SgfParseReport()
    try:
        trees = sgf_grammar.parse_sgf_collection(data)
    except ValueError as e:
        report.errors.append(MalformedSgf(f"{source}: {e}"))
        return report

    for i, coarse in enumerate(trees):
        source_id = f"{source}#{i}"
        try:
            report.records.append(_game_from_tree(coarse, source_id))
        except SgfError as e:
            logger.warning(f"⚠️ {e}")
            report.errors.append(e)
    return report


def parse_sgf(text: Union[str, bytes], source: str = "<memory>") -> List[GameRecord]:
    """One GameRecord per game tree; raises only when nothing could be parsed."""
    report = parse_sgf_report(text, source)
    if not report.records and report.errors:
        raise report.errors[0]
    return report.records


def to_sgf(record: GameRecord) -> str:
    """Minimal FF[4] main line: setup in the root, one move per node."""
    size = record.board_size
    game = sgf.Sgf_game(size=size)
    root = game.get_root()
    if record.setup_black or record.setup_white:
        root.set_setup_stones(
            sorted(_to_rc(p, size) for p in record.setup_black),
            sorted(_to_rc(p, size) for p in record.setup_white),
        )
    if record.handicap:
        root.set("HA", record.handicap)
    for move in record.moves:
        node = game.extend_main_sequence()
        node.set_move(move.color.sgf_letter, None if move.is_pass else _to_rc(move.point, size))
    return game.serialise().decode("utf-8")


# ─────────────────────────────────────────────────────────────
# 데이터베이스 로딩
# ─────────────────────────────────────────────────────────────
def _sgf_files(path: Path) -> List[Path]:
    if path.is_file():
        return [path]
    return sorted((p for p in path.iterdir() if p.is_file() and p.suffix.lower() == ".sgf"),
                  key=lambda p: p.name)


def _load_file(path: Path) -> SgfParseReport:
    try:
        data = path.read_bytes()
    except OSError as e:
        return SgfParseReport(errors=[MalformedSgf(f"{path.name}: unreadable ({e})")])
    return parse_sgf_report(data, source=path.name)


def load_database(path: Union[str, Path], workers: int = PARALLEL_MAX_WORKERS) -> List[GameRecord]:
    """
    Read every .sgf file under `path` (or the single file `path`).

    Order is lexicographic by filename, then in-file order, whatever the
    thread schedule. Bad files are logged and skipped.
    """
    path = Path(path)
    if not path.exists():
        raise SgfIoError(f"database path not found: {path}")
    try:
        files = _sgf_files(path)
    except OSError as e:
        raise SgfIoError(f"cannot list {path}: {e}") from e

    if not files:
        logger.info(f"No .sgf files under {path}")
        return []

    results: Dict[int, SgfParseReport] = {}
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        futs = {ex.submit(_load_file, f): i for i, f in enumerate(files)}
        for fut in as_completed(futs):
            results[futs[fut]] = fut.result()

    games: List[GameRecord] = []
    n_errors = 0
    for i in range(len(files)):
        report = results[i]
        for err in report.errors:
            logger.warning(f"⚠️ skipped: {err}")
        n_errors += len(report.errors)
        games.extend(report.records)

    logger.info(f"✅ Loaded {len(games)} games from {len(files)} files ({n_errors} errors)")
    return games


def save_database(games: Sequence[GameRecord], directory: Union[str, Path], prefix: str = "game") -> List[Path]:
    """Write one SGF file per game; zero-padded names keep generation order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = max(5, len(str(len(games))))
    paths = []
    for i, game in enumerate(games):
        p = directory / f"{prefix}_{i:0{width}d}.sgf"
        p.write_text(to_sgf(game), encoding="utf-8")
        paths.append(p)
    return paths
