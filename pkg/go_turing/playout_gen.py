"""
Synthetic playout databases
두 가지 정책(UniformRandom / GreedyCapture)으로 재현 가능한 기보 데이터베이스를 만든다.

Games are reproducible across platforms: all randomness comes from SplitMix64
(constants below), game g of a run uses seed + g.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Set

from .config import BOARD_SIZE, PLAYOUT_MAX_MOVES
from .go_engine import EMPTY, Board
from .sgf_ingest import Color, GameRecord, MoveAction

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """
    state += 0x9E3779B97F4A7C15
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)            (all mod 2^64)
    """

    GAMMA = 0x9E3779B97F4A7C15
    MUL1 = 0xBF58476D1CE4E5B9
    MUL2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MUL1) & _MASK64
        z = ((z ^ (z >> 27)) * self.MUL2) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n


class PolicyKind(str, Enum):
    UNIFORM_RANDOM = "uniform"
    GREEDY_CAPTURE = "greedy"


@dataclass(frozen=True)
class PlayoutPolicy:
    kind: PolicyKind = PolicyKind.UNIFORM_RANDOM
    max_moves: int = PLAYOUT_MAX_MOVES
    seed: int = 0


def _uniform_choice(board: Board, color: Color, rng: SplitMix64) -> Optional[int]:
    """Uniform among legal points that do not fill an own eye; None = pass."""
    candidates = [i for i, c in enumerate(board.grid) if c == EMPTY]
    while candidates:
        k = rng.randbelow(len(candidates))
        idx = candidates[k]
        point = divmod(idx, BOARD_SIZE)
        if not board.is_eye(point, color) and board.is_legal(point, color):
            return idx
        candidates[k] = candidates[-1]
        candidates.pop()
    return None


def capture_points(board: Board, color: Color) -> List[int]:
    """Sorted flat indices of the single liberties of opponent groups in atari."""
    points: Set[int] = set()
    for _, libs in board.groups(color.opponent):
        if len(libs) == 1:
            points |= libs
    return sorted(points)


def _choose(board: Board, color: Color, kind: PolicyKind, rng: SplitMix64) -> Optional[int]:
    if kind is PolicyKind.GREEDY_CAPTURE:
        caps = capture_points(board, color)
        if caps:
            return caps[0]
    return _uniform_choice(board, color, rng)


def generate_game(policy: PlayoutPolicy, game_seed: int) -> GameRecord:
    rng = SplitMix64(game_seed)
    board = Board()
    color = Color.BLACK
    moves: List[MoveAction] = []
    passes = 0
    while len(moves) < policy.max_moves and passes < 2:
        idx = _choose(board, color, policy.kind, rng)
        if idx is None:
            moves.append(MoveAction(color, None))
            passes += 1
        else:
            point = divmod(idx, BOARD_SIZE)
            board.play(point, color)
            moves.append(MoveAction(color, point))
            passes = 0
        color = color.opponent
    return GameRecord(
        board_size=BOARD_SIZE,
        setup_black=frozenset(),
        setup_white=frozenset(),
        moves=tuple(moves),
        source_id=f"{policy.kind.value}-{game_seed}",
    )


def generate_games(policy: PlayoutPolicy, n_games: int) -> List[GameRecord]:
    if n_games < 0:
        raise ValueError("n_games must be >= 0")
    games = [generate_game(policy, policy.seed + g) for g in range(n_games)]
    if games:
        logger.info(f"✅ generated {n_games} {policy.kind.value} games (seed={policy.seed}, "
                    f"avg {sum(len(g.moves) for g in games) / n_games:.1f} moves)")
    return games
