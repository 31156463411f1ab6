import logging
from typing import Iterable, Optional, Tuple

import pytest

from go_turing.playout_gen import PlayoutPolicy, PolicyKind, generate_games
from go_turing.sgf_ingest import Color, GameRecord, MoveAction


def make_game(points: Iterable[Optional[Tuple[int, int]]], setup_black=(), setup_white=(),
              first: Color = Color.BLACK, source_id: str = "test") -> GameRecord:
    """Alternating-colour game from a list of points (None = pass)."""
    moves = []
    color = first
    for p in points:
        moves.append(MoveAction(color, p))
        color = color.opponent
    return GameRecord(board_size=19, setup_black=frozenset(setup_black), setup_white=frozenset(setup_white),
                      moves=tuple(moves), source_id=source_id)


@pytest.fixture(autouse=True)
def _quiet_logs(caplog):
    caplog.set_level(logging.INFO)


@pytest.fixture(scope="session")
def uniform_games():
    return generate_games(PlayoutPolicy(PolicyKind.UNIFORM_RANDOM, max_moves=60, seed=1), 12)


@pytest.fixture(scope="session")
def greedy_games():
    return generate_games(PlayoutPolicy(PolicyKind.GREEDY_CAPTURE, max_moves=60, seed=1), 12)


GAME_TEXTS = [
    "(;GM[1]FF[4]SZ[19];B[pd];W[qf];B[oc];W[dp];B[dd];W[pq])",
    "(;GM[1]FF[4]SZ[19];B[dd];W[ec];B[cf];W[pp];B[qq];W[pq])",
]
