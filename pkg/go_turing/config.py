# config.py
# 실행 설정 로드 (.env → 환경변수 → 기본값)
# CLI 플래그가 있으면 플래그가 우선하고, 최종 값은 RunConfig 로 보고서에 남긴다.

from __future__ import annotations

import logging
import os
import re
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


# 환경변수 파싱 유틸
def _strip_comment(v: str) -> str:
    v = (v or "").split('#', 1)[0].strip()
    if (v.startswith('"') and v.endswith('"')) or (v.startswith("'") and v.endswith("'")):
        v = v[1:-1].strip()
    return v

def getenv_int(name: str, default: int) -> int:
    raw = _strip_comment(os.getenv(name, str(default)))
    m = re.search(r'-?\d+', raw)
    return int(m.group()) if m else int(default)

def getenv_float(name: str, default: float) -> float:
    raw = _strip_comment(os.getenv(name, str(default)))
    m = re.search(r'-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?', raw)
    return float(m.group()) if m else float(default)

def getenv_bool(name: str, default: bool = False) -> bool:
    raw = _strip_comment(os.getenv(name, str(default))).lower()
    return raw in ("1", "true", "t", "yes", "y", "on")

def getenv_str(name: str, default: str = "") -> str:
    return _strip_comment(os.getenv(name, default)) or default


# 설정값
BOARD_SIZE             = 19
CATALOG_SIZE           = 1107

STRATEGIC_DISTANCE     = getenv_float("STRATEGIC_DISTANCE", 4.0)
DISTANCE_METRIC        = getenv_str("DISTANCE_METRIC", "euclidean").lower()
STRICT_DISTANCE        = getenv_bool("STRICT_DISTANCE", True)

PAGERANK_ALPHA         = getenv_float("PAGERANK_ALPHA", 0.85)
SPECTRUM_ALPHA         = getenv_float("SPECTRUM_ALPHA", 1.0)
PAGERANK_TOL           = getenv_float("PAGERANK_TOL", 1e-12)
PAGERANK_MAX_ITER      = getenv_int("PAGERANK_MAX_ITER", 10000)
EIGENVECTOR_COUNT      = getenv_int("EIGENVECTOR_COUNT", 7)

RANK_WINDOW            = getenv_int("RANK_WINDOW", 30)
DISPERSION_HALF        = getenv_int("DISPERSION_HALF", CATALOG_SIZE // 2)

VERDICT_K              = getenv_float("VERDICT_K", 2.0)
VERDICT_SAME           = getenv_float("VERDICT_SAME", 1.0)

PLAYOUT_MAX_MOVES      = getenv_int("PLAYOUT_MAX_MOVES", 250)
PARALLEL_MAX_WORKERS   = getenv_int("PARALLEL_MAX_WORKERS", 4)

LOG_LEVEL              = getenv_str("LOG_LEVEL", "INFO").upper()
LOG_FORMAT             = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None) -> None:
    """Entry-point logging setup (CLI, service startup)."""
    logging.basicConfig(level=getattr(logging, (level or LOG_LEVEL), logging.INFO), format=LOG_FORMAT)


class RunConfig(BaseModel):
    """Effective run settings, written into every JSON report."""
    command: str
    paths: list[str] = Field(default_factory=list)
    out: str = "out"
    ds: float = STRATEGIC_DISTANCE
    metric: str = DISTANCE_METRIC
    strict: bool = STRICT_DISTANCE
    alpha: float = PAGERANK_ALPHA
    spectrum_alpha: float = SPECTRUM_ALPHA
    window: int = RANK_WINDOW
    half: int = DISPERSION_HALF
    eigenvectors: int = EIGENVECTOR_COUNT
    group_size: Optional[int] = None
    instances: Optional[int] = None
    mode: str = "redraw"
    seed: int = 0
    k: float = VERDICT_K
    workers: int = PARALLEL_MAX_WORKERS
