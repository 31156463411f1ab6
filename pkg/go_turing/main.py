"""
Pattern network API
SGF 텍스트를 받아 패턴 네트워크 요약과 PageRank 비교 결과를 돌려주는 요청/응답 서비스.
저장소나 UI 없음.
"""

from __future__ import annotations

import logging
from typing import List, Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .config import (DISPERSION_HALF, DISTANCE_METRIC, PAGERANK_ALPHA, RANK_WINDOW, STRATEGIC_DISTANCE,
                     STRICT_DISTANCE, getenv_bool, setup_logging)
from .network_builder import PatternNetwork, build_network, degree_distribution
from .pattern_codec import catalog_frame, get_catalog, render_ascii, representative
from .rank_metrics import ComparisonReport, DimensionMismatch, ZeroVector, compare_vectors
from .sgf_ingest import GameRecord, parse_sgf_report
from .spectral import EigensolverFailure, GoogleMatrixSpec, NoConvergence, pagerank, pagerank_frame

setup_logging()
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Go Pattern Network API",
    description="3x3 pattern networks, Google matrix PageRank and network comparison for go game records",
    version="1.0.0",
)

ENABLE_CORS = getenv_bool("ENABLE_CORS", True)

if ENABLE_CORS:
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )


class PatternClass(BaseModel):
    id: int
    encoding: str
    geometry: str
    orbit_size: int
    ascii: Optional[str] = None


class NetworkRequest(BaseModel):
    sgf: List[str] = Field(min_length=1)
    d_s: float = Field(default=STRATEGIC_DISTANCE, gt=0)
    metric: str = DISTANCE_METRIC
    strict: bool = STRICT_DISTANCE
    alpha: float = Field(default=PAGERANK_ALPHA, ge=0, le=1)
    top: int = Field(default=20, ge=1, le=1107)


class RankedPattern(BaseModel):
    rank: int
    node_id: int
    p: float
    ascii: str


class NetworkSummary(BaseModel):
    games_used: int
    skipped: int
    k_tot: int
    n_links: int
    active_nodes: int
    pagerank_iterations: int
    top: List[RankedPattern]


class CompareRequest(BaseModel):
    sgf_a: List[str] = Field(min_length=1)
    sgf_b: List[str] = Field(min_length=1)
    d_s: float = Field(default=STRATEGIC_DISTANCE, gt=0)
    metric: str = DISTANCE_METRIC
    strict: bool = STRICT_DISTANCE
    alpha: float = Field(default=PAGERANK_ALPHA, ge=0, le=1)
    window: int = RANK_WINDOW
    half: int = DISPERSION_HALF


def _parse_batch(texts: List[str]) -> tuple[List[GameRecord], int]:
    games: List[GameRecord] = []
    skipped = 0
    for i, text in enumerate(texts):
        report = parse_sgf_report(text, source=f"request[{i}]")
        games.extend(report.records)
        skipped += len(report.errors)
    if not games:
        raise HTTPException(status_code=400, detail="no valid 19x19 SGF game in request")
    return games, skipped


def _network(games: List[GameRecord], d_s: float, metric: str, strict: bool) -> PatternNetwork:
    try:
        net = build_network(games, d_s=d_s, metric=metric, strict=strict)
    except ValueError as e:
        raise HTTPException(status_code=422, detail=str(e))
    if net.k_tot == 0:
        raise HTTPException(status_code=422, detail="games produced no links")
    return net


@app.get("/")
@app.head("/")
async def root():
    return {"message": "Go pattern network API is running", "catalog": get_catalog().summary()}


@app.get("/api/catalog")
async def get_catalog_summary(limit: int = Query(1107, ge=0, le=1107), offset: int = Query(0, ge=0)):
    catalog = get_catalog()
    frame = catalog_frame(catalog).iloc[offset:offset + limit]
    return {
        "summary": catalog.summary(),
        "counts": catalog.geometry_counts(),
        "classes": frame.to_dict(orient="records"),
    }


@app.get("/api/catalog/{pattern_id}", response_model=PatternClass)
async def get_pattern(pattern_id: int):
    catalog = get_catalog()
    if not 0 <= pattern_id < len(catalog):
        raise HTTPException(status_code=404, detail=f"pattern {pattern_id} not found")
    row = catalog_frame(catalog).iloc[pattern_id]
    return PatternClass(id=pattern_id, encoding=row["encoding"], geometry=row["geometry"],
                        orbit_size=int(row["orbit_size"]), ascii=render_ascii(representative(pattern_id)))


@app.post("/api/networks", response_model=NetworkSummary)
def create_network(req: NetworkRequest):
    games, skipped = _parse_batch(req.sgf)
    net = _network(games, req.d_s, req.metric, req.strict)
    try:
        pr = pagerank(GoogleMatrixSpec(net, req.alpha))
    except NoConvergence as e:
        raise HTTPException(status_code=500, detail=str(e))

    dist = degree_distribution(net)
    top = pagerank_frame(pr).head(req.top)
    logger.info(f"✅ network: {net.games_used} games, k_tot={net.k_tot}")
    return NetworkSummary(
        games_used=net.games_used,
        skipped=skipped,
        k_tot=net.k_tot,
        n_links=len(net.weights),
        active_nodes=int(((dist.k_in + dist.k_out) > 0).sum()),
        pagerank_iterations=pr.iterations,
        top=[RankedPattern(rank=int(r), node_id=int(n), p=float(p), ascii=render_ascii(representative(int(n))))
             for r, n, p in top.itertuples(index=False, name=None)],
    )


@app.post("/api/compare", response_model=ComparisonReport)
def compare_networks(req: CompareRequest):
    games_a, _ = _parse_batch(req.sgf_a)
    games_b, _ = _parse_batch(req.sgf_b)
    net_a = _network(games_a, req.d_s, req.metric, req.strict)
    net_b = _network(games_b, req.d_s, req.metric, req.strict)
    try:
        pa = pagerank(GoogleMatrixSpec(net_a, req.alpha)).p
        pb = pagerank(GoogleMatrixSpec(net_b, req.alpha)).p
        return compare_vectors(pa, pb, window=req.window, half=req.half)
    except (DimensionMismatch, ZeroVector, ValueError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except (NoConvergence, EigensolverFailure) as e:
        logger.error(f"❌ compare failed: {e}")
        raise HTTPException(status_code=500, detail=str(e))
