"""
Network Turing test harness
두 기보 데이터베이스가 같은 종류의 플레이어에서 나왔는지 부분표본 네트워크 통계로 판정한다.

All draws of a run are generated up front from the seed, then evaluated
(possibly in parallel); aggregation walks the draws in plan order, so the
schedule never changes a report. Per-game link counters are computed once per
database and every subsample network is a merge of them.
"""

from __future__ import annotations

import logging
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from .config import (DISTANCE_METRIC, PAGERANK_ALPHA, PARALLEL_MAX_WORKERS, RANK_WINDOW,
                     STRATEGIC_DISTANCE, STRICT_DISTANCE, VERDICT_K, VERDICT_SAME, RunConfig)
from .network_builder import PatternNetwork, game_links, network_from_links
from .rank_metrics import compare_vectors, eigenvector_curves
from .sgf_ingest import GameRecord
from .spectral import GoogleMatrixSpec, full_spectrum, pagerank

logger = logging.getLogger(__name__)

T = TypeVar("T")
EPS = 1e-12
DECISION_RULE = ("explicit stand-in rule: DifferentSource if at least 2 of the 3 separations "
                 "(F, S_N, sigma) exceed k; SameSource if all are below the same-source threshold; "
                 "otherwise Inconclusive")


class InsufficientGames(ValueError):
    pass


class DrawMode(str, Enum):
    REDRAW = "redraw"       # independent draws per instance, without replacement inside one
    DISJOINT = "disjoint"   # one shuffled partition into disjoint groups


class SubsampleScheme(BaseModel):
    group_size: int = Field(gt=0)
    n_instances: int = Field(ge=0)
    rng_seed: int = 0
    mode: DrawMode = DrawMode.REDRAW


class IndicatorPoint(BaseModel):
    label: Tuple[str, str]
    f_mean: float
    f_sd: float = Field(ge=0)
    sn_mean: float
    sn_sd: float = Field(ge=0)
    sigma_mean: float
    sigma_sd: float = Field(ge=0)
    so_mean: float = 0.0
    so_sd: float = Field(default=0.0, ge=0)
    group_size: int = 0
    n_instances: int = 0


class Decision(str, Enum):
    SAME_SOURCE = "SameSource"
    DIFFERENT_SOURCE = "DifferentSource"
    INCONCLUSIVE = "Inconclusive"


class TuringVerdict(BaseModel):
    decision: Decision
    separation: Dict[str, float]
    details: Dict[str, Dict[str, float]]
    k: float
    same_threshold: float
    rule: str = DECISION_RULE


class EigenvectorProfile(BaseModel):
    label: Tuple[str, str]
    ranks: List[int]
    f_mean: List[float]
    f_sd: List[float]
    so_mean: List[float]
    so_sd: List[float]
    sn_mean: List[float]
    sn_sd: List[float]
    n_pairs: int


class TuringReport(BaseModel):
    config: Optional[RunConfig] = None
    scheme: SubsampleScheme
    labels: Tuple[str, str]
    alpha: float
    indicator_points: List[IndicatorPoint]
    within: IndicatorPoint
    between: IndicatorPoint
    verdict: TuringVerdict
    profiles: List[EigenvectorProfile] = Field(default_factory=list)
    seeds: Dict[str, int] = Field(default_factory=dict)


# ─────────────────────────────────────────────────────────────
# 데이터베이스 캐시
# ─────────────────────────────────────────────────────────────
@dataclass
class GameDatabase:
    name: str
    games: Sequence[GameRecord]
    d_s: float = STRATEGIC_DISTANCE
    metric: str = DISTANCE_METRIC
    strict: bool = STRICT_DISTANCE
    workers: int = PARALLEL_MAX_WORKERS
    _links: Optional[List[Counter]] = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.games)

    @property
    def links(self) -> List[Counter]:
        with self._lock:
            if self._links is None:
                self._links = _parallel_map(lambda g: game_links(g, self.d_s, self.metric, self.strict),
                                            list(self.games), self.workers)
                logger.info(f"✅ {self.name}: link counters for {len(self.games)} games")
        return self._links

    def prepare(self) -> "GameDatabase":
        """Fill the link cache before subsample networks are built in worker threads."""
        _ = self.links
        return self

    def network(self, indices: Optional[Sequence[int]] = None) -> PatternNetwork:
        idx = range(len(self.games)) if indices is None else indices
        return network_from_links(self.links, idx, self.d_s, self.metric)


def _parallel_map(fn: Callable[..., T], items: Sequence, workers: int) -> List[T]:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    out: Dict[int, T] = {}
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futs = {ex.submit(fn, x): i for i, x in enumerate(items)}
        for fut in as_completed(futs):
            out[futs[fut]] = fut.result()
    return [out[i] for i in range(len(items))]


DbLike = Union[GameDatabase, Sequence[GameRecord]]


def _as_database(db: DbLike, name: str, **kwargs) -> GameDatabase:
    return db if isinstance(db, GameDatabase) else GameDatabase(name=name, games=db, **kwargs)


# ─────────────────────────────────────────────────────────────
# 표본 추출 계획
# ─────────────────────────────────────────────────────────────
def sample_groups(n: int, scheme: SubsampleScheme, rng: Optional[np.random.Generator] = None) -> List[np.ndarray]:
    g = scheme.group_size
    if scheme.n_instances == 0:
        return []
    if g > n:
        raise InsufficientGames(f"group_size {g} exceeds database size {n}")
    rng = rng or np.random.default_rng(scheme.rng_seed)
    if scheme.mode is DrawMode.DISJOINT:
        perm = rng.permutation(n)
        count = min(scheme.n_instances, n // g)
        return [np.sort(perm[i * g:(i + 1) * g]) for i in range(count)]
    return [np.sort(rng.choice(n, size=g, replace=False)) for _ in range(scheme.n_instances)]


def draw_plan(n_a: int, n_b: int, scheme: SubsampleScheme, same: bool) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    (group from A, group from B) pairs. With same=True both groups come from
    one database and are disjoint, which needs 2 * group_size games.
    """
    g = scheme.group_size
    if scheme.n_instances == 0:
        return []
    rng = np.random.default_rng(scheme.rng_seed)
    if same:
        if 2 * g > n_a:
            raise InsufficientGames(f"two disjoint groups of {g} need {2 * g} games, database has {n_a}")
        if scheme.mode is DrawMode.DISJOINT:
            perm = rng.permutation(n_a)
            count = min(scheme.n_instances, n_a // (2 * g))
            return [(np.sort(perm[2 * i * g:(2 * i + 1) * g]), np.sort(perm[(2 * i + 1) * g:(2 * i + 2) * g]))
                    for i in range(count)]
        plan = []
        for _ in range(scheme.n_instances):
            both = rng.choice(n_a, size=2 * g, replace=False)
            plan.append((np.sort(both[:g]), np.sort(both[g:])))
        return plan

    if g > n_a or g > n_b:
        raise InsufficientGames(f"group_size {g} exceeds database sizes ({n_a}, {n_b})")
    groups_a = sample_groups(n_a, scheme, rng)
    groups_b = sample_groups(n_b, scheme, rng)
    return list(zip(groups_a, groups_b))


# ─────────────────────────────────────────────────────────────
# 지표 계산
# ─────────────────────────────────────────────────────────────
def _mean_sd(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), sd


def _aggregate(label: Tuple[str, str], reports, group_size: int) -> IndicatorPoint:
    f_mean, f_sd = _mean_sd([r.fidelity for r in reports])
    sn_mean, sn_sd = _mean_sd([r.s_nonordered for r in reports])
    so_mean, so_sd = _mean_sd([r.s_ordered for r in reports])
    sg_mean, sg_sd = _mean_sd([r.sigma for r in reports])
    return IndicatorPoint(label=label, f_mean=f_mean, f_sd=f_sd, sn_mean=sn_mean, sn_sd=sn_sd,
                          sigma_mean=sg_mean, sigma_sd=sg_sd, so_mean=so_mean, so_sd=so_sd,
                          group_size=group_size, n_instances=len(reports))


def indicator_point(reference: DbLike, sample: DbLike, scheme: SubsampleScheme,
                    alpha: float = PAGERANK_ALPHA, window: int = RANK_WINDOW,
                    half: Optional[int] = None, workers: int = PARALLEL_MAX_WORKERS) -> Optional[IndicatorPoint]:
    """Full-database reference PageRank against group_size-game networks drawn from `sample`."""
    ref = _as_database(reference, "A")
    smp = _as_database(sample, "B")
    groups = sample_groups(len(smp), scheme)
    if not groups:
        return None
    ref.prepare()
    smp.prepare()
    p_ref = pagerank(GoogleMatrixSpec(ref.network(), alpha)).p

    def _one(idx: np.ndarray):
        p = pagerank(GoogleMatrixSpec(smp.network(idx), alpha)).p
        return compare_vectors(p_ref, p, window=window, half=half, symmetric=True)

    reports = _parallel_map(_one, groups, workers)
    return _aggregate((ref.name, smp.name), reports, scheme.group_size)


def indicator_points(db_a: DbLike, db_b: DbLike, scheme: SubsampleScheme,
                     alpha: float = PAGERANK_ALPHA, window: int = RANK_WINDOW,
                     half: Optional[int] = None, workers: int = PARALLEL_MAX_WORKERS) -> List[IndicatorPoint]:
    """(A ref, A groups), (A ref, B groups), (B ref, B groups)."""
    if scheme.n_instances == 0:
        return []
    a = _as_database(db_a, "A")
    b = a if db_b is db_a else _as_database(db_b, "B")
    if not len(a) or not len(b):
        raise InsufficientGames("both databases must be nonempty")
    kw = dict(alpha=alpha, window=window, half=half, workers=workers)
    points = [indicator_point(a, a, scheme, **kw), indicator_point(a, b, scheme, **kw),
              indicator_point(b, b, scheme, **kw)]
    return [p for p in points if p is not None]


def pair_point(db_a: DbLike, db_b: DbLike, scheme: SubsampleScheme,
               alpha: float = PAGERANK_ALPHA, window: int = RANK_WINDOW,
               half: Optional[int] = None, workers: int = PARALLEL_MAX_WORKERS) -> Optional[IndicatorPoint]:
    """Group-vs-group PageRank comparison; within-source when db_b is db_a."""
    a = _as_database(db_a, "A")
    same = db_b is db_a or db_b is a
    b = a if same else _as_database(db_b, "B")
    plan = draw_plan(len(a), len(b), scheme, same)
    if not plan:
        return None
    a.prepare()
    b.prepare()

    def _one(pair):
        ia, ib = pair
        pa = pagerank(GoogleMatrixSpec(a.network(ia), alpha)).p
        pb = pagerank(GoogleMatrixSpec(b.network(ib), alpha)).p
        return compare_vectors(pa, pb, window=window, half=half, symmetric=True)

    reports = _parallel_map(_one, plan, workers)
    return _aggregate((a.name, b.name), reports, scheme.group_size)


def eigenvector_profile(db_a: DbLike, db_b: DbLike, scheme: SubsampleScheme,
                        alpha: float = PAGERANK_ALPHA, k: int = 7, window: int = RANK_WINDOW,
                        workers: int = PARALLEL_MAX_WORKERS) -> Optional[EigenvectorProfile]:
    """Mean ± sd of F, S_O, S_N for eigenvector ranks 1..k over group pairs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = _as_database(db_a, "A")
    same = db_b is db_a or db_b is a
    b = a if same else _as_database(db_b, "B")
    plan = draw_plan(len(a), len(b), scheme, same)
    if not plan:
        return None
    a.prepare()
    b.prepare()

    def _one(pair):
        ia, ib = pair
        sa = full_spectrum(GoogleMatrixSpec(a.network(ia), alpha), k=k)
        sb = full_spectrum(GoogleMatrixSpec(b.network(ib), alpha), k=k)
        return eigenvector_curves(sa.eigenvectors, sb.eigenvectors, window)

    curves = _parallel_map(_one, plan, workers)
    f = np.array([c[0] for c in curves])
    so = np.array([c[1] for c in curves])
    sn = np.array([c[2] for c in curves])
    ddof = 1 if len(curves) > 1 else 0
    return EigenvectorProfile(
        label=(a.name, b.name), ranks=list(range(1, k + 1)),
        f_mean=f.mean(axis=0).tolist(), f_sd=f.std(axis=0, ddof=ddof).tolist(),
        so_mean=so.mean(axis=0).tolist(), so_sd=so.std(axis=0, ddof=ddof).tolist(),
        sn_mean=sn.mean(axis=0).tolist(), sn_sd=sn.std(axis=0, ddof=ddof).tolist(),
        n_pairs=len(curves),
    )


# ─────────────────────────────────────────────────────────────
# 판정
# ─────────────────────────────────────────────────────────────
_VERDICT_METRICS = (("fidelity", "f_mean", "f_sd"), ("s_nonordered", "sn_mean", "sn_sd"),
                    ("sigma", "sigma_mean", "sigma_sd"))


def verdict(within: IndicatorPoint, between: IndicatorPoint, k: float = VERDICT_K,
            same_threshold: float = VERDICT_SAME) -> TuringVerdict:
    separation: Dict[str, float] = {}
    details: Dict[str, Dict[str, float]] = {}
    for name, mean_f, sd_f in _VERDICT_METRICS:
        mw, sw = getattr(within, mean_f), getattr(within, sd_f)
        mb, sb = getattr(between, mean_f), getattr(between, sd_f)
        separation[name] = abs(mb - mw) / (sb + sw + EPS)
        details[name] = {"within_mean": mw, "within_sd": sw, "between_mean": mb, "between_sd": sb}

    seps = list(separation.values())
    if sum(s > k for s in seps) >= 2:
        decision = Decision.DIFFERENT_SOURCE
    elif all(s < same_threshold for s in seps):
        decision = Decision.SAME_SOURCE
    else:
        decision = Decision.INCONCLUSIVE
    return TuringVerdict(decision=decision, separation=separation, details=details,
                         k=k, same_threshold=same_threshold)


def split_halves(games: Sequence[GameRecord], seed: int = 0) -> Tuple[List[GameRecord], List[GameRecord]]:
    perm = np.random.default_rng(seed).permutation(len(games))
    half = len(games) // 2
    return [games[i] for i in sorted(perm[:half])], [games[i] for i in sorted(perm[half:2 * half])]


def group_networks(db: DbLike, group_size: int, seed: int = 0, **kwargs) -> List[PatternNetwork]:
    """m = n // group_size networks over one seeded partition of the database into disjoint groups."""
    d = _as_database(db, "A", **kwargs)
    if not 0 < group_size <= len(d):
        raise InsufficientGames(f"group_size {group_size} does not fit a database of {len(d)} games")
    scheme = SubsampleScheme(group_size=group_size, n_instances=len(d) // group_size,
                             rng_seed=seed, mode=DrawMode.DISJOINT)
    groups = sample_groups(len(d), scheme)
    d.prepare()
    return [d.network(idx) for idx in groups]


def run_turing_test(db_a: Sequence[GameRecord], db_b: Sequence[GameRecord], scheme: SubsampleScheme,
                    alpha: float = PAGERANK_ALPHA, names: Tuple[str, str] = ("A", "B"),
                    k: float = VERDICT_K, same_threshold: float = VERDICT_SAME,
                    window: int = RANK_WINDOW, half: Optional[int] = None, profile_k: int = 0,
                    d_s: float = STRATEGIC_DISTANCE, metric: str = DISTANCE_METRIC,
                    strict: bool = STRICT_DISTANCE, workers: int = PARALLEL_MAX_WORKERS,
                    config: Optional[RunConfig] = None) -> TuringReport:
    if scheme.n_instances < 1:
        raise InsufficientGames("the verdict needs at least one instance")
    opts = dict(d_s=d_s, metric=metric, strict=strict, workers=workers)
    a = GameDatabase(name=names[0], games=db_a, **opts)
    b = a if db_b is db_a else GameDatabase(name=names[1], games=db_b, **opts)
    if not len(a) or not len(b):
        raise InsufficientGames("both databases must be nonempty")
    kw = dict(alpha=alpha, window=window, half=half, workers=workers)

    a.prepare()
    b.prepare()
    within = pair_point(a, a, scheme, **kw)
    between = pair_point(a, b, scheme, **kw)
    if within is None or between is None:
        raise InsufficientGames(f"no group pairs of size {scheme.group_size} can be drawn")
    points = indicator_points(a, b, scheme, **kw)
    result = verdict(within, between, k, same_threshold)
    logger.info(f"🧪 {names[0]} vs {names[1]}: {result.decision.value} "
                + ", ".join(f"{m}={s:.2f}" for m, s in result.separation.items()))

    profiles: List[EigenvectorProfile] = []
    if profile_k > 0:
        for x, y in ((a, a), (a, b), (b, b)):
            prof = eigenvector_profile(x, y, scheme, alpha=alpha, k=profile_k, window=window, workers=workers)
            if prof is not None:
                profiles.append(prof)

    return TuringReport(config=config, scheme=scheme, labels=(a.name, b.name), alpha=alpha,
                        indicator_points=points, within=within, between=between, verdict=result,
                        profiles=profiles, seeds={"draws": scheme.rng_seed})


# ─────────────────────────────────────────────────────────────
# 보고서 출력
# ─────────────────────────────────────────────────────────────
def indicator_frame(report: TuringReport) -> pd.DataFrame:
    """Scatter data: one row per label pair, metric means with their sds."""
    rows = []
    for kind, point in ([("reference", p) for p in report.indicator_points]
                        + [("within", report.within), ("between", report.between)]):
        row = point.model_dump(exclude={"label"})
        rows.append({"kind": kind, "label": "|".join(point.label), **row})
    return pd.DataFrame(rows, columns=["kind", "label", "f_mean", "f_sd", "sn_mean", "sn_sd",
                                       "sigma_mean", "sigma_sd", "so_mean", "so_sd",
                                       "group_size", "n_instances"])


def write_report(report: TuringReport, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "turing_report.json"
    csv_path = out_dir / "indicators.csv"
    json_path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    indicator_frame(report).to_csv(csv_path, index=False, lineterminator="\n", float_format="%.17g")
    return json_path, csv_path
