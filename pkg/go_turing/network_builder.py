"""
Pattern network builder
기보에서 패턴 네트워크(가중 방향 그래프)를 만들고 링크 분포를 계산한다.

A move at p (pattern i) is linked to the first later move q (pattern j) of the
same game with distance(p, q) < d_s; p is closed as soon as that happens, and
one move may close several open predecessors at once.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import sparse

from .config import (CATALOG_SIZE, DISTANCE_METRIC, PARALLEL_MAX_WORKERS,
                     STRATEGIC_DISTANCE, STRICT_DISTANCE)
from .go_engine import iter_replay
from .pattern_codec import pattern_id
from .sgf_ingest import GameRecord, Point

logger = logging.getLogger(__name__)

Link = Tuple[int, int]
METRICS = ("euclidean", "chebyshev")


class EmptyNetwork(ValueError):
    pass


@dataclass
class PatternNetwork:
    n_nodes: int = CATALOG_SIZE
    weights: Counter = field(default_factory=Counter)
    games_used: int = 0
    d_s: float = STRATEGIC_DISTANCE
    metric: str = DISTANCE_METRIC

    @property
    def k_tot(self) -> int:
        return sum(self.weights.values())

    def to_sparse(self) -> sparse.csr_matrix:
        """A[i, j] = weight(i -> j)."""
        if not self.weights:
            return sparse.csr_matrix((self.n_nodes, self.n_nodes), dtype=np.float64)
        keys = sorted(self.weights)
        rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        data = np.fromiter((self.weights[k] for k in keys), dtype=np.float64, count=len(keys))
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n_nodes, self.n_nodes))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternNetwork):
            return NotImplemented
        return (self.n_nodes == other.n_nodes and +self.weights == +other.weights
                and self.games_used == other.games_used
                and self.d_s == other.d_s and self.metric == other.metric)


def _distance_test(d_s: float, metric: str, strict: bool) -> Callable[[Point, Point], bool]:
    if d_s <= 0:
        raise ValueError(f"d_s must be positive, got {d_s}")
    if metric == "euclidean":
        r2 = d_s * d_s
        if strict:
            return lambda p, q: (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 < r2
        return lambda p, q: (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 <= r2
    if metric == "chebyshev":
        if strict:
            return lambda p, q: max(abs(p[0] - q[0]), abs(p[1] - q[1])) < d_s
        return lambda p, q: max(abs(p[0] - q[0]), abs(p[1] - q[1])) <= d_s
    raise ValueError(f"unknown metric {metric!r} (expected one of {METRICS})")


def distance(p: Point, q: Point, metric: str = "euclidean") -> float:
    if metric == "chebyshev":
        return float(max(abs(p[0] - q[0]), abs(p[1] - q[1])))
    return math.hypot(p[0] - q[0], p[1] - q[1])


def game_links(game: GameRecord, d_s: float = STRATEGIC_DISTANCE, metric: str = DISTANCE_METRIC,
               strict: bool = STRICT_DISTANCE) -> Counter:
    """Link counts contributed by one game (OPEN list is per game)."""
    close = _distance_test(d_s, metric, strict)
    links: Counter = Counter()
    open_moves: List[Tuple[Point, int]] = []
    for ev in iter_replay(game):
        q = ev.position
        j = pattern_id(ev.board_before, q, ev.color)
        still_open = []
        for p, i in open_moves:
            if close(p, q):
                links[(i, j)] += 1
            else:
                still_open.append((p, i))
        still_open.append((q, j))
        open_moves = still_open
    return links


def build_network(games: Iterable[GameRecord], d_s: float = STRATEGIC_DISTANCE,
                  metric: str = DISTANCE_METRIC, strict: bool = STRICT_DISTANCE,
                  n_nodes: int = CATALOG_SIZE) -> PatternNetwork:
    net = PatternNetwork(n_nodes=n_nodes, d_s=d_s, metric=metric)
    for game in games:
        net.weights.update(game_links(game, d_s, metric, strict))
        net.games_used += 1
    return net


def network_from_links(per_game: Sequence[Counter], indices: Iterable[int], d_s: float = STRATEGIC_DISTANCE,
                       metric: str = DISTANCE_METRIC, n_nodes: int = CATALOG_SIZE) -> PatternNetwork:
    """Network of a game subset from cached per-game link counters."""
    net = PatternNetwork(n_nodes=n_nodes, d_s=d_s, metric=metric)
    for i in indices:
        net.weights.update(per_game[i])
        net.games_used += 1
    return net


def merge(nets: Sequence[PatternNetwork]) -> PatternNetwork:
    """Sum of networks; an empty network (no links, no games) is the identity and carries no rule."""
    if not nets:
        return PatternNetwork()
    ruled = [net for net in nets if net.weights or net.games_used]
    first = ruled[0] if ruled else nets[0]
    out = PatternNetwork(n_nodes=first.n_nodes, d_s=first.d_s, metric=first.metric)
    for net in ruled:
        if (net.n_nodes, net.d_s, net.metric) != (first.n_nodes, first.d_s, first.metric):
            raise ValueError("cannot merge networks built with different catalogs or linking rules")
        out.weights.update(net.weights)
        out.games_used += net.games_used
    return out


def build_network_parallel(games: Sequence[GameRecord], d_s: float = STRATEGIC_DISTANCE,
                           metric: str = DISTANCE_METRIC, strict: bool = STRICT_DISTANCE,
                           chunk_size: int = 500, workers: int = PARALLEL_MAX_WORKERS) -> PatternNetwork:
    """Chunked build + merge; identical to build_network on the same games."""
    chunks = [games[i:i + chunk_size] for i in range(0, len(games), max(1, chunk_size))]
    if len(chunks) <= 1 or workers <= 1:
        return build_network(games, d_s, metric, strict)

    parts: Dict[int, PatternNetwork] = {}
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futs = {ex.submit(build_network, c, d_s, metric, strict): i for i, c in enumerate(chunks)}
        for fut in as_completed(futs):
            parts[futs[fut]] = fut.result()
    net = merge([parts[i] for i in range(len(chunks))])
    logger.info(f"✅ network built from {net.games_used} games in {len(chunks)} chunks: k_tot={net.k_tot}")
    return net


# ─────────────────────────────────────────────────────────────
# 링크 분포
# ─────────────────────────────────────────────────────────────
@dataclass
class DegreeDistribution:
    k_in: np.ndarray
    k_out: np.ndarray
    k_tot: int
    curve_in: pd.DataFrame      # columns k_star, p
    curve_out: pd.DataFrame

    def degree_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"id": np.arange(len(self.k_in)), "K_in": self.k_in, "K_out": self.k_out})

    def curve_frame(self) -> pd.DataFrame:
        return pd.concat([self.curve_in.assign(direction="in"), self.curve_out.assign(direction="out")],
                         ignore_index=True)[["direction", "k_star", "p"]]


def integrated_curve(degrees: np.ndarray, k_tot: int) -> pd.DataFrame:
    """
    One point per linked node, by degree rank: the node with the r-th largest
    degree K sits at (K / k_tot, r / N).

    The leftmost point is therefore at 1 - N0/N and the rightmost at 1/N, even
    when several nodes share the maximal degree.
    """
    n = len(degrees)
    linked = np.sort(degrees[degrees > 0], kind="stable")
    rank = np.arange(len(linked), 0, -1)
    return pd.DataFrame({"k_star": linked / float(k_tot), "p": rank / float(n)})


def degree_distribution(net: PatternNetwork) -> DegreeDistribution:
    k_tot = net.k_tot
    if k_tot <= 0:
        raise EmptyNetwork("network has no links")
    k_in = np.zeros(net.n_nodes, dtype=np.int64)
    k_out = np.zeros(net.n_nodes, dtype=np.int64)
    for (i, j), w in net.weights.items():
        k_out[i] += w
        k_in[j] += w
    return DegreeDistribution(
        k_in=k_in, k_out=k_out, k_tot=k_tot,
        curve_in=integrated_curve(k_in, k_tot),
        curve_out=integrated_curve(k_out, k_tot),
    )


def fit_power_law(curve: pd.DataFrame, lo: float = 0.1, hi: float = 0.9) -> float:
    """
    Exponent gamma of P(K*) ~ K*^-gamma, by least squares on log-log axes over
    the [lo, hi] quantile range of the curve points.
    """
    pts = curve[(curve["k_star"] > 0) & (curve["p"] > 0)]
    if len(pts) < 3:
        raise ValueError("need at least 3 curve points to fit a power law")
    x = np.log10(pts["k_star"].to_numpy())
    y = np.log10(pts["p"].to_numpy())
    a, b = np.quantile(x, [lo, hi])
    mask = (x >= a) & (x <= b)
    if mask.sum() < 2:
        mask = np.ones_like(x, dtype=bool)
    slope, _ = np.polyfit(x[mask], y[mask], 1)
    return float(-slope)


# ─────────────────────────────────────────────────────────────
# 직렬화 (TSV)
# ─────────────────────────────────────────────────────────────
def save_network(net: PatternNetwork, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys = sorted(net.weights)
    frame = pd.DataFrame({
        "from_id": [k[0] for k in keys],
        "to_id": [k[1] for k in keys],
        "count": [net.weights[k] for k in keys],
    }, columns=["from_id", "to_id", "count"])
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# n_nodes={net.n_nodes}\tk_tot={net.k_tot}\tgames_used={net.games_used}"
                f"\td_s={net.d_s:g}\tmetric={net.metric}\n")
        frame.to_csv(f, sep="\t", index=False, lineterminator="\n")
    return path


def load_network(path: Union[str, Path]) -> PatternNetwork:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        header = f.readline().lstrip("#").strip()
    meta = dict(item.split("=", 1) for item in header.split("\t") if "=" in item)
    frame = pd.read_csv(path, sep="\t", skiprows=1, dtype={"from_id": int, "to_id": int, "count": int})
    net = PatternNetwork(
        n_nodes=int(meta.get("n_nodes", CATALOG_SIZE)),
        games_used=int(meta.get("games_used", 0)),
        d_s=float(meta.get("d_s", STRATEGIC_DISTANCE)),
        metric=meta.get("metric", DISTANCE_METRIC),
    )
    for a, b, c in frame.itertuples(index=False, name=None):
        net.weights[(int(a), int(b))] += int(c)
    if "k_tot" in meta and int(meta["k_tot"]) != net.k_tot:
        logger.warning(f"⚠️ {path.name}: header k_tot={meta['k_tot']} but weights sum to {net.k_tot}")
    return net
