"""
Ranking vectors and comparison metrics
랭킹 벡터와 네 가지 비교 지표: 분산 σ, fidelity F, S_O, S_N.

σ is the RMS rank gap over the reference ranking's top half, i.e. the mean
distance of the points (R_A(n), R_B(n)) from the line y = x. It is label
invariant and asymmetric: A is the reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from .config import RANK_WINDOW


class DimensionMismatch(ValueError):
    pass


class ZeroVector(ValueError):
    pass


@dataclass(frozen=True)
class RankingVector:
    order: np.ndarray   # order[k] = node at rank k (0 = largest)

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def rank(self) -> np.ndarray:
        """rank[node] = 0-based rank of node."""
        inv = np.empty_like(self.order)
        inv[self.order] = np.arange(len(self.order))
        return inv

    def top(self, window: int) -> np.ndarray:
        return self.order[:window]


def ranking_vector(v) -> RankingVector:
    """Nodes by decreasing |v_i|, ties broken by node id ascending."""
    v = np.asarray(v)
    if not np.all(np.isfinite(v)):
        raise ValueError("ranking vector needs finite components")
    modulus = np.abs(v)
    return RankingVector(order=np.lexsort((np.arange(len(v)), -modulus)))


def _check_same(a: RankingVector, b: RankingVector) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"rankings over {a.n} and {b.n} nodes")


def dispersion(a: RankingVector, b: RankingVector, half: Optional[int] = None) -> float:
    _check_same(a, b)
    half = a.n // 2 if half is None else half
    if not 0 < half <= a.n:
        raise ValueError(f"half must lie in (0, {a.n}], got {half}")
    k = np.arange(half)                 # 0-based ranks; the gap is the same in 1-based terms
    gaps = k - b.rank[a.order[:half]]
    return float(np.sqrt(np.mean(gaps.astype(np.float64) ** 2)))


def symmetric_dispersion(a: RankingVector, b: RankingVector, half: Optional[int] = None) -> float:
    return max(dispersion(a, b, half), dispersion(b, a, half))


def fidelity(phi, psi) -> float:
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    if phi.shape != psi.shape:
        raise DimensionMismatch(f"vectors of shape {phi.shape} and {psi.shape}")
    na, nb = np.linalg.norm(phi), np.linalg.norm(psi)
    if na == 0 or nb == 0:
        raise ZeroVector("fidelity of a zero vector is undefined")
    return float(min(1.0, abs(np.vdot(phi / na, psi / nb))))


def _check_window(a: RankingVector, window: int) -> None:
    if not 0 < window <= a.n:
        raise ValueError(f"window must lie in (0, {a.n}], got {window}")


def ordered_similarity(a: RankingVector, b: RankingVector, window: int = RANK_WINDOW) -> float:
    _check_same(a, b)
    _check_window(a, window)
    return float(np.count_nonzero(a.top(window) == b.top(window)) / window)


def nonordered_similarity(a: RankingVector, b: RankingVector, window: int = RANK_WINDOW) -> float:
    _check_same(a, b)
    _check_window(a, window)
    return len(set(a.top(window).tolist()) & set(b.top(window).tolist())) / window


def top_overlap(a: RankingVector, b: RankingVector, k: int = 20) -> int:
    _check_same(a, b)
    return len(set(a.top(k).tolist()) & set(b.top(k).tolist()))


def correlation_pairs(a: RankingVector, b: RankingVector, half: Optional[int] = None) -> pd.DataFrame:
    """1-based (R_A(n), R_B(n)) for the reference's top-half nodes."""
    _check_same(a, b)
    half = a.n // 2 if half is None else half
    nodes = a.order[:half]
    return pd.DataFrame({"node_id": nodes, "rank_a": np.arange(1, half + 1), "rank_b": b.rank[nodes] + 1})


class ComparisonReport(BaseModel):
    sigma: float = Field(ge=0)
    fidelity: float = Field(ge=0, le=1)
    s_ordered: float = Field(ge=0, le=1)
    s_nonordered: float = Field(ge=0, le=1)
    window: int = RANK_WINDOW
    half: int = 0
    # per-eigenvector curves (rank 1 = PageRank), filled from eigenvector_curves
    fidelity_by_rank: List[float] = Field(default_factory=list)
    s_ordered_by_rank: List[float] = Field(default_factory=list)
    s_nonordered_by_rank: List[float] = Field(default_factory=list)


def compare_vectors(phi, psi, window: int = RANK_WINDOW, half: Optional[int] = None,
                    symmetric: bool = False) -> ComparisonReport:
    a, b = ranking_vector(phi), ranking_vector(psi)
    half = a.n // 2 if half is None else half
    sigma = symmetric_dispersion(a, b, half) if symmetric else dispersion(a, b, half)
    return ComparisonReport(
        sigma=sigma,
        fidelity=fidelity(phi, psi),
        s_ordered=ordered_similarity(a, b, window),
        s_nonordered=nonordered_similarity(a, b, window),
        window=window,
        half=half,
    )


def eigenvector_curves(vecs_a: np.ndarray, vecs_b: np.ndarray, window: int = RANK_WINDOW):
    """F, S_O, S_N for matching columns (eigenvector ranks 1..k) of two eigenvector blocks."""
    if vecs_a.shape != vecs_b.shape:
        raise DimensionMismatch(f"eigenvector blocks of shape {vecs_a.shape} and {vecs_b.shape}")
    f, so, sn = [], [], []
    for r in range(vecs_a.shape[1]):
        phi, psi = vecs_a[:, r], vecs_b[:, r]
        a, b = ranking_vector(phi), ranking_vector(psi)
        f.append(fidelity(phi, psi))
        so.append(ordered_similarity(a, b, window))
        sn.append(nonordered_similarity(a, b, window))
    return f, so, sn
