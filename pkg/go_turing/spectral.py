"""
Google matrix spectral analysis
구글 행렬 G = αS + (1-α)/N 의 PageRank, 전체 고유값, λ_c(x), 상위 고유벡터.

S is column-stochastic: column j holds node j's outgoing probabilities and
dangling (zero out-degree) columns are uniform 1/N. PageRank never builds G;
the full spectrum uses one dense LAPACK decomposition (N = 1107 is small).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd
import scipy.linalg
from scipy import sparse

from .config import PAGERANK_ALPHA, PAGERANK_MAX_ITER, PAGERANK_TOL
from .network_builder import PatternNetwork

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-8


class NoConvergence(RuntimeError):
    pass


class EigensolverFailure(RuntimeError):
    pass


@dataclass
class GoogleMatrixSpec:
    source: PatternNetwork
    alpha: float = PAGERANK_ALPHA

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def n(self) -> int:
        return self.source.n_nodes


@dataclass
class StochasticMatrix:
    links: sparse.csr_matrix    # normalized columns of non-dangling nodes, zeros elsewhere
    dangling: np.ndarray        # bool mask of zero out-degree nodes

    @property
    def n(self) -> int:
        return self.links.shape[0]

    def dense(self) -> np.ndarray:
        s = self.links.toarray()
        s[:, self.dangling] = 1.0 / self.n
        return s


def stochastic_matrix(net: PatternNetwork) -> StochasticMatrix:
    adj = net.to_sparse()                       # adj[i, j] = weight(i -> j)
    k_out = np.asarray(adj.sum(axis=1)).ravel()
    dangling = k_out == 0
    inv = np.zeros_like(k_out)
    inv[~dangling] = 1.0 / k_out[~dangling]
    # S[i, j] = weight(j -> i) / K_out(j)
    links = (sparse.diags(inv) @ adj).T.tocsr()
    return StochasticMatrix(links=links, dangling=dangling)


def google_matrix(spec: GoogleMatrixSpec) -> np.ndarray:
    n = spec.n
    return spec.alpha * stochastic_matrix(spec.source).dense() + (1.0 - spec.alpha) / n


@dataclass
class PageRankVector:
    p: np.ndarray
    residual: float
    iterations: int = 0


def _google_step(s: StochasticMatrix, alpha: float, p: np.ndarray) -> np.ndarray:
    n = s.n
    teleport = ((1.0 - alpha) * p.sum() + alpha * p[s.dangling].sum()) / n
    return alpha * (s.links @ p) + teleport


def pagerank(spec: GoogleMatrixSpec, tol: float = PAGERANK_TOL,
             max_iter: int = PAGERANK_MAX_ITER) -> PageRankVector:
    """Power iteration from the uniform vector, stopping on ||p_t+1 - p_t||_1 < tol."""
    s = stochastic_matrix(spec.source)
    n = s.n
    p = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        nxt = _google_step(s, spec.alpha, p)
        nxt /= nxt.sum()
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta < tol:
            residual = float(np.abs(_google_step(s, spec.alpha, p) - p).sum())
            logger.debug(f"pagerank converged in {it} iterations (alpha={spec.alpha}, residual={residual:.2e})")
            return PageRankVector(p=p, residual=residual, iterations=it)
    raise NoConvergence(f"pagerank: power iteration failed to converge in {max_iter} iterations")


# ─────────────────────────────────────────────────────────────
# 전체 스펙트럼
# ─────────────────────────────────────────────────────────────
@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray                         # all N, ordered by (|λ| desc, Re desc, Im desc)
    eigenvectors: np.ndarray = field(default=None)  # (N, k) columns paired with eigenvalues[:k]
    alpha: float = 1.0

    @property
    def k(self) -> int:
        return 0 if self.eigenvectors is None else self.eigenvectors.shape[1]

    def vector(self, rank: int) -> np.ndarray:
        """Eigenvector for the rank-th largest |λ| (rank starts at 1)."""
        return self.eigenvectors[:, rank - 1]


def eigen_order(values: np.ndarray) -> np.ndarray:
    # lexsort uses the last key as primary
    return np.lexsort((-values.imag, -values.real, -np.abs(values)))


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Unit 2-norm, largest-modulus component real and positive."""
    v = v / np.linalg.norm(v)
    j = int(np.argmax(np.abs(v)))
    return v * (abs(v[j]) / v[j])


def full_spectrum(spec: GoogleMatrixSpec, k: int = 0) -> SpectrumResult:
    g = google_matrix(spec)
    try:
        if k > 0:
            values, vectors = scipy.linalg.eig(g, right=True)
        else:
            values = scipy.linalg.eigvals(g)
            vectors = None
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise EigensolverFailure(f"dense eigendecomposition failed: {e}") from e

    order = eigen_order(values)
    values = values[order]
    top = None
    if vectors is not None:
        k = min(k, len(values))
        top = np.column_stack([fix_phase(vectors[:, order[i]]) for i in range(k)])
    logger.debug(f"spectrum: N={len(values)}, alpha={spec.alpha}, max|λ|={np.abs(values).max():.6f}")
    return SpectrumResult(eigenvalues=values, eigenvectors=top, alpha=spec.alpha)


def lambda_c(spectrum: SpectrumResult, x: float, exclude_unit: bool = False) -> float:
    """Radius of the smallest origin-centred disk holding x percent of the eigenvalues."""
    if not 0.0 < x <= 100.0:
        raise ValueError(f"x must lie in (0, 100], got {x}")
    moduli = np.sort(np.abs(spectrum.eigenvalues))
    if exclude_unit:
        unit = np.flatnonzero(np.abs(spectrum.eigenvalues - 1.0) < UNIT_TOL)
        if len(unit):
            drop = np.abs(spectrum.eigenvalues[unit[0]])
            moduli = np.delete(moduli, np.flatnonzero(moduli == drop)[-1])
    n = len(moduli)
    rank = max(1, math.ceil(x * n / 100.0 - 1e-9))
    return float(moduli[rank - 1])


def lambda_c_table(spectrum: SpectrumResult, xs: Sequence[float] = (50, 60, 70, 80, 90),
                   exclude_unit: bool = False) -> pd.DataFrame:
    return pd.DataFrame({"x": list(xs), "lambda_c": [lambda_c(spectrum, x, exclude_unit) for x in xs]})


def lambda_c_profile(networks: Sequence[PatternNetwork], alpha: float = 1.0,
                     xs: Sequence[float] = (50, 60, 70, 80, 90)) -> pd.DataFrame:
    """Mean and sd of λ_c(x) over m networks built from equally sized game groups."""
    rows = np.array([[lambda_c(full_spectrum(GoogleMatrixSpec(net, alpha)), x) for x in xs]
                     for net in networks])
    sd = rows.std(axis=0, ddof=1) if len(networks) > 1 else np.zeros(len(xs))
    return pd.DataFrame({"x": list(xs), "mean": rows.mean(axis=0), "sd": sd, "m": len(networks)})


# ─────────────────────────────────────────────────────────────
# CSV 출력
# ─────────────────────────────────────────────────────────────
def _write(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
    return path


def pagerank_frame(pr: PageRankVector) -> pd.DataFrame:
    order = np.lexsort((np.arange(len(pr.p)), -pr.p))
    return pd.DataFrame({"rank": np.arange(1, len(order) + 1), "node_id": order, "p": pr.p[order]})


def spectrum_frame(spectrum: SpectrumResult) -> pd.DataFrame:
    return pd.DataFrame({"re": spectrum.eigenvalues.real, "im": spectrum.eigenvalues.imag})


def eigenvector_frame(spectrum: SpectrumResult) -> pd.DataFrame:
    frames: List[pd.DataFrame] = []
    for r in range(1, spectrum.k + 1):
        v = spectrum.vector(r)
        lam = spectrum.eigenvalues[r - 1]
        frames.append(pd.DataFrame({
            "rank": r, "lambda_re": lam.real, "lambda_im": lam.imag,
            "node_id": np.arange(len(v)), "re": v.real, "im": v.imag, "abs": np.abs(v),
        }))
    if not frames:
        return pd.DataFrame(columns=["rank", "lambda_re", "lambda_im", "node_id", "re", "im", "abs"])
    return pd.concat(frames, ignore_index=True)


def write_pagerank(pr: PageRankVector, path) -> Path:
    return _write(pagerank_frame(pr), path)


def write_spectrum(spectrum: SpectrumResult, path) -> Path:
    return _write(spectrum_frame(spectrum), path)


def write_eigenvectors(spectrum: SpectrumResult, path) -> Path:
    return _write(eigenvector_frame(spectrum), path)
