"""
SVG figures (matplotlib, Agg backend)
분석 결과를 정적 SVG로 저장한다. 모든 그림은 CSV로도 나가는 데이터를 그대로 그린다.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .network_builder import DegreeDistribution  # noqa: E402
from .pattern_codec import Cell, OFFSETS, RawPattern  # noqa: E402
from .spectral import SpectrumResult  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _save(fig: plt.Figure, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata date keeps reruns byte-identical
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"figure written: {path}")
    return path


def degree_curve_svg(dist: DegreeDistribution, path: PathLike) -> Path:
    """Integrated in/out link distributions on log-log axes with a slope -1 guide."""
    fig, ax = plt.subplots(figsize=(6, 5))
    for name, curve in (("in", dist.curve_in), ("out", dist.curve_out)):
        ax.loglog(curve["k_star"], curve["p"], marker=".", linestyle="none", label=f"K_{name}")
    both = pd.concat([dist.curve_in, dist.curve_out])
    if len(both):
        x = np.logspace(np.log10(both["k_star"].min()), np.log10(both["k_star"].max()), 20)
        x0 = float(np.median(both["k_star"]))
        y0 = float(np.median(both["p"]))
        ax.loglog(x, y0 * x0 / x, color="gray", linestyle="--", label="slope -1")
    ax.set_xlabel("K*")
    ax.set_ylabel("P(K*)")
    ax.legend()
    return _save(fig, path)


def spectrum_svg(spectrum: SpectrumResult, path: PathLike) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), color="gray", linewidth=0.8)
    ev = spectrum.eigenvalues
    ax.plot(ev.real, ev.imag, marker=".", markersize=3, linestyle="none")
    ax.set_aspect("equal")
    ax.set_xlabel("Re λ")
    ax.set_ylabel("Im λ")
    ax.set_title(f"α = {spectrum.alpha:g}")
    return _save(fig, path)


_TILE_COLORS = {Cell.EMPTY: None, Cell.OWN: "black", Cell.OPPONENT: "white", Cell.OFF_BOARD: "lightgray"}


def pattern_tiles_svg(patterns: Sequence[RawPattern], ids: Sequence[int], path: PathLike,
                      columns: int = 5) -> Path:
    """Top patterns drawn with Black to play at the cross."""
    rows = max(1, -(-len(patterns) // columns))
    fig, axes = plt.subplots(rows, columns, figsize=(columns * 1.4, rows * 1.6), squeeze=False)
    for ax in axes.ravel():
        ax.set_axis_off()
    for n, (raw, pid) in enumerate(zip(patterns, ids)):
        ax = axes.ravel()[n]
        ax.set_xlim(-1.6, 1.6)
        ax.set_ylim(-1.6, 1.6)
        ax.set_aspect("equal")
        for k in (-1, 0, 1):
            ax.plot([-1, 1], [k, k], color="saddlebrown", linewidth=0.6)
            ax.plot([k, k], [-1, 1], color="saddlebrown", linewidth=0.6)
        for (dx, dy), cell in zip(OFFSETS, raw.cells):
            colour = _TILE_COLORS[Cell(cell)]
            if colour is None:
                continue
            if Cell(cell) is Cell.OFF_BOARD:
                ax.add_patch(plt.Rectangle((dx - 0.5, -dy - 0.5), 1, 1, color=colour))
            else:
                ax.add_patch(plt.Circle((dx, -dy), 0.42, facecolor=colour, edgecolor="black"))
        ax.plot([0], [0], marker="x", color="red")
        ax.set_title(f"{n + 1}. #{pid}", fontsize=7)
    return _save(fig, path)


def correlation_svg(pairs: pd.DataFrame, path: PathLike, labels=("A", "B")) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(pairs["rank_a"], pairs["rank_b"], marker=".", markersize=2, linestyle="none")
    top = max(int(pairs["rank_a"].max()), int(pairs["rank_b"].max())) if len(pairs) else 1
    ax.plot([1, top], [1, top], color="gray", linestyle="--", linewidth=0.8)
    ax.set_xlabel(f"R_{labels[0]}")
    ax.set_ylabel(f"R_{labels[1]}")
    return _save(fig, path)


def indicator_svg(points: pd.DataFrame, path: PathLike) -> Path:
    """(F, σ) and (S_N, σ) panels with error bars, one marker per label pair."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4.5), sharey=True)
    for _, row in points.iterrows():
        left.errorbar(row["f_mean"], row["sigma_mean"], xerr=row["f_sd"], yerr=row["sigma_sd"],
                      marker="o", capsize=3, label=row["label"])
        right.errorbar(row["sn_mean"], row["sigma_mean"], xerr=row["sn_sd"], yerr=row["sigma_sd"],
                       marker="o", capsize=3, label=row["label"])
    left.set_xlabel("F")
    right.set_xlabel("S_N")
    left.set_ylabel("σ")
    right.legend(fontsize=8)
    return _save(fig, path)
