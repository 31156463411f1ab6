#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cli.py
- 패턴 네트워크 파이프라인 명령행 도구
  catalog  : 1107개 패턴 클래스 CSV
  build    : SGF 데이터베이스 → 네트워크 TSV + 링크 분포 CSV + 멱법칙 지수 γ
  analyze  : 네트워크 → PageRank / 스펙트럼 / λ_c / 상위 20 패턴
  profile  : SGF 데이터베이스 → 그룹 크기별 λ_c(x) 평균 ± 표준편차
  compare  : 네트워크 두 개 → 비교 지표 JSON + 상관 CSV
  turing   : 데이터베이스 두 개 → 판정 JSON + 지표 산점도 CSV
  generate : 합성 기보 데이터베이스(SGF) 생성

종료 코드: 0 성공, 1 사용법 오류, 2 검증 실패, 3 수치 계산 실패
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from . import figures
from .config import (DISPERSION_HALF, DISTANCE_METRIC, EIGENVECTOR_COUNT, PAGERANK_ALPHA,
                     PARALLEL_MAX_WORKERS, PLAYOUT_MAX_MOVES, RANK_WINDOW, SPECTRUM_ALPHA,
                     STRATEGIC_DISTANCE, STRICT_DISTANCE, VERDICT_K, RunConfig, setup_logging)
from .network_builder import (DegreeDistribution, EmptyNetwork, build_network_parallel, degree_distribution,
                              fit_power_law, load_network, save_network)
from .pattern_codec import CatalogMismatch, export_catalog, get_catalog, render_ascii, representative
from .playout_gen import PlayoutPolicy, PolicyKind, generate_games
from .rank_metrics import DimensionMismatch, ZeroVector, compare_vectors, correlation_pairs, \
    eigenvector_curves, ranking_vector, top_overlap
from .sgf_ingest import SgfError, SgfIoError, load_database, save_database
from .spectral import (EigensolverFailure, GoogleMatrixSpec, NoConvergence, full_spectrum, lambda_c_profile,
                       lambda_c_table, pagerank, pagerank_frame, write_eigenvectors, write_pagerank, write_spectrum)
from .turing_harness import (DrawMode, InsufficientGames, SubsampleScheme, group_networks, indicator_frame,
                             run_turing_test, split_halves, write_report)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

TOP_PATTERNS = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; here usage errors are 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ─────────────────────────────────────────────────────────────
# 1) 공통
# ─────────────────────────────────────────────────────────────
def _run_config(args: argparse.Namespace) -> RunConfig:
    paths = [str(p) for p in (getattr(args, "db", None) or getattr(args, "network", None) or [])]
    return RunConfig(
        command=args.command,
        paths=paths,
        out=str(args.out),
        ds=getattr(args, "ds", STRATEGIC_DISTANCE),
        metric=getattr(args, "metric", DISTANCE_METRIC),
        strict=not getattr(args, "inclusive", not STRICT_DISTANCE),
        alpha=getattr(args, "alpha", PAGERANK_ALPHA),
        spectrum_alpha=getattr(args, "spectrum_alpha", SPECTRUM_ALPHA),
        window=getattr(args, "window", RANK_WINDOW),
        half=getattr(args, "half", DISPERSION_HALF),
        eigenvectors=getattr(args, "eigenvectors", EIGENVECTOR_COUNT),
        group_size=getattr(args, "group_size", None),
        instances=getattr(args, "instances", None),
        mode=getattr(args, "mode", "redraw"),
        seed=getattr(args, "seed", 0),
        k=getattr(args, "k", VERDICT_K),
        workers=getattr(args, "workers", PARALLEL_MAX_WORKERS),
    )


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
    return path


def _load_games(path: str, workers: int):
    games = load_database(path, workers=workers)
    if not games:
        raise EmptyNetwork(f"no games could be read from {path}")
    return games


def _power_law(dist: DegreeDistribution) -> Dict[str, float]:
    """γ of the in/out integrated curves; NaN when a curve has too few points to fit."""
    gammas: Dict[str, float] = {}
    for direction, curve in (("in", dist.curve_in), ("out", dist.curve_out)):
        try:
            gammas[direction] = fit_power_law(curve)
        except ValueError as e:
            logger.warning(f"⚠️ power-law fit skipped for K_{direction}: {e}")
            gammas[direction] = float("nan")
    return gammas


# ─────────────────────────────────────────────────────────────
# 2) 명령
# ─────────────────────────────────────────────────────────────
def cmd_catalog(args: argparse.Namespace) -> int:
    catalog = get_catalog()
    out = export_catalog(catalog, Path(args.out) / "catalog.csv")
    print(catalog.summary())
    print(f"[✓] 카탈로그 저장: {out}")
    return EXIT_OK


def cmd_build(args: argparse.Namespace) -> int:
    out = Path(args.out)
    games = _load_games(args.db[0], args.workers)
    print(f"[i] 기보 {len(games)}개 로드: {args.db[0]}")

    net = build_network_parallel(games, d_s=args.ds, metric=args.metric, strict=not args.inclusive,
                                 workers=args.workers)
    dist = degree_distribution(net)
    save_network(net, out / "network.tsv")
    _write_csv(dist.degree_frame(), out / "degrees.csv")
    _write_csv(dist.curve_frame(), out / "degree_curve.csv")
    gammas = _power_law(dist)
    _write_csv(pd.DataFrame({"direction": list(gammas), "gamma": list(gammas.values())}), out / "power_law.csv")
    if args.svg:
        figures.degree_curve_svg(dist, out / "degree_curve.svg")

    print(f"k_tot={net.k_tot} games_used={net.games_used}")
    print(" ".join(f"gamma_{d}={g:.3f}" for d, g in gammas.items()))
    print(f"[✓] 네트워크 저장: {out / 'network.tsv'}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    out = Path(args.out)
    net = load_network(args.network[0])
    if net.k_tot == 0:
        raise EmptyNetwork(f"{args.network[0]} has no links")

    pr = pagerank(GoogleMatrixSpec(net, args.alpha))
    write_pagerank(pr, out / "pagerank.csv")
    print(f"[i] PageRank: {pr.iterations}회 반복, residual={pr.residual:.2e}")

    # 고유값 산포와 λ_c 는 spectrum-alpha, 고유벡터는 PageRank 와 같은 alpha
    spectrum = full_spectrum(GoogleMatrixSpec(net, args.spectrum_alpha))
    write_spectrum(spectrum, out / "spectrum.csv")
    if args.eigenvectors > 0:
        vectors = full_spectrum(GoogleMatrixSpec(net, args.alpha), k=args.eigenvectors)
        write_eigenvectors(vectors, out / "eigenvectors.csv")
    table = lambda_c_table(spectrum)
    _write_csv(table, out / "lambda_c.csv")

    top = pagerank_frame(pr).head(TOP_PATTERNS)
    blocks = []
    for rank, node, p in top.itertuples(index=False, name=None):
        blocks.append(f"{rank:2d}. #{node} p={p:.5f}\n{render_ascii(representative(int(node)))}")
    text = "\n\n".join(blocks) + "\n"
    (out / "top_patterns.txt").write_text(text, encoding="utf-8")
    print(text)

    if args.svg:
        ids = [int(n) for n in top["node_id"]]
        figures.spectrum_svg(spectrum, out / "spectrum.svg")
        figures.pattern_tiles_svg([representative(i) for i in ids], ids, out / "top_patterns.svg")

    for x, lam in table.itertuples(index=False, name=None):
        print(f"  λ_c({x:g}) = {lam:.6f}")
    print(f"[✓] 분석 결과 저장: {out}")
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    out = Path(args.out)
    games = _load_games(args.db[0], args.workers)
    print(f"[i] 기보 {len(games)}개 로드: {args.db[0]}")

    frames = []
    for g in args.sizes:
        nets = group_networks(games, g, seed=args.seed, d_s=args.ds, metric=args.metric,
                              strict=not args.inclusive, workers=args.workers)
        frame = lambda_c_profile(nets, alpha=args.spectrum_alpha)
        frame.insert(0, "group_size", g)
        frames.append(frame)
        print(f"[i] 그룹 {g}개 × m={len(nets)}: "
              + ", ".join(f"λ_c({x:g})={mu:.4f}±{sd:.4f}"
                          for x, mu, sd in frame[["x", "mean", "sd"]].itertuples(index=False, name=None)))

    path = _write_csv(pd.concat(frames, ignore_index=True), out / "lambda_c_profile.csv")
    print(f"[✓] λ_c 프로파일 저장: {path}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    out = Path(args.out)
    net_a, net_b = load_network(args.network[0]), load_network(args.network[1])
    pa = pagerank(GoogleMatrixSpec(net_a, args.alpha)).p
    pb = pagerank(GoogleMatrixSpec(net_b, args.alpha)).p
    report = compare_vectors(pa, pb, window=args.window, half=args.half)

    ra, rb = ranking_vector(pa), ranking_vector(pb)
    pairs = correlation_pairs(ra, rb, args.half)
    _write_csv(pairs, out / "correlation.csv")

    if args.eigenvectors > 0:
        sa = full_spectrum(GoogleMatrixSpec(net_a, args.alpha), k=args.eigenvectors)
        sb = full_spectrum(GoogleMatrixSpec(net_b, args.alpha), k=args.eigenvectors)
        f, so, sn = eigenvector_curves(sa.eigenvectors, sb.eigenvectors, args.window)
        report.fidelity_by_rank, report.s_ordered_by_rank, report.s_nonordered_by_rank = f, so, sn
        _write_csv(pd.DataFrame({"rank": range(1, len(f) + 1), "fidelity": f, "s_ordered": so,
                                 "s_nonordered": sn}), out / "eigenvector_metrics.csv")

    payload = {"config": _run_config(args).model_dump(), "report": report.model_dump(),
               "top20_overlap": top_overlap(ra, rb, TOP_PATTERNS)}
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.json").write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    if args.svg:
        figures.correlation_svg(pairs, out / "correlation.svg")

    print(f"σ={report.sigma:.2f} F={report.fidelity:.4f} S_O={report.s_ordered:.3f} S_N={report.s_nonordered:.3f}")
    print(f"[✓] 비교 결과 저장: {out}")
    return EXIT_OK


def cmd_turing(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if args.self_test:
        if len(args.db) != 1:
            raise UsageError("--self-test takes exactly one database")
        games = _load_games(args.db[0], args.workers)
        db_a, db_b = split_halves(games, args.seed)
        names = ("A1", "A2")
    else:
        if len(args.db) != 2:
            raise UsageError("turing needs two databases (or one with --self-test)")
        db_a = _load_games(args.db[0], args.workers)
        db_b = _load_games(args.db[1], args.workers)
        names = ("A", "B")
    print(f"[i] A={len(db_a)}개, B={len(db_b)}개, 그룹 {args.group_size}개 × {args.instances}회")

    scheme = SubsampleScheme(group_size=args.group_size, n_instances=args.instances,
                             rng_seed=args.seed, mode=DrawMode(args.mode))
    report = run_turing_test(db_a, db_b, scheme, alpha=args.alpha, names=names, k=args.k,
                             window=args.window, half=args.half, profile_k=args.profile,
                             d_s=args.ds, metric=args.metric, strict=not args.inclusive,
                             workers=args.workers, config=_run_config(args))
    json_path, _ = write_report(report, out)
    if args.svg:
        figures.indicator_svg(indicator_frame(report), out / "indicators.svg")

    print(f"verdict: {report.verdict.decision.value}")
    for name, sep in report.verdict.separation.items():
        print(f"  {name}: separation={sep:.2f}")
    print(f"[✓] 보고서 저장: {json_path}")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    policy = PlayoutPolicy(kind=PolicyKind(args.policy), max_moves=args.max_moves, seed=args.seed)
    games = generate_games(policy, args.games)
    paths = save_database(games, args.out, prefix=args.policy)
    print(f"[✓] {len(paths)}개 기보 저장: {args.out}")
    return EXIT_OK


# ─────────────────────────────────────────────────────────────
# 3) 파서
# ─────────────────────────────────────────────────────────────
def _network_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ds", type=float, default=STRATEGIC_DISTANCE, help="전략적 거리 d_s (기본 4)")
    p.add_argument("--metric", choices=("euclidean", "chebyshev"), default=DISTANCE_METRIC,
                   help="거리 척도 (기본 euclidean)")
    p.add_argument("--inclusive", action="store_true", default=not STRICT_DISTANCE,
                   help="distance <= d_s 도 링크로 인정")
    p.add_argument("--workers", type=int, default=PARALLEL_MAX_WORKERS, help="병렬 처리 수")


def _rank_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=PAGERANK_ALPHA, help="PageRank 감쇠 계수 (기본 0.85)")
    p.add_argument("--window", type=int, default=RANK_WINDOW, help="S_O / S_N 상위 구간 (기본 30)")
    p.add_argument("--half", type=int, default=DISPERSION_HALF, help="σ 계산 구간 (기본 553)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="go_turing", description="바둑 패턴 네트워크 분석과 네트워크 튜링 테스트")
    ap.add_argument("--log-level", default=None, help="로그 레벨 (기본 LOG_LEVEL)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("catalog", help="패턴 카탈로그 CSV")
    p.add_argument("--out", default="out", help="출력 디렉터리")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("build", help="SGF 데이터베이스 → 네트워크")
    p.add_argument("db", nargs=1, help="SGF 파일 또는 디렉터리")
    p.add_argument("--out", default="out", help="출력 디렉터리")
    p.add_argument("--svg", action="store_true", help="SVG 그림도 저장")
    _network_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="네트워크 → PageRank / 스펙트럼")
    p.add_argument("network", nargs=1, help="network.tsv")
    p.add_argument("--out", default="out", help="출력 디렉터리")
    p.add_argument("--svg", action="store_true", help="SVG 그림도 저장")
    p.add_argument("--alpha", type=float, default=PAGERANK_ALPHA, help="PageRank / 고유벡터 감쇠 계수 (기본 0.85)")
    p.add_argument("--spectrum-alpha", type=float, default=SPECTRUM_ALPHA, help="고유값 / λ_c 용 α (기본 1.0)")
    p.add_argument("--eigenvectors", type=int, default=EIGENVECTOR_COUNT, help="저장할 고유벡터 수 (0=생략)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("profile", help="그룹 크기별 λ_c(x) 평균 ± 표준편차")
    p.add_argument("db", nargs=1, help="SGF 파일 또는 디렉터리")
    p.add_argument("--group-size", dest="sizes", type=int, nargs="+", required=True,
                   help="그룹당 기보 수 (여러 개 가능)")
    p.add_argument("--seed", type=int, default=0, help="그룹 분할 난수 시드")
    p.add_argument("--spectrum-alpha", type=float, default=SPECTRUM_ALPHA, help="스펙트럼용 α (기본 1.0)")
    p.add_argument("--out", default="out", help="출력 디렉터리")
    _network_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compare", help="네트워크 두 개 비교")
    p.add_argument("network", nargs=2, help="network_a.tsv network_b.tsv")
    p.add_argument("--out", default="out", help="출력 디렉터리")
    p.add_argument("--svg", action="store_true", help="SVG 그림도 저장")
    _rank_flags(p)
    p.add_argument("--eigenvectors", type=int, default=EIGENVECTOR_COUNT,
                   help="비교할 고유벡터 수, α=--alpha (0=생략)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("turing", help="데이터베이스 두 개 판정")
    p.add_argument("db", nargs="+", help="dbA [dbB]")
    p.add_argument("--out", default="out", help="출력 디렉터리")
    p.add_argument("--svg", action="store_true", help="SVG 그림도 저장")
    p.add_argument("--self-test", action="store_true", help="dbA를 반으로 나눠 자기 자신과 비교")
    p.add_argument("--group-size", type=int, required=True, help="부분표본 기보 수")
    p.add_argument("--instances", type=int, default=10, help="반복 횟수")
    p.add_argument("--mode", choices=[m.value for m in DrawMode], default=DrawMode.REDRAW.value,
                   help="표본 추출 방식")
    p.add_argument("--seed", type=int, default=0, help="난수 시드")
    p.add_argument("--k", type=float, default=VERDICT_K, help="DifferentSource 분리 기준 (기본 2)")
    p.add_argument("--profile", type=int, default=0, help="고유벡터 프로파일 순위 수 (0=생략)")
    _rank_flags(p)
    _network_flags(p)
    p.set_defaults(func=cmd_turing)

    p = sub.add_parser("generate", help="합성 기보 생성")
    p.add_argument("--policy", choices=[k.value for k in PolicyKind], default=PolicyKind.UNIFORM_RANDOM.value)
    p.add_argument("--games", type=int, required=True, help="기보 수")
    p.add_argument("--seed", type=int, default=0, help="난수 시드 (기보 g 는 seed+g)")
    p.add_argument("--max-moves", type=int, default=PLAYOUT_MAX_MOVES, help="기보당 최대 수")
    p.add_argument("--out", default="out/games", help="출력 디렉터리")
    p.set_defaults(func=cmd_generate)
    return ap


# ─────────────────────────────────────────────────────────────
# 4) 메인
# ─────────────────────────────────────────────────────────────
def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergence, EigensolverFailure) as e:
        logger.error(f"❌ numeric failure: {e}")
        return EXIT_NUMERIC
    except (CatalogMismatch, SgfError, SgfIoError, EmptyNetwork, InsufficientGames,
            DimensionMismatch, ZeroVector, ValidationError, ValueError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
