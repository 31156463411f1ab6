import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from go_turing import turing_harness
from go_turing.playout_gen import PlayoutPolicy, PolicyKind, generate_games
from go_turing.turing_harness import (Decision, DrawMode, GameDatabase, IndicatorPoint, InsufficientGames,
                                      SubsampleScheme, draw_plan, eigenvector_profile, group_networks,
                                      indicator_frame, indicator_points, pair_point, run_turing_test,
                                      sample_groups, split_halves, verdict, write_report)


@pytest.fixture(scope="module")
def uniform_halves():
    games = generate_games(PlayoutPolicy(PolicyKind.UNIFORM_RANDOM, max_moves=80, seed=11), 120)
    return split_halves(games, seed=4)


@pytest.fixture
def counted_links(monkeypatch):
    calls = []
    real = turing_harness.game_links

    def _counting(game, *args, **kwargs):
        calls.append(game.source_id)
        return real(game, *args, **kwargs)

    monkeypatch.setattr(turing_harness, "game_links", _counting)
    return calls


def _point(f=0.9, f_sd=0.01, sn=0.8, sn_sd=0.05, sigma=43.7, sigma_sd=5.0, label=("A", "A")):
    return IndicatorPoint(label=label, f_mean=f, f_sd=f_sd, sn_mean=sn, sn_sd=sn_sd,
                          sigma_mean=sigma, sigma_sd=sigma_sd)


def test_zero_instances():
    scheme = SubsampleScheme(group_size=2, n_instances=0)
    assert sample_groups(10, scheme) == []
    assert indicator_points([], [], scheme) == []


def test_sample_groups_redraw():
    groups = sample_groups(20, SubsampleScheme(group_size=5, n_instances=8, rng_seed=1))
    assert len(groups) == 8
    for g in groups:
        assert len(set(g.tolist())) == 5
        assert g.max() < 20


def test_sample_groups_disjoint():
    groups = sample_groups(20, SubsampleScheme(group_size=6, n_instances=10, mode=DrawMode.DISJOINT))
    assert len(groups) == 3
    flat = np.concatenate(groups)
    assert len(set(flat.tolist())) == len(flat)


def test_group_larger_than_database():
    with pytest.raises(InsufficientGames):
        sample_groups(3, SubsampleScheme(group_size=4, n_instances=1))


def test_same_source_plan_is_disjoint():
    plan = draw_plan(10, 10, SubsampleScheme(group_size=5, n_instances=4, rng_seed=3), same=True)
    assert len(plan) == 4
    for a, b in plan:
        assert not set(a.tolist()) & set(b.tolist())
    with pytest.raises(InsufficientGames):
        draw_plan(9, 9, SubsampleScheme(group_size=5, n_instances=1), same=True)


def test_plan_is_seeded():
    scheme = SubsampleScheme(group_size=3, n_instances=5, rng_seed=7)
    a = draw_plan(12, 15, scheme, same=False)
    b = draw_plan(12, 15, scheme, same=False)
    assert all((x[0] == y[0]).all() and (x[1] == y[1]).all() for x, y in zip(a, b))


def test_split_halves():
    games = list(range(11))
    a, b = split_halves(games, seed=4)
    assert len(a) == len(b) == 5
    assert not set(a) & set(b)
    assert split_halves(games, seed=4) == (a, b)


def test_self_comparison_point(uniform_games):
    scheme = SubsampleScheme(group_size=len(uniform_games), n_instances=1)
    points = indicator_points(uniform_games, uniform_games, scheme)
    assert len(points) == 3
    p = points[0]
    assert p.f_mean == pytest.approx(1.0)
    assert p.sn_mean == 1.0
    assert p.sigma_mean == 0.0
    assert p.f_sd == 0.0


def test_verdict_identical_stats():
    w = _point()
    assert verdict(w, w.model_copy(update={"label": ("A", "B")})).decision is Decision.SAME_SOURCE


def test_verdict_large_sigma_gap():
    w = _point()
    b = _point(f=0.6, f_sd=0.02, sn=0.3, sn_sd=0.05, sigma=192.6, sigma_sd=5.0, label=("A", "B"))
    result = verdict(w, b)
    assert result.decision is Decision.DIFFERENT_SOURCE
    assert result.separation["sigma"] == pytest.approx((192.6 - 43.7) / 10.0)


def test_verdict_inconclusive():
    w = _point(f=0.0, f_sd=0.5, sn=0.0, sn_sd=0.5, sigma=0.0, sigma_sd=0.5)
    b = _point(f=2.5, f_sd=0.5, sn=1.5, sn_sd=0.5, sigma=1.5, sigma_sd=0.5)
    result = verdict(w, b)
    assert result.separation["fidelity"] == pytest.approx(2.5)
    assert result.decision is Decision.INCONCLUSIVE


def test_verdict_monotone_in_k():
    w = _point()
    b = _point(f=0.895, sn=0.78, sigma=50.0)
    assert verdict(w, b, k=2.0).decision is Decision.SAME_SOURCE
    assert verdict(w, b, k=10.0).decision is Decision.SAME_SOURCE


def test_verdict_demoted_as_k_grows():
    w = _point(f=0.0, f_sd=0.1, sn=0.0, sn_sd=0.1, sigma=0.0, sigma_sd=0.1)
    b = _point(f=1.0, f_sd=0.1, sn=1.0, sn_sd=0.1, sigma=1.0, sigma_sd=0.1)
    assert verdict(w, b, k=2.0).decision is Decision.DIFFERENT_SOURCE
    assert verdict(w, b, k=10.0).decision is Decision.INCONCLUSIVE


def test_verdict_never_promoted_by_larger_k():
    rng = np.random.default_rng(8)
    ks = [0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0]
    for _ in range(200):
        sd = rng.uniform(0.01, 1.0, size=6)
        mu = rng.normal(0.0, 3.0, size=6)
        w = _point(f=mu[0], f_sd=sd[0], sn=mu[1], sn_sd=sd[1], sigma=mu[2], sigma_sd=sd[2])
        b = _point(f=mu[3], f_sd=sd[3], sn=mu[4], sn_sd=sd[4], sigma=mu[5], sigma_sd=sd[5])
        decisions = [verdict(w, b, k=k).decision for k in ks]
        different = [d is Decision.DIFFERENT_SOURCE for d in decisions]
        # DifferentSource 는 k 가 커지면 사라질 수만 있음
        assert different == sorted(different, reverse=True)
        if Decision.SAME_SOURCE in decisions:
            assert set(decisions) <= {Decision.SAME_SOURCE, Decision.DIFFERENT_SOURCE}
            assert decisions[-1] is Decision.SAME_SOURCE


def test_pair_point_is_deterministic(uniform_games, greedy_games):
    scheme = SubsampleScheme(group_size=4, n_instances=3, rng_seed=2)
    a = pair_point(uniform_games, greedy_games, scheme)
    b = pair_point(uniform_games, greedy_games, scheme, workers=1)
    assert a == b
    assert a.n_instances == 3


def test_link_cache_reused(uniform_games):
    db = GameDatabase(name="A", games=uniform_games)
    first = db.links
    assert db.links is first
    assert db.network().k_tot == sum(sum(c.values()) for c in first)


def test_links_counted_once_per_game_under_workers(counted_links, uniform_games, greedy_games):
    scheme = SubsampleScheme(group_size=3, n_instances=3, rng_seed=1)
    run_turing_test(uniform_games, greedy_games, scheme, workers=4)
    assert len(counted_links) == len(uniform_games) + len(greedy_games)


def test_links_shared_across_threads(counted_links, uniform_games):
    db = GameDatabase(name="A", games=uniform_games, workers=2)
    with ThreadPoolExecutor(max_workers=8) as pool:
        seen = list(pool.map(lambda _: db.links, range(16)))
    assert all(s is seen[0] for s in seen)
    assert len(counted_links) == len(uniform_games)


def test_group_networks_partition(uniform_games):
    nets = group_networks(uniform_games, 5, seed=3)
    assert len(nets) == 2
    assert all(n.games_used == 5 for n in nets)
    again = group_networks(uniform_games, 5, seed=3)
    assert [n.weights for n in nets] == [n.weights for n in again]
    assert len(group_networks(uniform_games, 12)) == 1
    with pytest.raises(InsufficientGames):
        group_networks(uniform_games, 13)
    with pytest.raises(InsufficientGames):
        group_networks(uniform_games, 0)


def test_split_halves_indicator_points(uniform_halves):
    half_a, half_b = uniform_halves
    assert len(half_a) == len(half_b) == 60
    scheme = SubsampleScheme(group_size=30, n_instances=3, rng_seed=0)
    points = indicator_points(half_a, half_b, scheme)
    assert [p.label for p in points] == [("A", "A"), ("A", "B"), ("B", "B")]
    for p in points:
        assert p.f_mean > 0.9
        assert p.sigma_mean < 0.75 * 450
    assert indicator_points(half_a, half_b, scheme) == points


def test_eigenvector_profile_on_halves(uniform_halves):
    half_a, half_b = uniform_halves
    scheme = SubsampleScheme(group_size=60, n_instances=1, rng_seed=0)
    prof = eigenvector_profile(half_a, half_b, scheme, k=7)
    assert prof.n_pairs == 1
    assert all(0.0 <= f <= 1.0 for f in prof.f_mean)
    # 1순위 고유벡터는 PageRank 와 같음
    assert prof.f_mean[0] > 0.9
    assert np.mean(prof.f_mean[3:]) < prof.f_mean[0]


def test_run_turing_same_database(uniform_games):
    scheme = SubsampleScheme(group_size=3, n_instances=3, rng_seed=1)
    report = run_turing_test(uniform_games, uniform_games, scheme)
    assert report.verdict.decision is Decision.SAME_SOURCE
    assert report.within.model_dump(exclude={"label"}) == report.between.model_dump(exclude={"label"})
    assert report.seeds == {"draws": 1}
    assert "stand-in" in report.verdict.rule


def test_run_turing_insufficient(uniform_games, greedy_games):
    scheme = SubsampleScheme(group_size=10, n_instances=2)
    with pytest.raises(InsufficientGames):
        run_turing_test(uniform_games, greedy_games, scheme)


def test_report_files(tmp_path, uniform_games, greedy_games):
    scheme = SubsampleScheme(group_size=3, n_instances=2, rng_seed=5)
    report = run_turing_test(uniform_games, greedy_games, scheme, names=("uniform", "greedy"))
    json_path, csv_path = write_report(report, tmp_path)
    data = json.loads(json_path.read_text())
    assert data["scheme"]["group_size"] == 3
    assert data["verdict"]["decision"] in {d.value for d in Decision}
    frame = indicator_frame(report)
    assert list(frame["kind"]) == ["reference"] * 3 + ["within", "between"]
    assert frame["label"].tolist()[:3] == ["uniform|uniform", "uniform|greedy", "greedy|greedy"]
    assert csv_path.read_text().count("\n") == 6


def test_eigenvector_profile_length(uniform_games):
    scheme = SubsampleScheme(group_size=4, n_instances=1)
    prof = eigenvector_profile(uniform_games, uniform_games, scheme, alpha=0.85, k=1)
    assert prof.ranks == [1]
    assert len(prof.f_mean) == len(prof.sn_sd) == 1
    assert 0.0 <= prof.f_mean[0] <= 1.0


@pytest.mark.slow
def test_synthetic_corpora_are_told_apart():
    uniform = generate_games(PlayoutPolicy(PolicyKind.UNIFORM_RANDOM, seed=0), 1000)
    greedy = generate_games(PlayoutPolicy(PolicyKind.GREEDY_CAPTURE, seed=50_000), 1000)
    scheme = SubsampleScheme(group_size=200, n_instances=10, rng_seed=0)

    report = run_turing_test(uniform, greedy, scheme, names=("uniform", "greedy"))
    assert report.within.sigma_mean < report.between.sigma_mean
    assert report.verdict.decision is Decision.DIFFERENT_SOURCE

    half_a, half_b = split_halves(uniform, seed=1)
    scheme = SubsampleScheme(group_size=100, n_instances=10, rng_seed=0)
    assert run_turing_test(half_a, half_b, scheme).verdict.decision is Decision.SAME_SOURCE
