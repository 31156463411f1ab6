from collections import Counter

import numpy as np
import pandas as pd
import pytest

from go_turing.go_engine import replay
from go_turing.network_builder import (EmptyNetwork, PatternNetwork, build_network, build_network_parallel,
                                       degree_distribution, distance, fit_power_law, game_links,
                                       integrated_curve, load_network, merge, network_from_links, save_network)
from go_turing.pattern_codec import pattern_id
from go_turing.playout_gen import PlayoutPolicy, PolicyKind, generate_games

from .conftest import make_game


def _brute_force_links(game, d_s=4.0):
    """Link every move to the earliest later move closer than d_s."""
    events = replay(game)
    ids = [pattern_id(e.board_before, e.position, e.color) for e in events]
    links = Counter()
    for a, ea in enumerate(events):
        for b in range(a + 1, len(events)):
            if distance(ea.position, events[b].position) < d_s:
                links[(ids[a], ids[b])] += 1
                break
    return links


def test_single_close_pair():
    net = build_network([make_game([(3, 3), (5, 5)])])
    assert net.k_tot == 1
    assert net.games_used == 1


def test_far_pair_has_no_link():
    assert build_network([make_game([(3, 3), (10, 10)])]).k_tot == 0


def test_open_list_trace():
    game = make_game([(3, 3), (10, 10), (4, 4)])
    events = replay(game)
    first = pattern_id(events[0].board_before, (3, 3), events[0].color)
    third = pattern_id(events[2].board_before, (4, 4), events[2].color)
    assert game_links(game) == Counter({(first, third): 1})


def test_one_move_closes_several():
    # (3,3) and (3,9) are 6 apart; (3,6) is within 3 of both
    links = game_links(make_game([(3, 3), (3, 9), (3, 6)]))
    assert sum(links.values()) == 2


def test_strict_boundary():
    game = make_game([(3, 3), (3, 7)])
    assert build_network([game], strict=True).k_tot == 0
    assert build_network([game], strict=False).k_tot == 1


def test_chebyshev_metric():
    game = make_game([(3, 3), (6, 6)])
    assert build_network([game], metric="euclidean").k_tot == 0     # √18 > 4
    assert build_network([game], metric="chebyshev").k_tot == 1     # 3 < 4


def test_unknown_metric():
    with pytest.raises(ValueError):
        build_network([make_game([(3, 3), (4, 4)])], metric="manhattan")


def test_no_cross_game_links():
    net = build_network([make_game([(3, 3)]), make_game([(4, 4)])])
    assert net.k_tot == 0
    assert net.games_used == 2


def test_setup_stones_emit_no_links():
    game = make_game([(9, 9)], setup_black=[(8, 8), (10, 10)])
    assert build_network([game]).k_tot == 0


def test_matches_brute_force():
    games = generate_games(PlayoutPolicy(PolicyKind.UNIFORM_RANDOM, max_moves=40, seed=7), 200)
    for game in games:
        assert game_links(game) == _brute_force_links(game)


def test_k_tot_bounded_by_plays(uniform_games):
    net = build_network(uniform_games)
    assert net.k_tot <= sum(g.play_count for g in uniform_games)
    assert all(0 <= i < 1107 and 0 <= j < 1107 for i, j in net.weights)


def test_merge_laws(uniform_games, greedy_games):
    a = build_network(uniform_games)
    b = build_network(greedy_games)
    assert merge([a, PatternNetwork()]) == a
    assert merge([a, b]) == merge([b, a])
    assert merge([a, b]) == build_network(list(uniform_games) + list(greedy_games))


def test_merge_rejects_mixed_rules(uniform_games):
    with pytest.raises(ValueError):
        merge([build_network(uniform_games), build_network(uniform_games, d_s=3)])


def test_parallel_equals_sequential(uniform_games):
    seq = build_network(uniform_games)
    par = build_network_parallel(uniform_games, chunk_size=5, workers=3)
    assert par == seq
    assert par.to_sparse().toarray().tolist() == seq.to_sparse().toarray().tolist()


def test_network_from_cached_links(uniform_games):
    per_game = [game_links(g) for g in uniform_games]
    idx = [0, 3, 5]
    assert network_from_links(per_game, idx) == build_network([uniform_games[i] for i in idx])


def test_single_link_degrees():
    net = PatternNetwork(weights=Counter({(4, 7): 1}))
    dist = degree_distribution(net)
    assert dist.k_out[4] == 1 and dist.k_in[7] == 1
    assert dist.k_out.sum() == 1 and dist.k_in.sum() == 1


def test_degree_sums(uniform_games):
    net = build_network(uniform_games)
    dist = degree_distribution(net)
    assert dist.k_in.sum() == dist.k_out.sum() == net.k_tot


def test_curve_endpoints():
    degrees = np.zeros(1107, dtype=np.int64)
    degrees[:10] = [1, 1, 2, 3, 3, 3, 5, 8, 8, 13]
    curve = integrated_curve(degrees, int(degrees.sum()))
    assert curve["p"].iloc[0] == pytest.approx(10 / 1107)          # 1 - N0/N
    assert curve["p"].iloc[-1] == pytest.approx(1 / 1107)
    assert curve["k_star"].iloc[-1] == pytest.approx(13 / degrees.sum())
    assert (np.diff(curve["p"]) <= 0).all()


def test_curve_invariant_under_doubling(uniform_games):
    net = build_network(uniform_games)
    doubled = PatternNetwork(weights=Counter({k: 2 * v for k, v in net.weights.items()}))
    a, b = degree_distribution(net), degree_distribution(doubled)
    assert np.allclose(a.curve_in.to_numpy(), b.curve_in.to_numpy())


def test_empty_network_distribution():
    with pytest.raises(EmptyNetwork):
        degree_distribution(PatternNetwork())


def test_fit_power_law_on_exact_curve():
    k = np.arange(1, 200, dtype=float)
    curve = pd.DataFrame({"k_star": k / k.max(), "p": 0.01 * (k / k.max()) ** -1.0})
    assert fit_power_law(curve) == pytest.approx(1.0, abs=1e-9)


def test_save_load_round_trip(tmp_path, uniform_games):
    net = build_network(uniform_games)
    path = save_network(net, tmp_path / "net.tsv")
    header = path.read_text().splitlines()[0]
    assert header.startswith("# n_nodes=1107\t")
    assert f"k_tot={net.k_tot}" in header
    assert load_network(path) == net


def test_curve_ties_at_maximal_degree():
    degrees = np.zeros(1107, dtype=np.int64)
    degrees[:3] = [1, 5, 5]
    curve = integrated_curve(degrees, 11)
    assert len(curve) == 3
    assert curve["p"].tolist() == pytest.approx([3 / 1107, 2 / 1107, 1 / 1107])
    assert curve["k_star"].tolist() == pytest.approx([1 / 11, 5 / 11, 5 / 11])


def test_merge_empty_network_with_other_rule(uniform_games):
    cheb = build_network(uniform_games, metric="chebyshev")
    assert merge([cheb, PatternNetwork()]) == cheb
    assert merge([PatternNetwork(), cheb]) == cheb
    assert merge([PatternNetwork(), PatternNetwork()]) == PatternNetwork()
