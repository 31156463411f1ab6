from collections import Counter

import numpy as np
import pytest

from go_turing.network_builder import PatternNetwork, build_network
from go_turing.spectral import (GoogleMatrixSpec, NoConvergence, SpectrumResult, full_spectrum, google_matrix,
                                lambda_c, lambda_c_profile, lambda_c_table, pagerank, pagerank_frame,
                                stochastic_matrix, write_eigenvectors, write_pagerank, write_spectrum)


def _net(links, n_nodes):
    return PatternNetwork(n_nodes=n_nodes, weights=Counter(links))


@pytest.fixture(scope="module")
def built(uniform_games):
    return build_network(uniform_games)


@pytest.fixture(scope="module")
def built_spectrum(built):
    return full_spectrum(GoogleMatrixSpec(built, 1.0), k=3)


def test_columns_are_stochastic(built):
    s = stochastic_matrix(built).dense()
    assert np.allclose(s.sum(axis=0), 1.0, atol=1e-12)


def test_single_out_link_column():
    s = stochastic_matrix(_net({(0, 1): 5}, 3)).dense()
    assert s[:, 0].tolist() == [0.0, 1.0, 0.0]


def test_isolated_node_is_uniform():
    s = stochastic_matrix(_net({(0, 1): 1}, 1107)).dense()
    assert np.allclose(s[:, 500], 1 / 1107)


def test_pagerank_two_nodes():
    pr = pagerank(GoogleMatrixSpec(_net({(0, 1): 1}, 2), 0.85))
    assert pr.p[0] == pytest.approx(1 / 2.85, abs=1e-9)
    assert pr.p[1] == pytest.approx(1 - 1 / 2.85, abs=1e-9)
    g = google_matrix(GoogleMatrixSpec(_net({(0, 1): 1}, 2), 0.85))
    assert np.allclose(g @ pr.p, pr.p, atol=1e-10)


def test_pagerank_alpha_zero_is_uniform(built):
    pr = pagerank(GoogleMatrixSpec(built, 0.0))
    assert np.allclose(pr.p, 1 / 1107)


def test_pagerank_symmetric_pair():
    pr = pagerank(GoogleMatrixSpec(_net({(0, 1): 3, (1, 0): 3}, 1107)))
    assert pr.p[0] == pytest.approx(pr.p[1], rel=1e-12)


def test_pagerank_on_built_network(built):
    spec = GoogleMatrixSpec(built, 0.85)
    pr = pagerank(spec)
    assert pr.p.sum() == pytest.approx(1.0, abs=1e-12)
    assert (pr.p >= 0).all()
    assert np.abs(google_matrix(spec) @ pr.p - pr.p).sum() < 1e-10


def test_pagerank_no_convergence(built):
    with pytest.raises(NoConvergence):
        pagerank(GoogleMatrixSpec(built, 0.85), max_iter=1)


@pytest.mark.parametrize("alpha", [0.5, 0.85])
def test_power_iteration_contracts(alpha):
    rng = np.random.default_rng(2)
    links = Counter(zip(rng.integers(0, 300, 2000).tolist(), rng.integers(0, 1107, 2000).tolist()))
    g = google_matrix(GoogleMatrixSpec(_net(links, 1107), alpha))
    p = np.full(1107, 1 / 1107)
    deltas = []
    for _ in range(150):
        nxt = g @ p
        deltas.append(np.abs(nxt - p).sum())
        p = nxt
    for prev, cur in zip(deltas, deltas[1:]):
        if prev < 1e-12:
            break
        assert cur <= alpha * prev + 1e-14
    assert p == pytest.approx(pagerank(GoogleMatrixSpec(_net(links, 1107), alpha)).p, abs=1e-8)


def test_alpha_out_of_range(built):
    with pytest.raises(ValueError):
        GoogleMatrixSpec(built, 1.5)


def test_identity_network_spectrum():
    spec = full_spectrum(GoogleMatrixSpec(_net({(i, i): 1 for i in range(4)}, 4), 1.0))
    assert np.allclose(spec.eigenvalues, 1.0)


def test_two_cycle_spectrum():
    spec = full_spectrum(GoogleMatrixSpec(_net({(0, 1): 1, (1, 0): 1}, 2), 1.0), k=2)
    assert np.allclose(spec.eigenvalues, [1.0, -1.0])


def test_built_spectrum_sanity(built, built_spectrum):
    ev = built_spectrum.eigenvalues
    assert len(ev) == 1107
    assert np.abs(ev).max() <= 1 + 1e-8
    assert np.min(np.abs(ev - 1.0)) < 1e-8
    # conjugate pairs
    for lam in ev[np.abs(ev.imag) > 1e-8]:
        assert np.min(np.abs(ev - np.conj(lam))) < 1e-8


def test_eigenpair_residuals(built, built_spectrum):
    g = google_matrix(GoogleMatrixSpec(built, 1.0))
    for r in range(1, built_spectrum.k + 1):
        v = built_spectrum.vector(r)
        lam = built_spectrum.eigenvalues[r - 1]
        assert np.linalg.norm(g @ v - lam * v) / np.linalg.norm(v) < 1e-8
        j = np.argmax(np.abs(v))
        assert v[j].imag == pytest.approx(0.0, abs=1e-12) and v[j].real > 0


def test_lambda_c_examples():
    spec = SpectrumResult(eigenvalues=np.array([1, 0, 0, 0], dtype=complex))
    assert lambda_c(spec, 50) == 0.0
    assert lambda_c(spec, 100) == 1.0
    assert lambda_c(spec, 100, exclude_unit=True) == 0.0
    ten = SpectrumResult(eigenvalues=np.arange(10) / 10 + 0j)
    assert lambda_c(ten, 90) == pytest.approx(0.8)
    with pytest.raises(ValueError):
        lambda_c(ten, 0)


def test_lambda_c_monotone(built_spectrum):
    table = lambda_c_table(built_spectrum)
    assert list(table["x"]) == [50, 60, 70, 80, 90]
    assert (np.diff(table["lambda_c"]) >= 0).all()


def test_lambda_c_profile_single_network(built):
    prof = lambda_c_profile([built], alpha=1.0, xs=(50, 90))
    assert (prof["sd"] == 0).all()
    assert prof["m"].iloc[0] == 1


def test_csv_writers(tmp_path, built, built_spectrum):
    pr = pagerank(GoogleMatrixSpec(built))
    frame = pagerank_frame(pr)
    assert frame["p"].sum() == pytest.approx(1.0, abs=1e-9)
    assert (np.diff(frame["p"]) <= 0).all()
    write_pagerank(pr, tmp_path / "pr.csv")
    rows = write_spectrum(built_spectrum, tmp_path / "sp.csv").read_text().splitlines()
    assert rows[0] == "re,im" and len(rows) == 1108
    ev_rows = write_eigenvectors(built_spectrum, tmp_path / "ev.csv").read_text().splitlines()
    assert len(ev_rows) == 1 + 3 * 1107
