import pytest
from fastapi.testclient import TestClient

from go_turing.main import app

from .conftest import GAME_TEXTS

client = TestClient(app)


def test_root():
    r = client.get("/")
    assert r.status_code == 200
    assert r.json()["catalog"] == "1107 classes (954 interior, 135 edge, 18 corner)"


def test_catalog_listing():
    data = client.get("/api/catalog", params={"limit": 5}).json()
    assert data["counts"] == {"interior": 954, "edge": 135, "corner": 18}
    assert [c["id"] for c in data["classes"]] == [0, 1, 2, 3, 4]


def test_single_pattern():
    data = client.get("/api/catalog/0").json()
    assert data["encoding"] == "00000000"
    assert data["ascii"] == "...\n.+.\n..."
    assert client.get("/api/catalog/5000").status_code == 404


def test_network_summary():
    r = client.post("/api/networks", json={"sgf": GAME_TEXTS, "top": 5})
    assert r.status_code == 200
    data = r.json()
    assert data["games_used"] == 2
    assert data["skipped"] == 0
    assert data["k_tot"] > 0
    assert len(data["top"]) == 5
    assert sum(1 for t in data["top"] if t["rank"] == 1) == 1


def test_network_rejects_garbage():
    assert client.post("/api/networks", json={"sgf": ["not sgf"]}).status_code == 400
    assert client.post("/api/networks", json={"sgf": []}).status_code == 422


def test_compare_same_batches():
    r = client.post("/api/compare", json={"sgf_a": GAME_TEXTS, "sgf_b": GAME_TEXTS})
    assert r.status_code == 200
    data = r.json()
    assert data["sigma"] == 0.0
    assert data["fidelity"] == pytest.approx(1.0)
    assert data["s_nonordered"] == 1.0
