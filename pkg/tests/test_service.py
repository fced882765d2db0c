import pytest
from fastapi.testclient import TestClient

from splitsim.service.app import app
from test_experiment import SMALL_PROFILE_CSV, small_config_text


@pytest.fixture
def client():
    return TestClient(app)


@pytest.fixture
def config_dir(tmp_path):
    (tmp_path / "profile.csv").write_text(SMALL_PROFILE_CSV)
    return tmp_path


def payload(config_dir, **overrides):
    return {"config_text": small_config_text(**overrides), "base_dir": str(config_dir)}


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


class TestValidateEndpoint:
    def test_clean_config(self, client, config_dir):
        resp = client.post("/config/validate", json=payload(config_dir))
        assert resp.status_code == 200
        assert resp.json() == {"ok": True, "kind": "ok", "diagnostics": []}

    def test_semantic_diagnostics_listed(self, client, config_dir):
        resp = client.post("/config/validate", json=payload(config_dir, f_l_min="2.0e+9"))
        body = resp.json()
        assert resp.status_code == 200 and not body["ok"]
        assert body["kind"] == "semantic"
        assert any(d["location"] == "device" for d in body["diagnostics"])

    def test_parse_error_is_400(self, client):
        resp = client.post("/config/validate", json={"config_text": "a: [unclosed", "base_dir": "."})
        assert resp.status_code == 400
        assert resp.json()["kind"] == "parse"


class TestRunEndpoint:
    def test_artifacts_returned(self, client, config_dir):
        resp = client.post("/experiments/run", json=payload(config_dir))
        assert resp.status_code == 200
        artifacts = resp.json()["artifacts"]
        assert "summary.csv" in artifacts and "cell_g0.75_pl120.csv" in artifacts

    def test_semantic_error_is_422(self, client, config_dir):
        resp = client.post("/experiments/run", json=payload(config_dir, profile_file="missing.csv"))
        assert resp.status_code == 422
        assert resp.json()["kind"] == "semantic"

    def test_deterministic_artifacts(self, client, config_dir):
        a = client.post("/experiments/run", json=payload(config_dir)).json()["artifacts"]
        b = client.post("/experiments/run", json=payload(config_dir)).json()["artifacts"]
        assert a == b


class TestTraceEndpoint:
    def test_trace_returned(self, client, config_dir):
        body = {**payload(config_dir), "policy": "dynamic", "cell_i": 0, "cell_j": 0}
        resp = client.post("/experiments/trace", json=body)
        assert resp.status_code == 200
        out = resp.json()
        assert out["trace_csv"].startswith("t,batch,h2")
        assert out["result"]["policy"] == "dynamic"
        assert out["result"]["slots_counted"] > 0

    def test_bad_cell_is_422(self, client, config_dir):
        body = {**payload(config_dir), "policy": "dynamic", "cell_i": 9, "cell_j": 0}
        resp = client.post("/experiments/trace", json=body)
        assert resp.status_code == 422
