import json
import shutil

import numpy as np
import pytest
from fastapi.testclient import TestClient

from rcvar.dataset import bundled_dataset_path
from rcvar.estimator import CompanyProfile, estimate, recommend_action
from rcvar.service import create_app


def kaspersky_request(**overrides):
    body = {"valuation": 168e6, "valuation_year": 2022, "target_year": 2013, "selections": {}}
    body.update(overrides)
    return body


def random_request(rng, dataset):
    selections = {}
    for table in dataset.factors:
        if rng.random() < 0.4:
            params = table.parameters
            selections[table.factor] = params[rng.integers(len(params))].name
    return {
        "valuation": float(rng.uniform(1e5, 1e10)),
        "valuation_year": int(rng.integers(2017, 2031)),
        "target_year": int(rng.integers(2010, 2031)),
        "selections": selections,
        "confidence": float(rng.uniform(0.51, 0.99)),
    }


class TestEstimateEndpoint:
    def test_kaspersky_scenario(self, client):
        response = client.post("/api/v1/estimate", json=kaspersky_request())
        assert response.status_code == 200
        assert response.json()["expected_cost"] == pytest.approx(71997, rel=0.01)

    def test_matches_library_exactly(self, client, dataset):
        rng = np.random.default_rng(7)
        for _ in range(25):
            body = random_request(rng, dataset)
            response = client.post("/api/v1/estimate", json=body)
            assert response.status_code == 200
            doc = response.json()
            expected = estimate(CompanyProfile(
                valuation=body["valuation"], valuation_year=body["valuation_year"],
                target_year=body["target_year"], selections=body["selections"],
                confidence=body["confidence"]), dataset)
            assert doc["expected_cost"] == expected.expected_cost
            assert doc["cvar"] == expected.cvar
            assert doc["confidence"] == expected.confidence
            assert doc["breakdown"] == [
                {"step": s.step, "multiplier": s.multiplier} for s in expected.breakdown]

    def test_deterministic_byte_identical(self, client):
        body = kaspersky_request(selections={"Industry": "Banking"})
        first = client.post("/api/v1/estimate", json=body)
        second = client.post("/api/v1/estimate", json=body)
        assert first.content == second.content

    def test_confidence_out_of_range(self, client):
        response = client.post("/api/v1/estimate", json=kaspersky_request(confidence=1.5))
        assert response.status_code == 422
        error = response.json()["error"]
        assert error["field"] == "confidence"

    def test_unknown_factor(self, client):
        response = client.post("/api/v1/estimate",
                               json=kaspersky_request(selections={"Bogus": "X"}))
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "unknown_factor"

    def test_unknown_parameter(self, client):
        response = client.post("/api/v1/estimate",
                               json=kaspersky_request(selections={"Industry": "Alchemy"}))
        assert response.status_code == 400
        assert response.json()["error"]["field"] == "selections.Industry"

    def test_unknown_body_field_rejected(self, client):
        response = client.post("/api/v1/estimate", json=kaspersky_request(surprise=1))
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "malformed_request"

    def test_malformed_type(self, client):
        response = client.post("/api/v1/estimate", json=kaspersky_request(valuation="lots"))
        assert response.status_code == 400
        assert response.json()["error"]["field"] == "valuation"

    def test_non_positive_valuation(self, client):
        response = client.post("/api/v1/estimate", json=kaspersky_request(valuation=-5))
        assert response.status_code == 422
        assert response.json()["error"]["field"] == "valuation"

    def test_valuation_year_before_base(self, client):
        response = client.post("/api/v1/estimate", json=kaspersky_request(valuation_year=2010))
        assert response.status_code == 422
        assert response.json()["error"]["field"] == "valuation_year"


class TestFactorsEndpoint:
    def test_exactly_eleven_factors(self, client):
        response = client.get("/api/v1/factors")
        assert response.status_code == 200
        assert len(response.json()["factors"]) == 11

    def test_banking_ratio(self, client):
        doc = client.get("/api/v1/factors").json()
        industry = next(f for f in doc["factors"] if f["factor"] == "Industry")
        banking = next(p for p in industry["parameters"] if p["name"] == "Banking")
        assert round(banking["ratio"], 2) == 0.48
        assert banking["estimated"] is False

    def test_every_parameter_has_sources(self, client):
        doc = client.get("/api/v1/factors").json()
        for factor in doc["factors"]:
            for parameter in factor["parameters"]:
                assert len(parameter["sources"]) >= 1


class TestDistributionEndpoint:
    def test_reference_var_quantile(self, client):
        response = client.get("/api/v1/distribution",
                              params={"expected_cost": 8000, "confidence": 0.95})
        assert response.status_code == 200
        doc = response.json()
        assert doc["var_quantile"] == pytest.approx(23448, rel=0.02)
        assert len(doc["points"]) >= 200
        costs = [p["cost"] for p in doc["points"]]
        assert costs == sorted(costs)
        assert all(p["density"] >= 0 for p in doc["points"])
        assert costs[0] <= doc["var_quantile"] <= costs[-1]

    def test_doubling_expected_cost_doubles_costs_pointwise(self, client):
        base = client.get("/api/v1/distribution",
                          params={"expected_cost": 8000, "confidence": 0.95}).json()
        doubled = client.get("/api/v1/distribution",
                             params={"expected_cost": 16000, "confidence": 0.95}).json()
        for a, b in zip(base["points"], doubled["points"]):
            assert b["cost"] == 2.0 * a["cost"]
        assert doubled["var_quantile"] == 2.0 * base["var_quantile"]

    def test_higher_confidence_moves_quantile_up(self, client):
        q95 = client.get("/api/v1/distribution",
                         params={"expected_cost": 8000, "confidence": 0.95}).json()
        q99 = client.get("/api/v1/distribution",
                         params={"expected_cost": 8000, "confidence": 0.99}).json()
        assert q99["var_quantile"] > q95["var_quantile"]

    def test_rejects_non_positive_expected_cost(self, client):
        response = client.get("/api/v1/distribution",
                              params={"expected_cost": 0, "confidence": 0.95})
        assert response.status_code == 400

    def test_rejects_bad_confidence(self, client):
        response = client.get("/api/v1/distribution",
                              params={"expected_cost": 8000, "confidence": 0.3})
        assert response.status_code == 400

    def test_overflowing_expected_cost_is_a_client_error(self, client):
        # large enough to overflow the rescaled distribution: never a 500
        response = client.get("/api/v1/distribution",
                              params={"expected_cost": 1e308, "confidence": 0.95})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "invalid_value"


class TestRecommendEndpoint:
    def test_matches_library(self, client, dataset):
        body = kaspersky_request(selections={"Multi-factor Authentication": "Not Deployed"})
        response = client.post("/api/v1/recommend", json=body)
        assert response.status_code == 200
        recs = response.json()["recommendations"]
        expected = recommend_action(CompanyProfile(
            valuation=body["valuation"], valuation_year=body["valuation_year"],
            target_year=body["target_year"], selections=body["selections"]), dataset)
        assert recs == [r.to_dict() for r in expected]
        mfa = [r for r in recs if r["factor"] == "Multi-factor Authentication"]
        assert mfa and mfa[0]["to"] == "Deployed" and mfa[0]["delta"] < 0

    def test_empty_when_optimal(self, client, dataset):
        selections = {
            name: min(dataset.factor(name).parameters, key=lambda p: p.ratio).name
            for name in ("Cloud Model", "Employee Training", "Cyber Insurance",
                         "Multi-factor Authentication", "Identity Access Management",
                         "Security Measures")
        }
        response = client.post("/api/v1/recommend",
                               json=kaspersky_request(selections=selections))
        assert response.json()["recommendations"] == []

    def test_stable_across_calls(self, client):
        body = kaspersky_request()
        first = client.post("/api/v1/recommend", json=body)
        second = client.post("/api/v1/recommend", json=body)
        assert first.content == second.content

    def test_validation_mirrors_estimate(self, client):
        response = client.post("/api/v1/recommend", json=kaspersky_request(confidence=2.0))
        assert response.status_code == 422


class TestHealthAndErrors:
    def test_health_ok(self, client, dataset):
        response = client.get("/api/v1/health")
        assert response.status_code == 200
        doc = response.json()
        assert doc["status"] == "ok"
        assert doc["dataset_id"] == dataset.dataset_id
        assert doc["dataset_checksum"] == dataset.checksum
        assert doc["engine_version"]

    def test_health_503_on_corrupt_dataset(self, tmp_path):
        bad = tmp_path / "corrupt"
        shutil.copytree(bundled_dataset_path(), bad)
        (bad / "factors.json").write_text("{broken")
        app = create_app(dataset_path=bad)
        with TestClient(app) as probe:
            response = probe.get("/api/v1/health")
            assert response.status_code == 503
            assert response.json()["error"]["code"] == "dataset_unavailable"
            assert probe.post("/api/v1/estimate", json=kaspersky_request()).status_code == 503

    def test_checksum_tracks_file_changes(self, tmp_path, dataset):
        copy = tmp_path / "copy"
        shutil.copytree(bundled_dataset_path(), copy)
        app = create_app(dataset_path=copy)
        with TestClient(app) as probe:
            assert probe.get("/api/v1/health").json()["dataset_checksum"] == dataset.checksum
        doc = json.loads((copy / "constants.json").read_text())
        doc["cv_ratio"] = 7e-4
        (copy / "constants.json").write_text(json.dumps(doc))
        app = create_app(dataset_path=copy)
        with TestClient(app) as probe:
            assert probe.get("/api/v1/health").json()["dataset_checksum"] != dataset.checksum

    def test_unknown_route_envelope(self, client):
        response = client.get("/api/v1/nope")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "not_found"

    def test_get_on_post_route(self, client):
        response = client.get("/api/v1/estimate")
        assert response.status_code == 405
        assert "error" in response.json()
