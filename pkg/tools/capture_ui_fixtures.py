#!/usr/bin/env python3
"""Capture real API responses as fixtures for the frontend test suite.

The frontend consumes the service only through its JSON contract; these
fixtures freeze genuine responses (not hand-written approximations) so the
UI tests exercise the same documents a live server produces.

Run from the repository root: python tools/capture_ui_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from rcvar.dataset import load_bundled_dataset
from rcvar.service import create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

KASPERSKY = {
    "valuation": 168000000,
    "valuation_year": 2022,
    "target_year": 2013,
    "selections": {},
    "confidence": 0.95,
}


def main() -> None:
    client = TestClient(create_app(load_bundled_dataset()))
    OUT.mkdir(parents=True, exist_ok=True)

    fixtures: dict[str, object] = {}
    fixtures["factors.json"] = client.get("/api/v1/factors").json()
    fixtures["health.json"] = client.get("/api/v1/health").json()

    estimate = client.post("/api/v1/estimate", json=KASPERSKY).json()
    fixtures["estimate_kaspersky.json"] = estimate
    recommend = client.post("/api/v1/recommend", json=KASPERSKY).json()
    fixtures["recommend_kaspersky.json"] = recommend

    top = recommend["recommendations"][0]
    applied_body = dict(KASPERSKY, selections={top["factor"]: top["to"]})
    applied = client.post("/api/v1/estimate", json=applied_body).json()
    fixtures["estimate_applied.json"] = applied
    fixtures["recommend_applied.json"] = client.post(
        "/api/v1/recommend", json=applied_body).json()

    for name, expected in (("distribution_kaspersky.json", estimate["expected_cost"]),
                           ("distribution_applied.json", applied["expected_cost"])):
        fixtures[name] = client.get(
            "/api/v1/distribution",
            params={"expected_cost": expected, "confidence": 0.95}).json()

    fixtures["error_confidence.json"] = client.post(
        "/api/v1/estimate", json=dict(KASPERSKY, confidence=1.5)).json()

    for name, doc in fixtures.items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {name}")

    manifest = {
        "kaspersky_request": KASPERSKY,
        "applied_request": applied_body,
        "top_recommendation": top,
    }
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print("wrote manifest.json")


if __name__ == "__main__":
    main()
