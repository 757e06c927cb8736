#!/usr/bin/env python3
"""Tour the HTTP API without leaving the process.

Drives the same application object that `rcvar serve` runs, through an
in-process test client (requires the httpx test dependency). Against a
live server, replace the client with plain HTTP calls to the same paths.
"""

import json

from fastapi.testclient import TestClient

from rcvar import load_bundled_dataset
from rcvar.service import create_app

client = TestClient(create_app(load_bundled_dataset()))

print("GET /api/v1/health")
print(json.dumps(client.get("/api/v1/health").json(), indent=2))

print("\nPOST /api/v1/estimate")
body = {
    "valuation": 168e6,
    "valuation_year": 2022,
    "target_year": 2013,
    "selections": {"Industry": "Banking"},
}
doc = client.post("/api/v1/estimate", json=body).json()
print(f"  expected_cost {doc['expected_cost']:,.0f}")
print(f"  cvar          {doc['cvar']:,.0f}")
print(f"  steps         {[s['step'] for s in doc['breakdown']]}")

print("\nGET /api/v1/factors (first parameter of each factor)")
for factor in client.get("/api/v1/factors").json()["factors"]:
    p = factor["parameters"][0]
    print(f"  {factor['factor']:34s} {p['name']:28s} ratio {p['ratio']:+.4f}")

print("\nGET /api/v1/distribution?expected_cost=8000&confidence=0.95")
view = client.get("/api/v1/distribution",
                  params={"expected_cost": 8000, "confidence": 0.95}).json()
print(f"  {len(view['points'])} density points, "
      f"var_quantile {view['var_quantile']:,.1f}")

print("\nPOST /api/v1/recommend (profile without MFA)")
body["selections"] = {"Multi-factor Authentication": "Not Deployed"}
for rec in client.post("/api/v1/recommend", json=body).json()["recommendations"][:3]:
    print(f"  {rec['factor']}: {rec['from']} -> {rec['to']} "
          f"saves {-rec['delta']:,.0f}")

print("\nerror envelope example (confidence out of range)")
bad = client.post("/api/v1/estimate", json={**body, "confidence": 1.5})
print(f"  HTTP {bad.status_code}: {bad.json()}")
