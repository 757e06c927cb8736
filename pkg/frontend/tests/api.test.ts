import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, getDistribution, postEstimate } from "../src/api.js";
import type { EstimateRequest } from "../src/types.js";

const BODY: EstimateRequest = {
  valuation: 168e6,
  valuation_year: 2022,
  target_year: 2013,
  selections: {},
  confidence: 0.95,
};

function fetchSpy(status: number, payload: unknown) {
  const spy = vi.fn(async () => new Response(JSON.stringify(payload), { status }));
  vi.stubGlobal("fetch", spy);
  return spy;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("postEstimate", () => {
  it("POSTs the body as JSON to the versioned path", async () => {
    const spy = fetchSpy(200, { expected_cost: 1, cvar: 2, confidence: 0.95, breakdown: [] });
    await postEstimate(BODY);
    expect(spy).toHaveBeenCalledOnce();
    const [url, init] = spy.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/v1/estimate");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual(BODY);
  });

  it("raises ApiError carrying the envelope's code and field", async () => {
    fetchSpy(422, {
      error: { code: "invalid_value", field: "confidence", message: "confidence out of range" },
    });
    const failure = await postEstimate(BODY).catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(422);
    expect(failure.code).toBe("invalid_value");
    expect(failure.field).toBe("confidence");
  });

  it("raises a generic ApiError when no envelope is present", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("boom", { status: 500 })));
    const failure = await postEstimate(BODY).catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.code).toBe("http_error");
  });

  it("honors the provided service origin", async () => {
    const spy = fetchSpy(200, { expected_cost: 1, cvar: 2, confidence: 0.95, breakdown: [] });
    globalThis.RCVAR_API_BASE = "http://risk.example:9000";
    try {
      await postEstimate(BODY);
    } finally {
      delete (globalThis as Record<string, unknown>).RCVAR_API_BASE;
    }
    expect((spy.mock.calls[0] as unknown as [string])[0])
      .toBe("http://risk.example:9000/api/v1/estimate");
  });
});

describe("getDistribution", () => {
  it("encodes the query parameters", async () => {
    const spy = fetchSpy(200, { points: [], var_quantile: 0, confidence: 0.95, expected_cost: 1 });
    await getDistribution(8000, 0.95);
    const [url] = spy.mock.calls[0] as unknown as [string];
    expect(url).toBe("/api/v1/distribution?expected_cost=8000&confidence=0.95");
  });
});
