/**
 * Single-in-flight discipline: a newer submission supersedes the pending
 * one, and a late response for a stale token never reaches the dashboard.
 */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { initApp } from "../src/app.js";
import { formatUsd } from "../src/form.js";

import distributionKaspersky from "./fixtures/distribution_kaspersky.json";
import factors from "./fixtures/factors.json";
import recommendKaspersky from "./fixtures/recommend_kaspersky.json";
import { setNumberInput } from "./helpers.js";

function json(payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

const SLOW = { expected_cost: 111111.0, cvar: 333333.0, confidence: 0.95, breakdown: [] };
const FAST = { expected_cost: 222222.0, cvar: 666666.0, confidence: 0.95, breakdown: [] };

let root: HTMLElement;
let releaseSlow: () => void;

beforeEach(async () => {
  let estimateCalls = 0;
  let release: () => void = () => undefined;
  const gate = new Promise<void>((resolve) => {
    release = resolve;
  });
  releaseSlow = release;

  vi.stubGlobal("fetch", (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    if (url.endsWith("/api/v1/factors")) {
      return json(factors);
    }
    if (url.includes("/api/v1/estimate")) {
      estimateCalls += 1;
      if (estimateCalls === 1) {
        await gate;  // the first submission hangs until released
        return json(SLOW);
      }
      return json(FAST);
    }
    if (url.includes("/api/v1/recommend")) {
      return json(recommendKaspersky);
    }
    if (url.includes("/api/v1/distribution")) {
      return json(distributionKaspersky);
    }
    throw new Error(`unexpected url ${url}`);
  }) as typeof fetch);

  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app") as HTMLElement;
  await initApp(root);
});

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("competing submissions", () => {
  it("applies only the latest response and drops the superseded one", async () => {
    setNumberInput(root, "valuation", "168000000");
    setNumberInput(root, "valuation_year", "2022");
    setNumberInput(root, "target_year", "2013");
    const submit = root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!;

    submit.click();  // first submission: its estimate response is gated
    const dashboard = root.querySelector('[data-testid="dashboard"]')!;
    await vi.waitFor(() => {
      expect(dashboard.classList.contains("stale")).toBe(true);
    });

    submit.click();  // second submission supersedes the first
    await vi.waitFor(() => {
      const node = root.querySelector('[data-testid="expected-cost"]');
      expect(node?.textContent).toBe(formatUsd(FAST.expected_cost));
    });

    releaseSlow();  // the stale response arrives late...
    await new Promise((resolve) => setTimeout(resolve, 20));
    // ...and must not overwrite the dashboard
    expect(root.querySelector('[data-testid="expected-cost"]')?.textContent)
      .toBe(formatUsd(FAST.expected_cost));
    expect(dashboard.classList.contains("stale")).toBe(false);
  });
});
