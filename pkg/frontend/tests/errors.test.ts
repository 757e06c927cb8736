/** Error presentation: inline field errors and the network-failure retry path. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { initApp } from "../src/app.js";

import errorConfidence from "./fixtures/error_confidence.json";
import estimateKaspersky from "./fixtures/estimate_kaspersky.json";
import distributionKaspersky from "./fixtures/distribution_kaspersky.json";
import recommendKaspersky from "./fixtures/recommend_kaspersky.json";
import factors from "./fixtures/factors.json";
import { setNumberInput } from "./helpers.js";

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

let root: HTMLElement;

afterEach(() => {
  vi.unstubAllGlobals();
});

async function mount(fetchImpl: typeof fetch): Promise<void> {
  vi.stubGlobal("fetch", fetchImpl);
  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app") as HTMLElement;
  await initApp(root);
  setNumberInput(root, "valuation", "1000000");
  setNumberInput(root, "valuation_year", "2022");
  setNumberInput(root, "target_year", "2024");
}

describe("API error envelopes", () => {
  it("renders a field-scoped error inline next to the offending control", async () => {
    await mount((async (input: RequestInfo | URL) => {
      const url = String(input);
      if (url.endsWith("/api/v1/factors")) {
        return json(factors);
      }
      return json(errorConfidence, 422);
    }) as typeof fetch);

    root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!.click();
    await vi.waitFor(() => {
      const slot = root.querySelector('[data-error-for="confidence"]');
      expect(slot?.textContent).toContain("confidence");
    });
    // no banner for a field-scoped error
    expect(root.querySelector('[data-testid="banner"]')?.classList.contains("hidden")).toBe(true);
  });
});

describe("network failure", () => {
  it("shows a retry affordance that resubmits and recovers", async () => {
    let failing = true;
    await mount((async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      if (url.endsWith("/api/v1/factors")) {
        return json(factors);
      }
      if (failing) {
        throw new TypeError("fetch failed");
      }
      if (url.includes("/api/v1/estimate")) {
        return json(estimateKaspersky);
      }
      if (url.includes("/api/v1/recommend")) {
        return json(recommendKaspersky);
      }
      return json(distributionKaspersky);
    }) as typeof fetch);

    root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!.click();
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="retry"]')).not.toBeNull();
    });

    failing = false;
    root.querySelector<HTMLButtonElement>('[data-testid="retry"]')!.click();
    await vi.waitFor(() => {
      expect(root.querySelector('[data-testid="expected-cost"]')).not.toBeNull();
    });
    expect(root.querySelector('[data-testid="banner"]')?.classList.contains("hidden")).toBe(true);
  });
});
