/**
 * End-to-end: the mounted application against the captured API documents.
 *
 * Covers the release criterion for the UI: the reference company inputs
 * display the expected cost, applying a recommendation updates the
 * dashboard to its advertised new expected cost, and unspecified selectors
 * are omitted from the request body (verified by inspecting the recorded
 * requests).
 */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { initApp } from "../src/app.js";
import { formatUsd } from "../src/form.js";

import estimateApplied from "./fixtures/estimate_applied.json";
import estimateKaspersky from "./fixtures/estimate_kaspersky.json";
import manifest from "./fixtures/manifest.json";
import { FixtureServer, fixtureServer, setNumberInput } from "./helpers.js";

let root: HTMLElement;
let server: FixtureServer;

beforeEach(async () => {
  server = fixtureServer();
  vi.stubGlobal("fetch", server.fetch);
  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app") as HTMLElement;
  await initApp(root);
});

afterEach(() => {
  vi.unstubAllGlobals();
});

function text(testId: string): string {
  const node = root.querySelector(`[data-testid="${testId}"]`);
  return node?.textContent ?? "";
}

async function submitKasperskyProfile(): Promise<void> {
  setNumberInput(root, "valuation", "168000000");
  setNumberInput(root, "valuation_year", "2022");
  setNumberInput(root, "target_year", "2013");
  const submit = root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!;
  expect(submit.disabled).toBe(false);
  submit.click();
  await vi.waitFor(() => {
    expect(text("expected-cost")).not.toBe("");
  });
}

describe("submitting the reference company profile", () => {
  it("keeps the submit button disabled until the inputs are valid", () => {
    const submit = root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!;
    expect(submit.disabled).toBe(true);
    setNumberInput(root, "valuation", "168000000");
    expect(submit.disabled).toBe(true);
    setNumberInput(root, "valuation_year", "2022");
    setNumberInput(root, "target_year", "2013");
    expect(submit.disabled).toBe(false);
    setNumberInput(root, "valuation", "-1");
    expect(submit.disabled).toBe(true);
  });

  it("displays the service's expected cost for the reference inputs", async () => {
    await submitKasperskyProfile();
    expect(text("expected-cost")).toBe(formatUsd(estimateKaspersky.expected_cost));
    // within 1% of the published out-of-sample anchor
    expect(Math.abs(estimateKaspersky.expected_cost - 71997) / 71997).toBeLessThan(0.01);
    expect(text("cvar")).toBe(formatUsd(estimateKaspersky.cvar));
  });

  it("omits unspecified factors from the request body", async () => {
    await submitKasperskyProfile();
    const estimates = server.requests.filter((r) => r.url.includes("/estimate"));
    expect(estimates.length).toBeGreaterThan(0);
    for (const request of estimates) {
      expect(request.body?.selections).toEqual({});
    }
  });

  it("includes only explicitly selected factors in the request body", async () => {
    const select = root.querySelector<HTMLSelectElement>('select[data-factor="Industry"]')!;
    select.value = "Banking";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    await submitKasperskyProfile();
    const last = server.requests.filter((r) => r.url.includes("/estimate")).at(-1)!;
    expect(last.body?.selections).toEqual({ Industry: "Banking" });
    // switching back to unspecified removes the factor from the body again
    select.value = "";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!.click();
    await vi.waitFor(() => {
      const again = server.requests.filter((r) => r.url.includes("/estimate")).at(-1)!;
      expect(again.body?.selections).toEqual({});
    });
  });

  it("shows the no-action notice when no recommendation reduces cost", async () => {
    server.emptyRecommendations = true;
    await submitKasperskyProfile();
    await vi.waitFor(() => {
      expect(text("no-recommendations")).toContain("No cost-reducing action available");
    });
    expect(root.querySelector('[data-testid="apply"]')).toBeNull();
  });

  it("renders the density chart with both shaded regions", async () => {
    await submitKasperskyProfile();
    expect(root.querySelector(".shade-within")).not.toBeNull();
    expect(root.querySelector(".shade-tail")).not.toBeNull();
    expect(root.querySelector(".quantile-marker")).not.toBeNull();
  });

  it("renders one breakdown row per multiplier step", async () => {
    await submitKasperskyProfile();
    const rows = root.querySelectorAll('[data-testid="breakdown"] tr');
    expect(rows.length).toBe(1 + estimateKaspersky.breakdown.length);
  });
});

describe("applying a recommendation", () => {
  it("updates the dashboard to the advertised new expected cost", async () => {
    await submitKasperskyProfile();
    const apply = root.querySelector<HTMLButtonElement>('[data-testid="apply"]')!;
    const advertised = Number(apply.dataset.newExpectedCost);
    expect(advertised).toBe(manifest.top_recommendation.new_expected_cost);

    apply.click();
    await vi.waitFor(() => {
      expect(text("expected-cost")).toBe(formatUsd(estimateApplied.expected_cost));
    });
    expect(formatUsd(advertised)).toBe(text("expected-cost"));

    // the factor selector now carries the applied parameter
    const select = root.querySelector<HTMLSelectElement>(
      `select[data-factor="${manifest.top_recommendation.factor}"]`)!;
    expect(select.value).toBe(manifest.top_recommendation.to);

    // and the resubmission body contains exactly that selection
    const last = server.requests.filter((r) => r.url.includes("/estimate")).at(-1)!;
    expect(last.body?.selections).toEqual({
      [manifest.top_recommendation.factor]: manifest.top_recommendation.to,
    });
  });

  it("restores the original dashboard when the apply is undone", async () => {
    await submitKasperskyProfile();
    const apply = root.querySelector<HTMLButtonElement>('[data-testid="apply"]')!;
    apply.click();
    await vi.waitFor(() => {
      expect(text("expected-cost")).toBe(formatUsd(estimateApplied.expected_cost));
    });

    // reselect the previous (unspecified) parameter and resubmit
    const select = root.querySelector<HTMLSelectElement>(
      `select[data-factor="${manifest.top_recommendation.factor}"]`)!;
    select.value = "";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    root.querySelector<HTMLButtonElement>('[data-testid="submit"]')!.click();
    await vi.waitFor(() => {
      expect(text("expected-cost")).toBe(formatUsd(estimateKaspersky.expected_cost));
    });
    expect(text("cvar")).toBe(formatUsd(estimateKaspersky.cvar));
  });
});
