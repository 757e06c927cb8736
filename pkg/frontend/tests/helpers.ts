/** A fixture-backed fetch router that records every request for inspection. */

import type { EstimateRequest } from "../src/types.js";

import distributionApplied from "./fixtures/distribution_applied.json";
import distributionKaspersky from "./fixtures/distribution_kaspersky.json";
import estimateApplied from "./fixtures/estimate_applied.json";
import estimateKaspersky from "./fixtures/estimate_kaspersky.json";
import factors from "./fixtures/factors.json";
import manifest from "./fixtures/manifest.json";
import recommendApplied from "./fixtures/recommend_applied.json";
import recommendKaspersky from "./fixtures/recommend_kaspersky.json";

export interface RecordedRequest {
  url: string;
  method: string;
  body: EstimateRequest | null;
}

export interface FixtureServer {
  fetch: typeof fetch;
  requests: RecordedRequest[];
  /** When set, /recommend answers with an empty list. */
  emptyRecommendations: boolean;
}

const TOP = manifest.top_recommendation;

function sameSelections(a: Record<string, string>, b: Record<string, string>): boolean {
  const ak = Object.keys(a).sort();
  const bk = Object.keys(b).sort();
  return ak.length === bk.length && ak.every((k, i) => k === bk[i] && a[k] === b[bk[i]]);
}

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/**
 * Serves the captured API documents. Estimate/recommend responses are routed
 * by the request's selections: the empty profile gets the baseline fixtures,
 * the profile with the top recommendation applied gets the post-apply ones.
 */
export function fixtureServer(): FixtureServer {
  const requests: RecordedRequest[] = [];

  const server: FixtureServer = {
    requests,
    emptyRecommendations: false,
    fetch: (async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
      const url = String(input);
      const method = init?.method ?? "GET";
      const body = init?.body ? (JSON.parse(init.body as string) as EstimateRequest) : null;
      requests.push({ url, method, body });

      if (url.endsWith("/api/v1/factors")) {
        return json(factors);
      }
      if (url.includes("/api/v1/estimate")) {
        if (body && sameSelections(body.selections, { [TOP.factor]: TOP.to })) {
          return json(estimateApplied);
        }
        return json(estimateKaspersky);
      }
      if (url.includes("/api/v1/recommend")) {
        if (server.emptyRecommendations) {
          return json({ recommendations: [] });
        }
        if (body && sameSelections(body.selections, { [TOP.factor]: TOP.to })) {
          return json(recommendApplied);
        }
        return json(recommendKaspersky);
      }
      if (url.includes("/api/v1/distribution")) {
        const expected = Number(new URL(url, "http://test").searchParams.get("expected_cost"));
        const applied = Math.abs(expected - estimateApplied.expected_cost)
          < Math.abs(expected - estimateKaspersky.expected_cost);
        return json(applied ? distributionApplied : distributionKaspersky);
      }
      return json({ error: { code: "not_found", message: `no fixture for ${url}` } }, 404);
    }) as typeof fetch,
  };

  return server;
}

export function setNumberInput(root: HTMLElement, testId: string, value: string): void {
  const input = root.querySelector<HTMLInputElement>(`[data-testid="${testId}"]`);
  if (!input) {
    throw new Error(`missing input ${testId}`);
  }
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}
