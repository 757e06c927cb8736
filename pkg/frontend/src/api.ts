/** Typed client for the /api/v1 endpoints. No numeric processing here. */

import { apiBase } from "./config.js";
import type {
  DistributionView,
  ErrorEnvelope,
  EstimateRequest,
  EstimateResponse,
  FactorCatalog,
  HealthResponse,
  RecommendResponse,
} from "./types.js";

/** A structured error returned by the service's error envelope. */
export class ApiError extends Error {
  readonly code: string;
  readonly field?: string;
  readonly status: number;

  constructor(status: number, code: string, message: string, field?: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.field = field;
  }
}

async function request<T>(path: string, init: RequestInit, signal?: AbortSignal): Promise<T> {
  const response = await fetch(`${apiBase()}${path}`, { ...init, signal });
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    body = null;
  }
  if (!response.ok) {
    const envelope = body as ErrorEnvelope | null;
    if (envelope && typeof envelope === "object" && envelope.error) {
      throw new ApiError(
        response.status,
        envelope.error.code,
        envelope.error.message,
        envelope.error.field,
      );
    }
    throw new ApiError(response.status, "http_error", `HTTP ${response.status}`);
  }
  return body as T;
}

export function getFactors(signal?: AbortSignal): Promise<FactorCatalog> {
  return request<FactorCatalog>("/api/v1/factors", { method: "GET" }, signal);
}

export function getHealth(signal?: AbortSignal): Promise<HealthResponse> {
  return request<HealthResponse>("/api/v1/health", { method: "GET" }, signal);
}

export function postEstimate(body: EstimateRequest, signal?: AbortSignal): Promise<EstimateResponse> {
  return request<EstimateResponse>(
    "/api/v1/estimate",
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    },
    signal,
  );
}

export function postRecommend(body: EstimateRequest, signal?: AbortSignal): Promise<RecommendResponse> {
  return request<RecommendResponse>(
    "/api/v1/recommend",
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    },
    signal,
  );
}

export function getDistribution(
  expectedCost: number,
  confidence: number,
  signal?: AbortSignal,
): Promise<DistributionView> {
  const query = new URLSearchParams({
    expected_cost: String(expectedCost),
    confidence: String(confidence),
  });
  return request<DistributionView>(`/api/v1/distribution?${query}`, { method: "GET" }, signal);
}
