/** JSON documents of the /api/v1 contract. */

export interface EstimateRequest {
  valuation: number;
  valuation_year: number;
  target_year: number;
  selections: Record<string, string>;
  confidence: number;
}

export interface BreakdownStep {
  step: string;
  multiplier: number;
}

export interface EstimateResponse {
  expected_cost: number;
  cvar: number;
  confidence: number;
  breakdown: BreakdownStep[];
}

export interface FactorParameter {
  name: string;
  ratio: number;
  estimated: boolean;
  sources: string[];
  years: number[];
}

export interface FactorEntry {
  factor: string;
  parameters: FactorParameter[];
}

export interface FactorCatalog {
  factors: FactorEntry[];
}

export interface DensityPoint {
  cost: number;
  density: number;
}

export interface DistributionView {
  points: DensityPoint[];
  var_quantile: number;
  confidence: number;
  expected_cost: number;
}

export interface Recommendation {
  factor: string;
  from: string | null;
  to: string;
  new_expected_cost: number;
  delta: number;
}

export interface RecommendResponse {
  recommendations: Recommendation[];
}

export interface HealthResponse {
  status: string;
  dataset_id: string;
  dataset_checksum: string;
  engine_version: string;
}

export interface ErrorEnvelope {
  error: {
    code: string;
    field?: string;
    message: string;
  };
}
