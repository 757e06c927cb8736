/**
 * Form state and its pure mapping onto the estimate request body.
 *
 * Everything here is side-effect free so the unspecified-factor omission
 * and validation rules are unit-testable without a DOM or a live service.
 */

import type { EstimateRequest } from "./types.js";

/** The selector value meaning "leave this factor out of the request". */
export const UNSPECIFIED = "";

export const CONFIDENCE_CHOICES = [0.9, 0.95, 0.99] as const;

export interface ProfileFormState {
  valuation: number | null;
  valuationYear: number | null;
  targetYear: number | null;
  /** factor name -> parameter name or UNSPECIFIED */
  selections: Record<string, string>;
  confidence: number;
}

export function emptyForm(factorNames: string[]): ProfileFormState {
  const selections: Record<string, string> = {};
  for (const name of factorNames) {
    selections[name] = UNSPECIFIED;
  }
  return {
    valuation: null,
    valuationYear: null,
    targetYear: null,
    selections,
    confidence: 0.95,
  };
}

function isValidYear(year: number | null): year is number {
  return year !== null && Number.isInteger(year) && year >= 2000 && year <= 2100;
}

/** Submission is allowed once the valuation is positive and both years parse. */
export function isSubmittable(form: ProfileFormState): boolean {
  return (
    form.valuation !== null &&
    Number.isFinite(form.valuation) &&
    form.valuation > 0 &&
    isValidYear(form.valuationYear) &&
    isValidYear(form.targetYear)
  );
}

/**
 * The request body for a valid form. Factors left at UNSPECIFIED are
 * omitted entirely: absence, not an empty value, is the wire encoding of
 * "no selection".
 */
export function buildEstimateRequest(form: ProfileFormState): EstimateRequest {
  if (!isSubmittable(form)) {
    throw new Error("form is not submittable");
  }
  const selections: Record<string, string> = {};
  for (const [factor, parameter] of Object.entries(form.selections)) {
    if (parameter !== UNSPECIFIED) {
      selections[factor] = parameter;
    }
  }
  return {
    valuation: form.valuation as number,
    valuation_year: form.valuationYear as number,
    target_year: form.targetYear as number,
    selections,
    confidence: form.confidence,
  };
}

const usd = new Intl.NumberFormat("en-US", {
  style: "currency",
  currency: "USD",
  maximumFractionDigits: 0,
});

/** Display rounding only; every number shown comes from an API response. */
export function formatUsd(value: number): string {
  return usd.format(value);
}

export function formatPercent(value: number): string {
  return `${Math.round(value * 100)}%`;
}
