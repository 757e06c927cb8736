/**
 * Application wiring: factor form, dashboard, and the single-in-flight
 * request discipline.
 *
 * Submissions carry a token; a newer submission aborts the pending one and
 * responses are applied only when their token is still the latest, so the
 * dashboard always reflects the last successful response. While a request
 * is in flight the dashboard is visually flagged as stale.
 */

import { ApiError, getDistribution, getFactors, postEstimate, postRecommend } from "./api.js";
import { renderDensityChart } from "./chart.js";
import {
  CONFIDENCE_CHOICES,
  ProfileFormState,
  UNSPECIFIED,
  buildEstimateRequest,
  emptyForm,
  formatPercent,
  formatUsd,
  isSubmittable,
} from "./form.js";
import type {
  DistributionView,
  EstimateResponse,
  FactorCatalog,
  Recommendation,
} from "./types.js";

interface AppState {
  form: ProfileFormState;
  token: number;
  controller: AbortController | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export async function initApp(root: HTMLElement): Promise<void> {
  const catalog = await getFactors();
  const state: AppState = {
    form: emptyForm(catalog.factors.map((f) => f.factor)),
    token: 0,
    controller: null,
  };

  root.innerHTML = "";
  const banner = el("div", { "data-testid": "banner", class: "banner hidden" });
  const formSection = el("section", { class: "profile-form" });
  const dashboard = el("section", { "data-testid": "dashboard", class: "dashboard empty" });
  root.append(banner, formSection, dashboard);

  buildForm(formSection, catalog, state, () => submit());
  dashboard.append(el("p", { class: "placeholder" },
    "Enter a valuation and the years, then estimate."));

  function setBanner(message: string | null, retry: boolean): void {
    banner.innerHTML = "";
    if (message === null) {
      banner.classList.add("hidden");
      return;
    }
    banner.classList.remove("hidden");
    banner.append(el("span", {}, message));
    if (retry) {
      const button = el("button", { "data-testid": "retry", type: "button" }, "Retry");
      button.addEventListener("click", () => submit());
      banner.append(button);
    }
  }

  function clearFieldErrors(): void {
    formSection.querySelectorAll(".field-error").forEach((node) => {
      node.textContent = "";
    });
  }

  function showFieldError(field: string, message: string): boolean {
    const slot = formSection.querySelector(`[data-error-for="${field}"]`);
    if (!slot) {
      return false;
    }
    slot.textContent = message;
    return true;
  }

  async function submit(): Promise<void> {
    if (!isSubmittable(state.form)) {
      return;
    }
    const token = ++state.token;
    state.controller?.abort();
    state.controller = new AbortController();
    const signal = state.controller.signal;
    dashboard.classList.add("stale");
    clearFieldErrors();
    setBanner(null, false);

    const body = buildEstimateRequest(state.form);
    try {
      const estimate = await postEstimate(body, signal);
      if (token !== state.token) {
        return;
      }
      const [distribution, recommendations] = await Promise.all([
        getDistribution(estimate.expected_cost, body.confidence, signal),
        postRecommend(body, signal),
      ]);
      if (token !== state.token) {
        return;
      }
      renderDashboard(estimate, distribution, recommendations.recommendations);
    } catch (error) {
      if (token !== state.token || (error instanceof DOMException && error.name === "AbortError")) {
        return;
      }
      if (error instanceof ApiError) {
        const placed = error.field !== undefined
          && showFieldError(error.field.replace(/^selections\./, ""), error.message);
        if (!placed) {
          setBanner(`${error.code}: ${error.message}`, false);
        }
      } else {
        setBanner("Network failure: the estimation service is unreachable.", true);
      }
    } finally {
      if (token === state.token) {
        dashboard.classList.remove("stale");
      }
    }
  }

  function applyRecommendation(recommendation: Recommendation): void {
    state.form.selections[recommendation.factor] = recommendation.to;
    const select = formSection.querySelector<HTMLSelectElement>(
      `select[data-factor="${recommendation.factor}"]`);
    if (select) {
      select.value = recommendation.to;
    }
    void submit();
  }

  function renderDashboard(
    estimate: EstimateResponse,
    distribution: DistributionView,
    recommendations: Recommendation[],
  ): void {
    dashboard.innerHTML = "";
    dashboard.classList.remove("empty");

    const cards = el("div", { class: "cards" });
    const expectedCard = el("div", { class: "card" });
    expectedCard.append(
      el("h3", {}, "Expected annualized cost"),
      el("p", { "data-testid": "expected-cost", class: "figure" },
        formatUsd(estimate.expected_cost)),
    );
    const cvarCard = el("div", { class: "card" });
    cvarCard.append(
      el("h3", {}, `CVaR at ${formatPercent(estimate.confidence)} confidence`),
      el("p", { "data-testid": "cvar", class: "figure" }, formatUsd(estimate.cvar)),
    );
    cards.append(expectedCard, cvarCard);

    const chartBox = el("div", { class: "chart-box" });
    chartBox.append(
      el("h3", {}, "Cost density (shaded tail beyond the confidence quantile)"),
      renderDensityChart(distribution),
      el("p", { class: "chart-caption" },
        `Quantile at ${formatPercent(distribution.confidence)}: ` +
        `${formatUsd(distribution.var_quantile)}`),
    );

    const breakdownBox = el("div", { class: "breakdown" });
    breakdownBox.append(el("h3", {}, "Breakdown"));
    const table = el("table", { "data-testid": "breakdown" });
    const head = el("tr");
    head.append(el("th", {}, "step"), el("th", {}, "multiplier"));
    table.append(head);
    for (const step of estimate.breakdown) {
      const row = el("tr");
      row.append(el("td", {}, step.step), el("td", {}, step.multiplier.toPrecision(6)));
      table.append(row);
    }
    breakdownBox.append(table);

    const recsBox = el("div", { class: "recommendations" });
    recsBox.append(el("h3", {}, "What-if security actions"));
    const list = el("ol", { "data-testid": "recommendations" });
    if (recommendations.length === 0) {
      recsBox.append(el("p", { "data-testid": "no-recommendations" },
        "No cost-reducing action available."));
    } else {
      for (const rec of recommendations) {
        const item = el("li", { class: "recommendation" });
        const was = rec.from ?? "unspecified";
        item.append(
          el("span", {},
            `${rec.factor}: ${was} → ${rec.to} ` +
            `(new expected cost ${formatUsd(rec.new_expected_cost)}, ` +
            `saves ${formatUsd(-rec.delta)})`),
        );
        const apply = el("button", {
          type: "button",
          "data-testid": "apply",
          "data-new-expected-cost": String(rec.new_expected_cost),
        }, "Apply");
        apply.addEventListener("click", () => applyRecommendation(rec));
        item.append(apply);
        list.append(item);
      }
      recsBox.append(list);
    }

    dashboard.append(cards, chartBox, breakdownBox, recsBox);
  }
}

function buildForm(
  section: HTMLElement,
  catalog: FactorCatalog,
  state: AppState,
  onSubmit: () => void,
): void {
  const form = el("form");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    onSubmit();
  });

  const numbers = el("fieldset", { class: "numbers" });
  numbers.append(el("legend", {}, "Company"));
  numbers.append(
    numberField("valuation", "Valuation (USD)", state, (v) => (state.form.valuation = v)),
    numberField("valuation_year", "Valuation year", state,
      (v) => (state.form.valuationYear = v)),
    numberField("target_year", "Estimate for year", state, (v) => (state.form.targetYear = v)),
    confidenceField(state),
  );
  form.append(numbers);

  const factors = el("fieldset", { class: "factors" });
  factors.append(el("legend", {}, "Business characteristics"));
  for (const entry of catalog.factors) {
    const wrapper = el("label", { class: "factor" });
    wrapper.append(el("span", {}, entry.factor));
    const select = el("select", { "data-factor": entry.factor });
    select.append(el("option", { value: UNSPECIFIED }, "(unspecified)"));
    for (const parameter of entry.parameters) {
      select.append(el("option", { value: parameter.name }, parameter.name));
    }
    select.addEventListener("change", () => {
      state.form.selections[entry.factor] = select.value;
    });
    wrapper.append(select, el("small", { class: "field-error", "data-error-for": entry.factor }));
    factors.append(wrapper);
  }
  form.append(factors);

  const submit = el("button", { type: "submit", "data-testid": "submit", disabled: "" },
    "Estimate");
  form.append(submit);
  section.append(form);

  function refreshSubmittable(): void {
    if (isSubmittable(state.form)) {
      submit.removeAttribute("disabled");
    } else {
      submit.setAttribute("disabled", "");
    }
  }

  function numberField(
    name: string,
    label: string,
    _state: AppState,
    assign: (value: number | null) => void,
  ): HTMLElement {
    const wrapper = el("label", { class: "number-field" });
    wrapper.append(el("span", {}, label));
    const input = el("input", { type: "number", name, "data-testid": name, step: "any" });
    input.addEventListener("input", () => {
      assign(input.value === "" ? null : Number(input.value));
      refreshSubmittable();
    });
    wrapper.append(input, el("small", { class: "field-error", "data-error-for": name }));
    return wrapper;
  }

  function confidenceField(appState: AppState): HTMLElement {
    const wrapper = el("label", { class: "number-field" });
    wrapper.append(el("span", {}, "Confidence"));
    const select = el("select", { "data-testid": "confidence" });
    for (const choice of CONFIDENCE_CHOICES) {
      const option = el("option", { value: String(choice) }, formatPercent(choice));
      if (choice === appState.form.confidence) {
        option.setAttribute("selected", "");
      }
      select.append(option);
    }
    select.addEventListener("change", () => {
      appState.form.confidence = Number(select.value);
    });
    wrapper.append(select, el("small", { class: "field-error", "data-error-for": "confidence" }));
    return wrapper;
  }
}
