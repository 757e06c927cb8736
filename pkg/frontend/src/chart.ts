/**
 * SVG density chart.
 *
 * Renders the API's density points directly (no resampling): the area up
 * to the value-at-risk quantile is shaded green, the tail beyond it blue,
 * so the shading always splits exactly where the server computed the
 * quantile.
 */

import type { DistributionView } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const CHART_WIDTH = 640;
export const CHART_HEIGHT = 240;
const MARGIN = { top: 12, right: 16, bottom: 28, left: 16 };

interface Scale {
  x(cost: number): number;
  y(density: number): number;
}

function makeScale(view: DistributionView): Scale {
  const costs = view.points.map((p) => p.cost);
  const densities = view.points.map((p) => p.density);
  const xMin = Math.min(...costs);
  const xMax = Math.max(...costs);
  const yMax = Math.max(...densities);
  const innerW = CHART_WIDTH - MARGIN.left - MARGIN.right;
  const innerH = CHART_HEIGHT - MARGIN.top - MARGIN.bottom;
  return {
    x: (cost) => MARGIN.left + ((cost - xMin) / (xMax - xMin || 1)) * innerW,
    y: (density) => MARGIN.top + innerH - (density / (yMax || 1)) * innerH,
  };
}

function areaPath(points: { cost: number; density: number }[], scale: Scale): string {
  if (points.length === 0) {
    return "";
  }
  const baseline = CHART_HEIGHT - MARGIN.bottom;
  const start = points[0];
  let d = `M ${scale.x(start.cost)} ${baseline}`;
  for (const p of points) {
    d += ` L ${scale.x(p.cost)} ${scale.y(p.density)}`;
  }
  d += ` L ${scale.x(points[points.length - 1].cost)} ${baseline} Z`;
  return d;
}

/** Split the point list at the quantile, duplicating the boundary point. */
export function splitAtQuantile(view: DistributionView): {
  within: { cost: number; density: number }[];
  tail: { cost: number; density: number }[];
} {
  const within = view.points.filter((p) => p.cost <= view.var_quantile);
  const tail = view.points.filter((p) => p.cost >= view.var_quantile);
  return { within, tail };
}

export function renderDensityChart(view: DistributionView): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`);
  svg.setAttribute("role", "img");
  svg.classList.add("density-chart");

  const scale = makeScale(view);
  const { within, tail } = splitAtQuantile(view);

  const withinPath = document.createElementNS(SVG_NS, "path");
  withinPath.setAttribute("d", areaPath(within, scale));
  withinPath.classList.add("shade-within");
  svg.appendChild(withinPath);

  const tailPath = document.createElementNS(SVG_NS, "path");
  tailPath.setAttribute("d", areaPath(tail, scale));
  tailPath.classList.add("shade-tail");
  svg.appendChild(tailPath);

  const marker = document.createElementNS(SVG_NS, "line");
  const xq = scale.x(view.var_quantile);
  marker.setAttribute("x1", String(xq));
  marker.setAttribute("x2", String(xq));
  marker.setAttribute("y1", String(MARGIN.top));
  marker.setAttribute("y2", String(CHART_HEIGHT - MARGIN.bottom));
  marker.classList.add("quantile-marker");
  svg.appendChild(marker);

  return svg;
}
