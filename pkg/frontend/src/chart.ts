// SVG builders: per-SKU forecast panel and the exception sparklines.

import type { ForecastPanel } from "./api.js";
import { Box, makeScale, markerAt, polylinePoints } from "./sparkline.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgElement(width: number, height: number): SVGSVGElement {
  const el = document.createElementNS(SVG_NS, "svg");
  el.setAttribute("viewBox", `0 0 ${width} ${height}`);
  el.setAttribute("width", String(width));
  el.setAttribute("height", String(height));
  return el;
}

function polyline(points: string, cls: string): SVGPolylineElement {
  const el = document.createElementNS(SVG_NS, "polyline");
  el.setAttribute("points", points);
  el.setAttribute("class", cls);
  el.setAttribute("fill", "none");
  return el;
}

function circle(x: number, y: number, r: number, cls: string): SVGCircleElement {
  const el = document.createElementNS(SVG_NS, "circle");
  el.setAttribute("cx", String(x));
  el.setAttribute("cy", String(y));
  el.setAttribute("r", String(r));
  el.setAttribute("class", cls);
  return el;
}

export function sparkline(
  values: readonly number[],
  highlight: number | null,
  box: Box = { width: 140, height: 32, pad: 3 },
): SVGSVGElement {
  const el = svgElement(box.width, box.height);
  el.classList.add("sparkline");
  el.appendChild(polyline(polylinePoints(values, box), "spark-line"));
  if (highlight !== null) {
    const pt = markerAt(values, highlight, box);
    if (pt) el.appendChild(circle(pt.x, pt.y, 3, "spark-marker"));
  }
  return el;
}

/** History, forecast, and flagged exception buckets in one panel. */
export function forecastChart(panel: ForecastPanel): SVGSVGElement {
  const box: Box = { width: 640, height: 180, pad: 10 };
  const history = panel.history.values;
  const forecast = panel.forecast.values;
  const all = history.concat(forecast);
  const el = svgElement(box.width, box.height);
  el.classList.add("forecast-chart");
  if (all.length === 0) return el;

  const lo = Math.min(...all, 0);
  const hi = Math.max(...all);
  const s = makeScale(all.length, lo, hi, box);
  const coords = (vals: readonly number[], offset: number) =>
    vals.map((v, i) => `${s.x(offset + i)},${s.y(v)}`).join(" ");

  el.appendChild(polyline(coords(history, 0), "history-line"));
  if (forecast.length > 0) {
    // join the last observation to the first forecast point
    const joined = history.length > 0 ? [history[history.length - 1], ...forecast] : forecast;
    const line = polyline(coords(joined, Math.max(0, history.length - 1)), "forecast-line");
    line.setAttribute("stroke-dasharray", "5 3");
    el.appendChild(line);
  }
  panel.history.flags.forEach((flagged, i) => {
    if (flagged) el.appendChild(circle(s.x(i), s.y(history[i]), 3.5, "flag-marker"));
  });
  return el;
}
