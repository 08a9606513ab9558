// Entry point: hash routing, the 2-second polling loop, and the error
// banner. Views own their DOM subtree; the app owns navigation and timing.

import { api, ApiError } from "./api.js";
import { forecastChart } from "./chart.js";
import { button, chip, clear, el } from "./dom.js";
import { ExceptionView } from "./exceptions.js";
import { money } from "./format.js";
import { PlanView } from "./plan.js";
import { stateLabel } from "./state.js";

const POLL_MS = 2000;

const main = document.getElementById("main") as HTMLElement;
const banner = document.getElementById("banner") as HTMLElement;

let activeRefresh: (() => Promise<void>) | null = null;

function showError(err: unknown): void {
  clear(banner);
  const message =
    err instanceof ApiError
      ? `${err.code}: ${err.message}`
      : err instanceof Error
        ? `connection problem: ${err.message}`
        : String(err);
  banner.appendChild(el("span", "", message));
  banner.appendChild(button("Retry", "btn btn-small", () => void refreshNow()));
  banner.hidden = false;
}

function clearError(): void {
  banner.hidden = true;
  clear(banner);
}

async function refreshNow(): Promise<void> {
  if (!activeRefresh) return;
  try {
    await activeRefresh();
    clearError();
  } catch (err) {
    showError(err);
  }
}

async function renderPlanList(): Promise<void> {
  const body = await api.plans();
  clear(main);
  main.appendChild(el("h2", "", `Replenishment plans · run ${body.run_id}`));
  const table = el("table", "plan-list");
  const head = el("tr");
  for (const h of ["group", "supplier", "status", "orders", "units", "order cost", ""]) {
    head.appendChild(el("th", "", h));
  }
  table.appendChild(head);
  for (const p of body.plans) {
    const tr = el("tr");
    const name = el("td");
    const link = el("a", "", p.group_id);
    link.href = `#/plans/${p.group_id}`;
    name.appendChild(link);
    tr.appendChild(name);
    tr.appendChild(el("td", "", p.supplier_id));
    const status = el("td");
    status.appendChild(
      p.status === "optimal" && p.state
        ? chip(stateLabel(p.state), p.state)
        : chip(p.status, "bad"),
    );
    tr.appendChild(status);
    tr.appendChild(el("td", "num", String(p.orders)));
    tr.appendChild(el("td", "num", String(p.units)));
    tr.appendChild(el("td", "num", money(p.order_cost_minor_units)));
    tr.appendChild(el("td", "", ""));
    table.appendChild(tr);
  }
  main.appendChild(table);
}

async function renderForecast(skuId: string): Promise<void> {
  const panel = await api.forecast(skuId);
  clear(main);
  main.appendChild(el("h2", "", `Demand and forecast · ${panel.sku_id}`));
  main.appendChild(
    el(
      "div",
      "muted",
      `${panel.level} buckets · model ${panel.model ?? "n/a"}` +
        (panel.sigma !== null ? ` · residual sigma ${panel.sigma.toFixed(2)}` : ""),
    ),
  );
  main.appendChild(forecastChart(panel));
  const flagged = panel.history.flags.filter(Boolean).length;
  main.appendChild(
    el(
      "div",
      "muted",
      `${panel.history.values.length} observed buckets, ${panel.forecast.values.length} ` +
        `forecast buckets, ${flagged} flagged exception(s)`,
    ),
  );
}

function route(): void {
  const hash = location.hash || "#/plans";
  const planMatch = hash.match(/^#\/plans\/([^/]+)$/);
  const skuMatch = hash.match(/^#\/skus\/([^/]+)$/);

  for (const a of document.querySelectorAll("nav a")) {
    a.classList.toggle("active", a.getAttribute("href") === hash);
  }
  clear(main);

  if (planMatch) {
    const view = new PlanView(main, decodeURIComponent(planMatch[1]), showError);
    activeRefresh = () => view.refresh();
  } else if (skuMatch) {
    const skuId = decodeURIComponent(skuMatch[1]);
    activeRefresh = () => renderForecast(skuId);
  } else if (hash === "#/exceptions") {
    const view = new ExceptionView(main, showError);
    activeRefresh = () => view.refresh();
  } else {
    activeRefresh = () => renderPlanList();
  }
  void refreshNow();
}

window.addEventListener("hashchange", route);
route();
setInterval(() => void refreshNow(), POLL_MS);
