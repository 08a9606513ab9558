// Interactive order table for one supplier group: editable quantities,
// inline violations, utilization bars, and the validate/confirm loop.

import { api, ApiError, OrderRow, PlanSession, Violation } from "./api.js";
import { button, chip, clear, el } from "./dom.js";
import { costDelta, money, pct, recomputeTotals, shortDate, totalsMatch } from "./format.js";
import { canConfirm, canEdit, canValidate, stateLabel } from "./state.js";

type ErrorSink = (err: unknown) => void;

function cellKey(skuId: string | null, period: number | null): string {
  return `${skuId ?? ""}|${period ?? ""}`;
}

function utilBar(label: string, value: number): HTMLElement {
  const wrap = el("div", "util");
  const bar = el("div", "util-bar");
  const fill = el("div", "util-fill");
  fill.style.width = `${Math.min(100, Math.max(0, value))}%`;
  if (value > 100) fill.classList.add("util-over");
  bar.appendChild(fill);
  wrap.appendChild(bar);
  wrap.appendChild(el("span", "util-label", `${label} ${pct(value)}`));
  return wrap;
}

export class PlanView {
  private body: PlanSession | null = null;
  private busy = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly group: string,
    private readonly onError: ErrorSink,
  ) {}

  async refresh(): Promise<void> {
    if (this.busy || this.editingNow()) return;
    this.body = await api.plan(this.group);
    this.render();
  }

  /** True while the operator has an order cell focused; polling must not
      replace the table under their cursor. */
  private editingNow(): boolean {
    const active = document.activeElement;
    return (
      active instanceof HTMLInputElement && this.root.contains(active)
    );
  }

  private async mutate(fn: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await fn();
    } catch (err) {
      this.onError(err);
      if (err instanceof ApiError && err.status === 409) {
        // state moved underneath us; reload the authoritative session
        this.body = await api.plan(this.group);
        this.render();
      }
    } finally {
      this.busy = false;
    }
  }

  private submitEdit(order: OrderRow, value: string): Promise<void> {
    return this.mutate(async () => {
      const quantity = Number(value);
      if (!Number.isInteger(quantity) || quantity < 0) {
        throw new ApiError(0, "BadQuantity", `quantity must be a whole number >= 0, got ${value}`);
      }
      this.body = await api.patchOrders(this.group, this.body!.session.revision, [
        { sku_id: order.sku_id, period: order.period, quantity },
      ]);
      this.render();
    });
  }

  private validate(): Promise<void> {
    return this.mutate(async () => {
      await api.validate(this.group, this.body!.session.revision);
      this.body = await api.plan(this.group);
      this.render();
    });
  }

  private confirm(): Promise<void> {
    return this.mutate(async () => {
      await api.confirm(this.group);
      this.body = await api.plan(this.group);
      this.render();
    });
  }

  private reoptimize(): Promise<void> {
    return this.mutate(async () => {
      this.body = await api.reoptimize(this.group);
      this.render();
    });
  }

  private violationMap(): Map<string, Violation[]> {
    const out = new Map<string, Violation[]>();
    const report = this.body?.session.last_report;
    if (!report) return out;
    for (const v of report.violations) {
      const key = cellKey(v.sku_id, v.period);
      const bucket = out.get(key) ?? [];
      bucket.push(v);
      out.set(key, bucket);
    }
    return out;
  }

  private render(): void {
    if (!this.body) return;
    const { session, plan } = this.body;
    const frozen = !canEdit(session.state);
    clear(this.root);

    const head = el("div", "plan-head");
    head.appendChild(el("h2", "", `${plan.group_id} — supplier ${plan.supplier_id}`));
    head.appendChild(chip(stateLabel(session.state), session.state));
    if (plan.reoptimized) head.appendChild(chip("re-optimized", "info"));
    head.appendChild(el("span", "muted", `revision ${session.revision} · run ${session.run_id}`));
    this.root.appendChild(head);

    const costs = plan.cost_breakdown;
    this.root.appendChild(
      el(
        "div",
        "plan-meta",
        `objective ${money(plan.objective_minor_units)} · purchase ${money(costs.purchase)} · ` +
          `holding ${money(costs.holding)} · containers ${money(costs.container)} · ` +
          `shortage ${money(costs.shortage)} · lead time ${plan.lead_time}`,
      ),
    );

    // advisory totals cross-check; a mismatch means a bug, so say so loudly
    const client = recomputeTotals(plan.orders);
    const totals = el("div", "plan-totals");
    totals.appendChild(
      el(
        "span",
        "",
        `${plan.totals.units} units · order cost ${money(plan.totals.order_cost_minor_units)}`,
      ),
    );
    const delta = costDelta(plan.totals, plan.base_totals);
    if (delta !== 0) {
      totals.appendChild(
        el("span", delta > 0 ? "delta-up" : "delta-down",
           ` (${delta > 0 ? "+" : ""}${money(delta)} vs suggested)`),
      );
    }
    if (!totalsMatch(client, plan.totals)) {
      totals.appendChild(
        el(
          "span",
          "totals-mismatch",
          ` client recompute disagrees (${client.units} units, ` +
            `${money(client.order_cost_minor_units)}) — this is a bug`,
        ),
      );
    }
    this.root.appendChild(totals);

    const actions = el("div", "plan-actions");
    actions.appendChild(
      button("Validate", "btn", () => void this.validate(), canValidate(session.state)),
    );
    actions.appendChild(
      button("Confirm", "btn btn-primary", () => void this.confirm(), canConfirm(session.state)),
    );
    actions.appendChild(
      button(
        "Re-optimize with edits",
        "btn",
        () => void this.reoptimize(),
        canEdit(session.state) && session.edits.length > 0,
      ),
    );
    this.root.appendChild(actions);

    const report = session.last_report;
    if (report) {
      const banner = el(
        "div",
        report.feasible ? "report report-ok" : "report report-bad",
        report.feasible
          ? "Plan validated: all constraints hold."
          : `Validation found ${report.violations.length} violation(s):`,
      );
      if (!report.feasible) {
        const list = el("ul", "violation-list");
        for (const v of report.violations) {
          list.appendChild(el("li", `violation-${v.kind}`, v.message));
        }
        banner.appendChild(list);
      }
      this.root.appendChild(banner);
    }

    this.root.appendChild(this.ordersTable(frozen));
  }

  private ordersTable(frozen: boolean): HTMLTableElement {
    const { plan } = this.body!;
    const violations = this.violationMap();
    const containers = new Map(plan.containers.map((c) => [c.period, c]));
    const table = el("table", "orders");
    const thead = el("thead");
    const hrow = el("tr");
    for (const h of ["SKU", "quantity", "MOQ", "unit cost", "line cost", "load share", ""]) {
      hrow.appendChild(el("th", "", h));
    }
    thead.appendChild(hrow);
    table.appendChild(thead);

    const tbody = el("tbody");
    const periods = [...new Set(plan.orders.map((o) => o.period))].sort((a, b) => a - b);
    for (const period of periods) {
      const rows = plan.orders.filter((o) => o.period === period);
      const box = containers.get(period);
      const divider = el("tr", "period-row");
      const td = el("td", "", "");
      td.colSpan = 7;
      td.textContent =
        `period ${period} · ${shortDate(rows[0].date)}` +
        (box ? ` · ${box.count} container(s)` : "");
      const periodViolations = violations.get(cellKey(null, period)) ?? [];
      for (const v of periodViolations) {
        td.appendChild(el("div", "cell-violation", v.message));
      }
      divider.appendChild(td);
      tbody.appendChild(divider);
      for (const order of rows) tbody.appendChild(this.orderRow(order, violations, frozen));
    }
    table.appendChild(tbody);
    return table;
  }

  private orderRow(
    order: OrderRow,
    violations: Map<string, Violation[]>,
    frozen: boolean,
  ): HTMLTableRowElement {
    const tr = el("tr", order.urgent ? "order urgent" : "order");
    const sku = el("td", "sku");
    const link = el("a", "", order.sku_id);
    link.href = `#/skus/${order.sku_id}`;
    sku.appendChild(link);
    if (order.urgent) sku.appendChild(chip("urgent", "urgent"));
    tr.appendChild(sku);

    const qty = el("td", "qty");
    const input = el("input");
    input.type = "number";
    input.min = "0";
    input.step = "1";
    input.value = String(order.quantity);
    input.disabled = frozen;
    input.addEventListener("change", () => void this.submitEdit(order, input.value));
    qty.appendChild(input);
    if (order.edited) {
      qty.appendChild(chip("edited, not validated", "edited"));
      qty.appendChild(el("span", "muted", ` was ${order.base_quantity}`));
    }
    const cellViolations = violations.get(cellKey(order.sku_id, order.period)) ?? [];
    for (const v of cellViolations) {
      qty.appendChild(el("div", "cell-violation", v.message));
    }
    tr.appendChild(qty);

    tr.appendChild(el("td", "num", String(order.moq)));
    tr.appendChild(el("td", "num", money(order.unit_cost_minor_units)));
    tr.appendChild(el("td", "num", money(order.quantity * order.unit_cost_minor_units)));
    const util = el("td", "utils");
    util.appendChild(utilBar("vol", order.volume_util_pct));
    util.appendChild(utilBar("mass", order.mass_util_pct));
    tr.appendChild(util);
    tr.appendChild(el("td", "", ""));
    return tr;
  }
}
