// Pending demand exception queue: sparkline context plus the three
// resolution actions (keep, reduce 85%, custom replace).

import { api, ApiError, PendingException } from "./api.js";
import { sparkline } from "./chart.js";
import { button, chip, clear, el } from "./dom.js";
import { window as bucketWindow } from "./sparkline.js";

type ErrorSink = (err: unknown) => void;

export const REDUCE_FRACTION = 0.85;

export class ExceptionView {
  private items: PendingException[] = [];
  private busy = false;
  // demand windows fetched once per SKU; the queue re-renders every poll
  private readonly context = new Map<string, { values: number[]; index: number }>();

  constructor(
    private readonly root: HTMLElement,
    private readonly onError: ErrorSink,
  ) {}

  async refresh(): Promise<void> {
    if (this.busy || this.typingNow()) return;
    this.items = (await api.exceptions()).exceptions;
    await Promise.all(this.items.map((item) => this.ensureContext(item)));
    this.render();
  }

  private typingNow(): boolean {
    const active = document.activeElement;
    return active instanceof HTMLInputElement && this.root.contains(active);
  }

  private async ensureContext(item: PendingException): Promise<void> {
    if (this.context.has(item.id)) return;
    try {
      const panel = await api.forecast(item.sku_id);
      const win = bucketWindow(panel.history.values, item.bucket_index, 8);
      this.context.set(item.id, {
        values: win.values,
        index: item.bucket_index - win.offset,
      });
    } catch {
      // sparkline is decoration; the queue still works without it
      this.context.set(item.id, { values: [], index: -1 });
    }
  }

  private resolve(item: PendingException, action: string, param: number | null): void {
    if (this.busy) return;
    this.busy = true;
    void api
      .resolve(item.id, action, param)
      .catch(async (err) => {
        this.onError(err);
        if (err instanceof ApiError && err.status === 409) {
          // already resolved elsewhere; the next fetch shows by whom
        }
      })
      .then(async () => {
        this.items = (await api.exceptions()).exceptions;
        this.render();
      })
      .finally(() => {
        this.busy = false;
      });
  }

  private render(): void {
    clear(this.root);
    this.root.appendChild(el("h2", "", "Pending demand exceptions"));
    const pending = this.items.filter((i) => i.status === "pending");
    const resolved = this.items.filter((i) => i.status !== "pending");

    if (pending.length === 0) {
      this.root.appendChild(
        el("div", "empty-state", "No pending exceptions. New deviations appear here after each weekly step."),
      );
    }
    for (const item of pending) this.root.appendChild(this.card(item));

    if (resolved.length > 0) {
      this.root.appendChild(el("h3", "", "Resolved"));
      for (const item of resolved) {
        const row = el("div", "exception resolved");
        row.appendChild(el("span", "", `${item.sku_id} · ${item.date}`));
        row.appendChild(chip(item.resolved_action ?? "resolved", "info"));
        this.root.appendChild(row);
      }
    }
  }

  private card(item: PendingException): HTMLElement {
    const card = el("div", "exception");
    const head = el("div", "exception-head");
    const link = el("a", "", item.sku_id);
    link.href = `#/skus/${item.sku_id}`;
    head.appendChild(link);
    head.appendChild(el("span", "muted", ` ${item.date} · score ${item.score.toFixed(1)}`));
    head.appendChild(
      el("span", "", ` actual ${item.actual} vs forecast ${item.forecast.toFixed(1)}`),
    );
    head.appendChild(chip(`suggested: ${item.suggested_action}`, "info"));
    card.appendChild(head);

    const ctx = this.context.get(item.id);
    if (ctx && ctx.values.length > 1) {
      card.appendChild(sparkline(ctx.values, ctx.index >= 0 ? ctx.index : null));
    }

    const actions = el("div", "exception-actions");
    actions.appendChild(
      button("Keep", "btn", () => this.resolve(item, "keep", null)),
    );
    actions.appendChild(
      button(`Reduce to ${REDUCE_FRACTION * 100}%`, "btn", () =>
        this.resolve(item, "reduce_fraction", REDUCE_FRACTION),
      ),
    );
    const replaceInput = el("input", "replace-input");
    replaceInput.type = "number";
    replaceInput.min = "0";
    replaceInput.step = "1";
    replaceInput.placeholder = "units";
    actions.appendChild(replaceInput);
    actions.appendChild(
      button("Replace", "btn", () => {
        const value = Number(replaceInput.value);
        if (Number.isInteger(value) && value >= 0) {
          this.resolve(item, "replace", value);
        } else {
          this.onError(new ApiError(0, "BadParam", "replacement must be a whole number >= 0"));
        }
      }),
    );
    card.appendChild(actions);
    return card;
  }
}
