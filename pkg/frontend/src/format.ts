// Display formatting plus the advisory totals cross-check. Server numbers
// are authoritative; a recompute mismatch is surfaced as a bug signal,
// never silently replaced.

import type { OrderRow, Totals } from "./api.js";

export function money(minorUnits: number): string {
  const sign = minorUnits < 0 ? "-" : "";
  const cents = Math.abs(Math.round(minorUnits));
  const units = Math.floor(cents / 100).toLocaleString("en-US");
  return `${sign}${units}.${String(cents % 100).padStart(2, "0")}`;
}

export function pct(value: number): string {
  return `${value.toFixed(1)}%`;
}

export function shortDate(iso: string): string {
  return iso.slice(5); // MM-DD; the year is visible in the header
}

export function recomputeTotals(orders: readonly OrderRow[]): Totals {
  let units = 0;
  let cost = 0;
  for (const o of orders) {
    units += o.quantity;
    cost += o.quantity * o.unit_cost_minor_units;
  }
  return { units, order_cost_minor_units: cost };
}

export function totalsMatch(client: Totals, server: Totals): boolean {
  return (
    client.units === server.units &&
    client.order_cost_minor_units === server.order_cost_minor_units
  );
}

export function costDelta(totals: Totals, base: Totals): number {
  return totals.order_cost_minor_units - base.order_cost_minor_units;
}
