// Typed client for the review service JSON API. All numbers shown in the
// UI come from these payloads; the client recomputes totals only as a
// cross-check, never as the displayed authority.

export type SessionState =
  | "suggested"
  | "edited"
  | "validated_ok"
  | "validated_infeasible"
  | "confirmed";

export interface PlanSummary {
  group_id: string;
  supplier_id: string;
  status: string;
  state: SessionState | null;
  revision: number | null;
  orders: number;
  units: number;
  order_cost_minor_units: number;
}

export interface PlanSummaries {
  run_id: string;
  plans: PlanSummary[];
}

export interface OrderRow {
  sku_id: string;
  period: number;
  date: string;
  quantity: number;
  base_quantity: number;
  edited: boolean;
  urgent: boolean;
  moq: number;
  unit_cost_minor_units: number;
  volume_util_pct: number;
  mass_util_pct: number;
}

export interface ContainerRow {
  period: number;
  date: string;
  count: number;
}

export interface Totals {
  units: number;
  order_cost_minor_units: number;
}

export interface Violation {
  kind: string;
  sku_id: string | null;
  period: number | null;
  slack: number;
  message: string;
}

export interface Report {
  feasible: boolean;
  violations: Violation[];
}

export interface EditEntry {
  sku_id: string;
  period: number;
  quantity: number;
  note: string;
}

export interface Session {
  session_id: string;
  group_id: string;
  run_id: string;
  state: SessionState;
  revision: number;
  edits: EditEntry[];
  last_report: Report | null;
}

export interface Plan {
  group_id: string;
  supplier_id: string;
  status: string;
  reoptimized: boolean;
  horizon: number;
  lead_time: number;
  objective_minor_units: number;
  cost_breakdown: Record<string, number>;
  container_volume_cap: number;
  container_mass_cap: number;
  orders: OrderRow[];
  containers: ContainerRow[];
  totals: Totals;
  base_totals: Totals;
}

export interface PlanSession {
  session: Session;
  plan: Plan;
}

export interface PendingException {
  id: string;
  sku_id: string;
  bucket_index: number;
  date: string;
  score: number;
  actual: number;
  forecast: number;
  suggested_action: string;
  suggested_param: number | null;
  status: string;
  resolved_action?: string;
}

export interface ExceptionList {
  run_id: string;
  exceptions: PendingException[];
}

export interface ForecastPanel {
  sku_id: string;
  level: string;
  history: { dates: string[]; values: number[]; flags: boolean[] };
  forecast: { dates: string[]; values: number[] };
  model: string | null;
  sigma: number | null;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let body: { code?: string; message?: string; details?: Record<string, unknown> };
    try {
      body = await resp.json();
    } catch {
      body = {};
    }
    throw new ApiError(
      resp.status,
      body.code ?? "HttpError",
      body.message ?? `${resp.status} on ${path}`,
      body.details ?? {},
    );
  }
  return resp.json() as Promise<T>;
}

export const api = {
  plans: () => request<PlanSummaries>("/api/plans"),
  plan: (group: string) => request<PlanSession>(`/api/plans/${group}`),
  patchOrders: (group: string, revision: number, orders: object[]) =>
    request<PlanSession>(`/api/plans/${group}/orders`, {
      method: "PATCH",
      body: JSON.stringify({ revision, orders }),
    }),
  validate: (group: string, revision: number) =>
    request<Report & { state: SessionState; revision: number }>(
      `/api/plans/${group}/validate`,
      { method: "POST", body: JSON.stringify({ revision }) },
    ),
  confirm: (group: string) =>
    request<{ group_id: string; state: SessionState; order_ids: string[] }>(
      `/api/plans/${group}/confirm`,
      { method: "POST", body: JSON.stringify({}) },
    ),
  reoptimize: (group: string) =>
    request<PlanSession>(`/api/plans/${group}/reoptimize`, {
      method: "POST",
      body: JSON.stringify({}),
    }),
  exceptions: () => request<ExceptionList>("/api/exceptions"),
  resolve: (id: string, action: string, param: number | null, note = "") =>
    request<{ status: string }>(`/api/exceptions/${id}/resolve`, {
      method: "POST",
      body: JSON.stringify(param === null ? { action, note } : { action, param, note }),
    }),
  forecast: (skuId: string) => request<ForecastPanel>(`/api/skus/${skuId}/forecast`),
};
