// Client-side mirror of the server's session state machine. Buttons are
// gated through these predicates so the UI never submits a transition the
// server would reject for ordering reasons.

import type { SessionState } from "./api.js";

export const STATES: readonly SessionState[] = [
  "suggested",
  "edited",
  "validated_ok",
  "validated_infeasible",
  "confirmed",
];

// re-validation loops are allowed; confirmed is terminal
export const TRANSITIONS: Record<SessionState, readonly SessionState[]> = {
  suggested: ["edited", "validated_ok", "validated_infeasible"],
  edited: ["edited", "validated_ok", "validated_infeasible"],
  validated_ok: ["edited", "validated_ok", "validated_infeasible", "confirmed"],
  validated_infeasible: ["edited", "validated_ok", "validated_infeasible"],
  confirmed: [],
};

export type Op = "edit" | "validate" | "confirm" | "reoptimize";

/** State the server will land in, or null when it would reject the call. */
export function nextState(state: SessionState, op: Op, feasible = true): SessionState | null {
  const target: SessionState =
    op === "edit" || op === "reoptimize"
      ? "edited"
      : op === "validate"
        ? feasible
          ? "validated_ok"
          : "validated_infeasible"
        : "confirmed";
  return TRANSITIONS[state].includes(target) ? target : null;
}

export const canEdit = (s: SessionState): boolean => nextState(s, "edit") !== null;
export const canValidate = (s: SessionState): boolean => nextState(s, "validate") !== null;
export const canConfirm = (s: SessionState): boolean => nextState(s, "confirm") !== null;

export function stateLabel(s: SessionState): string {
  switch (s) {
    case "suggested":
      return "suggested";
    case "edited":
      return "edited, not validated";
    case "validated_ok":
      return "validated";
    case "validated_infeasible":
      return "infeasible";
    case "confirmed":
      return "confirmed";
  }
}
