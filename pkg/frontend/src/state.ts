import type { FinishResponse, HistoryResponse, RoundView, SessionStatus } from "./types.js";

export const QUANTITY_MIN = 0.1;
export const QUANTITY_MAX = 6.0;
export const QUANTITY_STEP = 0.01;
export const HISTORY_ROWS = 10;

export interface UiState {
  sessionId: string;
  status: SessionStatus;
  nextRound: number;
  /** newest first, capped at HISTORY_ROWS */
  history: RoundView[];
  sliderValue: number;
  /** server-formatted cumulative profit, two decimals */
  totalProfit: string;
  pending: boolean;
  error: string | null;
  completion: FinishResponse | null;
}

export function initialState(sessionId: string): UiState {
  return {
    sessionId,
    status: "active",
    nextRound: 1,
    history: [],
    sliderValue: QUANTITY_MIN,
    totalProfit: "0.00",
    pending: false,
    error: null,
    completion: null,
  };
}

/** Clamp to the rival interval and snap onto the 0.01 slider grid. */
export function clampQuantity(value: number): number {
  if (!Number.isFinite(value)) {
    return QUANTITY_MIN;
  }
  const clamped = Math.min(Math.max(value, QUANTITY_MIN), QUANTITY_MAX);
  return Math.round(clamped / QUANTITY_STEP) * QUANTITY_STEP;
}

export function formatQuantity(value: number): string {
  return value.toFixed(2);
}

export function fromHistory(state: UiState, h: HistoryResponse): UiState {
  return {
    ...state,
    status: h.status,
    nextRound: h.next_round,
    history: h.records.slice(0, HISTORY_ROWS),
    totalProfit: h.records.length ? h.cum_x : "0.00",
  };
}

/**
 * Adopt a server round record. Idempotent: a record the table already shows
 * (a duplicate submit answered by the server's conflict copy) changes nothing.
 */
export function withRecord(state: UiState, rec: RoundView): UiState {
  if (state.history.length > 0 && state.history[0].round >= rec.round) {
    return state;
  }
  return {
    ...state,
    nextRound: rec.round + 1,
    history: [rec, ...state.history].slice(0, HISTORY_ROWS),
    totalProfit: rec.cumx,
  };
}
