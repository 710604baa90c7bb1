// Wire formats of the experiment service. Quantities arrive as decimal
// strings with exactly two fractional digits; profits additionally carry a
// full-precision float. The client displays these strings verbatim and never
// computes market values itself.

export interface RoundView {
  round: number;
  x: string;
  y: string;
  sx: string;
  sy: string;
  cumx: string;
  sx_full: number;
  sy_full: number;
  cumx_full: number;
}

export type SessionStatus = "active" | "finished" | "abandoned";

export interface HistoryResponse {
  session_id: string;
  status: SessionStatus;
  rounds_played: number;
  next_round: number;
  cum_x: string;
  cum_x_full: number;
  records: RoundView[];
}

export interface FinishResponse {
  session_id: string;
  status: SessionStatus;
  rounds_played: number;
  cum_x: string;
  cum_x_full: number;
  payout_yuan: string;
  payout_yuan_full: number;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: {
    expected_round?: number;
    record?: RoundView;
    [key: string]: unknown;
  } | null;
}
