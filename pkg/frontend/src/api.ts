import type { ErrorBody, FinishResponse, HistoryResponse, RoundView } from "./types.js";

export class HttpError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorBody,
  ) {
    super(body.message);
  }
}

export interface ExperimentApiLike {
  history(sessionId: string, n?: number): Promise<HistoryResponse>;
  submitRound(sessionId: string, round: number, x: string): Promise<RoundView>;
  finish(sessionId: string): Promise<FinishResponse>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ExperimentApi implements ExperimentApiLike {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // bind so a bare window.fetch keeps its receiver
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  history(sessionId: string, n = 10): Promise<HistoryResponse> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/history?n=${n}`, {
      method: "GET",
    });
  }

  submitRound(sessionId: string, round: number, x: string): Promise<RoundView> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/rounds`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ round, x }),
    });
  }

  finish(sessionId: string): Promise<FinishResponse> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/finish`, {
      method: "POST",
    });
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (response.ok) {
      return (await response.json()) as T;
    }
    let body: ErrorBody;
    try {
      body = (await response.json()) as ErrorBody;
    } catch {
      body = { code: "http_error", message: `HTTP ${response.status}`, detail: null };
    }
    throw new HttpError(response.status, body);
  }
}
