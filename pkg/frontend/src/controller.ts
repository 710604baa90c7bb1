import { HttpError, type ExperimentApiLike } from "./api.js";
import {
  clampQuantity,
  formatQuantity,
  fromHistory,
  initialState,
  withRecord,
  type UiState,
} from "./state.js";

export interface ControllerOptions {
  /** network-failure retries per submission, same round number each time */
  maxRetries?: number;
  retryDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Headless play session: owns the UiState and talks to the service.
 *
 * The view layer subscribes through onChange and issues setSlider / submit.
 * One request is in flight at a time (the pending flag); duplicate or stale
 * submissions are reconciled from the server's conflict response, so a retry
 * or an impatient double click can never produce a second row.
 */
export class PlayController {
  state: UiState;
  private readonly maxRetries: number;
  private readonly retryDelayMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    private readonly api: ExperimentApiLike,
    sessionId: string,
    private readonly onChange: (state: UiState) => void,
    options: ControllerOptions = {},
  ) {
    this.state = initialState(sessionId);
    this.maxRetries = options.maxRetries ?? 3;
    this.retryDelayMs = options.retryDelayMs ?? 300;
    this.sleep = options.sleep ?? defaultSleep;
  }

  private set(state: UiState): void {
    this.state = state;
    this.onChange(state);
  }

  /** Load the visible state from the server; safe after a page refresh. */
  async refresh(): Promise<void> {
    const h = await this.api.history(this.state.sessionId);
    this.set(fromHistory(this.state, h));
    if (this.state.status !== "active") {
      await this.loadCompletion();
    }
  }

  setSlider(value: number): void {
    this.set({ ...this.state, sliderValue: clampQuantity(value) });
  }

  async submit(): Promise<void> {
    if (this.state.pending || this.state.status !== "active" || this.state.completion) {
      return;
    }
    const round = this.state.nextRound;
    const x = formatQuantity(clampQuantity(this.state.sliderValue));
    this.set({ ...this.state, pending: true, error: null });
    try {
      for (let attempt = 0; ; attempt++) {
        try {
          const rec = await this.api.submitRound(this.state.sessionId, round, x);
          this.set(withRecord({ ...this.state, pending: false }, rec));
          return;
        } catch (err) {
          if (err instanceof HttpError) {
            await this.handleHttpError(err);
            return;
          }
          if (attempt >= this.maxRetries) {
            throw err;
          }
          // lost response or dropped connection: same round number again
          await this.sleep(this.retryDelayMs);
        }
      }
    } catch (err) {
      this.set({
        ...this.state,
        pending: false,
        error: err instanceof Error ? err.message : String(err),
      });
    }
  }

  private async handleHttpError(err: HttpError): Promise<void> {
    if (err.body.code === "conflict") {
      const rec = err.body.detail?.record;
      if (rec) {
        this.set(withRecord({ ...this.state, pending: false }, rec));
      } else {
        // submission was stale or ahead; resynchronize from the server
        this.set({ ...this.state, pending: false });
        await this.refresh();
      }
      return;
    }
    if (err.body.code === "session_closed") {
      this.set({ ...this.state, pending: false });
      await this.loadCompletion();
      return;
    }
    this.set({ ...this.state, pending: false, error: err.body.message });
  }

  private async loadCompletion(): Promise<void> {
    const summary = await this.api.finish(this.state.sessionId);
    this.set({
      ...this.state,
      status: summary.status,
      totalProfit: summary.cum_x,
      completion: summary,
    });
  }
}
