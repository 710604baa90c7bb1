import { describe, expect, it } from "vitest";

import { en } from "../src/locale.js";
import { renderApp, renderDecisionPanel, renderHistoryTable } from "../src/render.js";
import { initialState, withRecord, type UiState } from "../src/state.js";
import type { RoundView } from "../src/types.js";

function rec(round: number): RoundView {
  return {
    round,
    x: "0.10",
    y: "0.11",
    sx: "66.14",
    sy: "71.76",
    cumx: (66.14 * round).toFixed(2),
    sx_full: 66.142857,
    sy_full: 71.757142,
    cumx_full: 66.142857 * round,
  };
}

function stateWithRounds(n: number): UiState {
  let s = initialState("s");
  for (let r = 1; r <= n; r++) {
    s = withRecord(s, rec(r));
  }
  return s;
}

const count = (html: string, needle: string) => html.split(needle).length - 1;

describe("renderHistoryTable", () => {
  it("renders the six columns in order", () => {
    const html = renderHistoryTable(stateWithRounds(2), en);
    const headers = [...html.matchAll(/<th>([^<]*)<\/th>/g)].map((m) => m[1]);
    expect(headers).toEqual([
      en.round,
      en.yourQuantity,
      en.machineQuantity,
      en.yourProfit,
      en.machineProfit,
      en.totalProfit,
    ]);
  });

  it("shows headers with an empty body before the first round", () => {
    const html = renderHistoryTable(stateWithRounds(0), en);
    expect(count(html, "<th>")).toBe(6);
    expect(html).toContain("<tbody></tbody>");
  });

  it("never renders more than ten rows, newest first", () => {
    const html = renderHistoryTable(stateWithRounds(12), en);
    expect(count(html, "<tr>")).toBe(11); // header row + 10 data rows
    const firstRow = html.slice(html.indexOf("<tbody>"));
    expect(firstRow.indexOf("<td>12</td>")).toBeGreaterThan(-1);
    expect(firstRow).not.toContain("<td>2</td>");
  });

  it("displays two-decimal server strings verbatim", () => {
    const html = renderHistoryTable(stateWithRounds(1), en);
    for (const cell of ["0.10", "0.11", "66.14", "71.76"]) {
      expect(html).toContain(`<td>${cell}</td>`);
    }
  });
});

describe("renderDecisionPanel", () => {
  it("constrains the slider to the rival interval at 0.01 steps", () => {
    const html = renderDecisionPanel(initialState("s"), en);
    expect(html).toContain('min="0.1"');
    expect(html).toContain('max="6"');
    expect(html).toContain('step="0.01"');
  });

  it("disables submission while a request is pending", () => {
    const s = { ...initialState("s"), pending: true };
    const html = renderDecisionPanel(s, en);
    expect(html).toContain("disabled");
    expect(html).toContain(en.submitting);
  });

  it("disables submission once the session is closed", () => {
    const s = { ...initialState("s"), status: "finished" as const };
    expect(renderDecisionPanel(s, en)).toContain("disabled");
  });
});

describe("renderApp", () => {
  it("switches to the completion screen when the summary arrives", () => {
    const s: UiState = {
      ...stateWithRounds(3),
      status: "finished",
      completion: {
        session_id: "s",
        status: "finished",
        rounds_played: 3,
        cum_x: "198.43",
        cum_x_full: 198.43,
        payout_yuan: "5.00",
        payout_yuan_full: 5,
      },
    };
    const html = renderApp(s, en);
    expect(html).toContain(en.completionHeading);
    expect(html).toContain("198.43");
    expect(html).toContain("5.00");
    expect(html).not.toContain("<table");
  });
});
