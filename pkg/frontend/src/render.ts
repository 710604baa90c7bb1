import type { Labels } from "./locale.js";
import {
  HISTORY_ROWS,
  QUANTITY_MAX,
  QUANTITY_MIN,
  QUANTITY_STEP,
  formatQuantity,
  type UiState,
} from "./state.js";

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Six columns, newest round first, at most HISTORY_ROWS rows. All cell values
 * are server-formatted strings shown verbatim.
 */
export function renderHistoryTable(state: UiState, labels: Labels): string {
  const header = [
    labels.round,
    labels.yourQuantity,
    labels.machineQuantity,
    labels.yourProfit,
    labels.machineProfit,
    labels.totalProfit,
  ]
    .map((h) => `<th>${escapeHtml(h)}</th>`)
    .join("");
  const rows = state.history
    .slice(0, HISTORY_ROWS)
    .map(
      (r) =>
        `<tr><td>${r.round}</td><td>${escapeHtml(r.x)}</td><td>${escapeHtml(r.y)}</td>` +
        `<td>${escapeHtml(r.sx)}</td><td>${escapeHtml(r.sy)}</td><td>${escapeHtml(r.cumx)}</td></tr>`,
    )
    .join("");
  return (
    `<h2>${escapeHtml(labels.historyHeading)}</h2>` +
    `<table id="history"><thead><tr>${header}</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderDecisionPanel(state: UiState, labels: Labels): string {
  const disabled = state.pending || state.status !== "active" ? " disabled" : "";
  const label = state.pending ? labels.submitting : labels.submit;
  const err = state.error ? `<p class="error">${escapeHtml(state.error)}</p>` : "";
  return (
    `<h2>${escapeHtml(labels.decisionHeading)}</h2>` +
    `<label for="quantity">${escapeHtml(labels.quantityPrompt)}: ` +
    `<output id="quantity-value">${formatQuantity(state.sliderValue)}</output></label>` +
    `<input type="range" id="quantity" min="${QUANTITY_MIN}" max="${QUANTITY_MAX}" ` +
    `step="${QUANTITY_STEP}" value="${formatQuantity(state.sliderValue)}"${disabled}>` +
    `<button id="submit" type="button"${disabled}>${escapeHtml(label)}</button>` +
    err
  );
}

export function renderCompletion(state: UiState, labels: Labels): string {
  const c = state.completion;
  if (!c) {
    return "";
  }
  return (
    `<h2>${escapeHtml(labels.completionHeading)}</h2>` +
    `<p>${escapeHtml(labels.completionTotal)}: <strong>${escapeHtml(c.cum_x)}</strong></p>` +
    `<p>${escapeHtml(labels.completionPayout)}: <strong>${escapeHtml(c.payout_yuan)}</strong></p>`
  );
}

export function renderApp(state: UiState, labels: Labels): string {
  if (state.completion) {
    return `<div class="panel">${renderCompletion(state, labels)}</div>`;
  }
  return (
    `<div class="panel">${renderHistoryTable(state, labels)}</div>` +
    `<div class="panel">${renderDecisionPanel(state, labels)}</div>`
  );
}

export function renderEntry(labels: Labels): string {
  return (
    `<div class="panel"><h2>${escapeHtml(labels.entryHeading)}</h2>` +
    `<form id="entry">` +
    `<label>${escapeHtml(labels.baseUrl)} <input id="base-url" value="http://127.0.0.1:8000"></label>` +
    `<label>${escapeHtml(labels.sessionId)} <input id="session-id" required></label>` +
    `<button type="submit">${escapeHtml(labels.join)}</button>` +
    `</form></div>`
  );
}
