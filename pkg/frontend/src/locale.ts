// UI labels. Swap the exported object to localize.

export interface Labels {
  title: string;
  historyHeading: string;
  decisionHeading: string;
  round: string;
  yourQuantity: string;
  machineQuantity: string;
  yourProfit: string;
  machineProfit: string;
  totalProfit: string;
  quantityPrompt: string;
  submit: string;
  submitting: string;
  completionHeading: string;
  completionTotal: string;
  completionPayout: string;
  entryHeading: string;
  baseUrl: string;
  sessionId: string;
  join: string;
  networkRetry: string;
}

export const en: Labels = {
  title: "Production Game",
  historyHeading: "Last 10 rounds",
  decisionHeading: "Your decision",
  round: "Round",
  yourQuantity: "Your quantity",
  machineQuantity: "Computer quantity",
  yourProfit: "Your profit",
  machineProfit: "Computer profit",
  totalProfit: "Your total profit",
  quantityPrompt: "Quantity to produce",
  submit: "Submit",
  submitting: "Submitting...",
  completionHeading: "Session complete",
  completionTotal: "Total profit",
  completionPayout: "Payout (yuan)",
  entryHeading: "Join a session",
  baseUrl: "Server address",
  sessionId: "Session id",
  join: "Join",
  networkRetry: "Connection problem, retrying...",
};
