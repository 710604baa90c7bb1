import { ExperimentApi } from "./api.js";
import { PlayController } from "./controller.js";
import { en } from "./locale.js";
import { renderApp, renderEntry } from "./render.js";

const labels = en;

function mount(): HTMLElement {
  const el = document.getElementById("app");
  if (!el) {
    throw new Error("missing #app mount point");
  }
  return el;
}

function startSession(baseUrl: string, sessionId: string): void {
  const root = mount();
  const api = new ExperimentApi(baseUrl);
  const controller = new PlayController(api, sessionId, (state) => {
    root.innerHTML = renderApp(state, labels);
    const slider = document.getElementById("quantity") as HTMLInputElement | null;
    const submit = document.getElementById("submit");
    const valueOut = document.getElementById("quantity-value");
    if (slider) {
      slider.addEventListener("input", () => {
        // track without a full re-render so the drag stays smooth
        const v = Number(slider.value);
        controller.state.sliderValue = v;
        if (valueOut) {
          valueOut.textContent = v.toFixed(2);
        }
      });
      slider.addEventListener("change", () => controller.setSlider(Number(slider.value)));
    }
    if (submit) {
      submit.addEventListener("click", () => void controller.submit());
    }
  });
  void controller.refresh().catch((err) => {
    root.innerHTML = `<div class="panel"><p class="error">${String(err)}</p></div>`;
  });
}

function showEntry(): void {
  const root = mount();
  root.innerHTML = renderEntry(labels);
  const form = document.getElementById("entry") as HTMLFormElement;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const baseUrl = (document.getElementById("base-url") as HTMLInputElement).value.trim();
    const sessionId = (document.getElementById("session-id") as HTMLInputElement).value.trim();
    if (!sessionId) {
      return;
    }
    // keep the join parameters in the hash so a refresh lands back in-session
    window.location.hash = `#${encodeURIComponent(baseUrl)}|${encodeURIComponent(sessionId)}`;
    startSession(baseUrl, sessionId);
  });
}

function boot(): void {
  const hash = window.location.hash.slice(1);
  if (hash.includes("|")) {
    const [baseUrl, sessionId] = hash.split("|").map(decodeURIComponent);
    startSession(baseUrl, sessionId);
    return;
  }
  showEntry();
}

document.title = labels.title;
boot();
