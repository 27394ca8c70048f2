// DOM wiring: fold server data and form inputs into the pure view state
// and repaint.  Command submissions are serialized client-side by the
// in-flight flag, mirroring the service's single-flight slot.

import { fetchSnapshot, openEventStream, submitCommand } from "./api";
import { chartSvg, renderTrace } from "./charts";
import { heatmapHtml, renderFactorHeatmap } from "./heatmap";
import {
  applyEvent,
  applySnapshot,
  commandAccepted,
  commandRejected,
  commandSent,
  controlsDisabled,
  initialState,
  resetSeries,
  roundCommand,
  sliderToLambda,
  stepCommand,
  updateForm,
  verificationBadge,
  ViewState,
} from "./state";
import type { SessionCommand } from "./types";

let state: ViewState = initialState();
let closeStream: (() => void) | null = null;

// API origin: same origin by default, overridable as index.html?api=http://host:port
function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ? param.replace(/\/$/, "") : "";
}

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function setState(next: ViewState): void {
  state = next;
  render();
}

function render(): void {
  const snap = state.snapshot;
  $("status").textContent = snap
    ? `iteration ${snap.iteration} | objective ${snap.objective} | ` +
      `sparsity ${snap.sparsity} | R=${snap.rank} (P=${snap.p}, Q=${snap.q})` +
      (snap.busy ? " | running..." : "")
    : "no session";
  $("objective-chart").innerHTML = chartSvg(
    renderTrace(state.objectiveSeries, { logScale: true }), "objective");
  $("sparsity-chart").innerHTML = chartSvg(
    renderTrace(state.sparsitySeries, {}), "sparsity");
  $("heatmap").innerHTML = snap ? heatmapHtml(renderFactorHeatmap(snap.factors)) : "";
  const lambda = sliderToLambda(state.form.lambdaSlider);
  $("lambda-value").textContent = lambda.toExponential(2);
  const toast = $("toast");
  toast.textContent = state.toast ?? "";
  toast.className = state.toast ? "toast visible" : "toast";
  const badge = verificationBadge(state);
  const badgeEl = $("badge");
  if (badge && badge.ok) {
    badgeEl.className = "badge ok";
    badgeEl.innerHTML = badge.link
      ? `&#10003; ${badge.label} &mdash; <a href="${badge.link}">decomposition file</a>`
      : `&#10003; ${badge.label}`;
  } else if (badge) {
    badgeEl.className = "badge fail";
    badgeEl.textContent = `round attempt failed: ${badge.label}`;
  } else {
    badgeEl.className = "badge";
    badgeEl.textContent = "";
  }
  const disabled = controlsDisabled(state);
  document.querySelectorAll("button, input, select").forEach((el) => {
    (el as HTMLButtonElement).disabled = disabled;
  });
}

async function refreshSnapshot(): Promise<void> {
  const snap = await fetchSnapshot(apiBase());
  if (snap) setState(applySnapshot(state, snap));
}

async function send(command: SessionCommand): Promise<void> {
  if (controlsDisabled(state)) return;
  setState(commandSent(state));
  const result = await submitCommand(command, apiBase());
  if (result.kind === "accepted") {
    setState(commandAccepted(state));
  } else {
    setState(commandRejected(state, result.reason, result.kind === "busy"));
  }
  await refreshSnapshot();
}

function connectStream(): void {
  if (closeStream) closeStream();
  setState(resetSeries(state));
  closeStream = openEventStream((event) => {
    setState(applyEvent(state, event));
    if ("closed" in event && event.closed) {
      connectStream();
    }
  }, apiBase());
}

function readForm(): void {
  const iterations = Number((document.getElementById("iterations") as HTMLInputElement).value);
  const slider = Number((document.getElementById("lambda") as HTMLInputElement).value);
  const zeros = Number((document.getElementById("zeros") as HTMLInputElement).value);
  const tol = Number((document.getElementById("tol") as HTMLInputElement).value);
  const valueSet = (document.getElementById("value-set") as HTMLSelectElement).value.split(",");
  const file = (document.getElementById("file") as HTMLInputElement).value;
  const seed = Number((document.getElementById("seed") as HTMLInputElement).value);
  setState(updateForm(state, {
    iterations, lambdaSlider: slider, zeros, tol, valueSet, file, seed,
  }));
}

export function boot(): void {
  ["iterations", "lambda", "zeros", "tol", "value-set", "file", "seed"].forEach((id) => {
    $(id).addEventListener("input", readForm);
  });
  $("btn-step").addEventListener("click", () => void send(stepCommand(state.form)));
  $("btn-project").addEventListener("click", () => void send({ type: "project" }));
  $("btn-round").addEventListener("click", () => void send(roundCommand(state.form)));
  $("btn-reset").addEventListener("click", () =>
    void send({ type: "reset", seed: state.form.seed }));
  $("btn-save").addEventListener("click", () =>
    void send({ type: "save", file: state.form.file }));
  $("btn-load").addEventListener("click", () =>
    void send({ type: "load", file: state.form.file }));
  connectStream();
  void refreshSnapshot();
  window.setInterval(() => void refreshSnapshot(), 1000);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
