// Pure view-state: everything the dashboard renders is a fold of server
// events, snapshots, and form inputs over these functions.  No numerics
// happen here beyond display rounding; the service is the source of truth.

import type { SessionCommand, SessionSnapshot, StreamEvent } from "./types";

export type TracePoint = { iter: number; value: number };

export type Series = {
  points: TracePoint[];
  // iterations after which the connection saw a dropped-events marker
  gaps: number[];
};

export type FormState = {
  iterations: number;
  lambdaSlider: number; // 0..1, log-mapped onto [1e-3, 1]
  zeros: number;
  valueSet: string[];
  tol: number;
  file: string;
  seed: number;
};

export type ViewState = {
  snapshot: SessionSnapshot | null;
  objectiveSeries: Series;
  sparsitySeries: Series;
  commandInFlight: boolean;
  toast: string | null;
  form: FormState;
  streamClosed: boolean;
};

export const LAMBDA_MIN = 1e-3;
export const LAMBDA_MAX = 1.0;

export function sliderToLambda(position: number): number {
  const clamped = Math.min(1, Math.max(0, position));
  const logMin = Math.log10(LAMBDA_MIN);
  const logMax = Math.log10(LAMBDA_MAX);
  return Math.pow(10, logMin + clamped * (logMax - logMin));
}

export function lambdaToSlider(lambda: number): number {
  const logMin = Math.log10(LAMBDA_MIN);
  const logMax = Math.log10(LAMBDA_MAX);
  const clamped = Math.min(LAMBDA_MAX, Math.max(LAMBDA_MIN, lambda));
  return (Math.log10(clamped) - logMin) / (logMax - logMin);
}

export function initialState(): ViewState {
  return {
    snapshot: null,
    objectiveSeries: { points: [], gaps: [] },
    sparsitySeries: { points: [], gaps: [] },
    commandInFlight: false,
    toast: null,
    form: {
      iterations: 100,
      lambdaSlider: lambdaToSlider(0.01),
      zeros: 0,
      valueSet: ["0", "1", "-1"],
      tol: 0.01,
      file: "session.json",
      seed: 0,
    },
    streamClosed: false,
  };
}

function lastIter(series: Series): number {
  const pts = series.points;
  return pts.length ? pts[pts.length - 1].iter : -Infinity;
}

function appendPoint(series: Series, iter: number, value: number): Series {
  // strictly append-only within a connection: stale or duplicate
  // iterations are dropped rather than rewriting history
  if (iter <= lastIter(series)) return series;
  return { points: [...series.points, { iter, value }], gaps: series.gaps };
}

function markGap(series: Series): Series {
  const at = lastIter(series);
  if (!isFinite(at) || series.gaps.includes(at)) return series;
  return { points: series.points, gaps: [...series.gaps, at] };
}

export function applyEvent(state: ViewState, event: StreamEvent): ViewState {
  if ("closed" in event && event.closed) {
    return { ...state, streamClosed: true };
  }
  if ("gap" in event && event.gap) {
    return {
      ...state,
      objectiveSeries: markGap(state.objectiveSeries),
      sparsitySeries: markGap(state.sparsitySeries),
    };
  }
  if (!("iter" in event)) return state;
  return {
    ...state,
    objectiveSeries: appendPoint(state.objectiveSeries, event.iter, event.objective),
    sparsitySeries: appendPoint(state.sparsitySeries, event.iter, event.sparsity),
  };
}

export function replayEvents(state: ViewState, events: StreamEvent[]): ViewState {
  return events.reduce(applyEvent, state);
}

export function applySnapshot(state: ViewState, snapshot: SessionSnapshot): ViewState {
  return { ...state, snapshot };
}

export function resetSeries(state: ViewState): ViewState {
  // a new connection (or session reset) starts fresh traces
  return {
    ...state,
    objectiveSeries: { points: [], gaps: [] },
    sparsitySeries: { points: [], gaps: [] },
    streamClosed: false,
  };
}

export function commandSent(state: ViewState): ViewState {
  return { ...state, commandInFlight: true, toast: null };
}

export function commandAccepted(state: ViewState): ViewState {
  return { ...state, commandInFlight: false };
}

export function commandRejected(state: ViewState, reason: string, busy: boolean): ViewState {
  return {
    ...state,
    commandInFlight: false,
    toast: busy ? `busy: ${reason}` : `rejected: ${reason}`,
  };
}

export function updateForm(state: ViewState, patch: Partial<FormState>): ViewState {
  return { ...state, form: { ...state.form, ...patch } };
}

export function controlsDisabled(state: ViewState): boolean {
  return state.commandInFlight || (state.snapshot?.busy ?? false);
}

export function stepCommand(form: FormState): SessionCommand {
  return {
    type: "step",
    iterations: form.iterations,
    lambda: sliderToLambda(form.lambdaSlider),
    zeros: form.zeros,
  };
}

export function roundCommand(form: FormState): SessionCommand {
  return { type: "round", value_set: form.valueSet, tol: form.tol };
}

export type Badge = { ok: boolean; label: string; link: string | null };

export function verificationBadge(state: ViewState): Badge | null {
  const attempt = state.snapshot?.last_round_attempt;
  if (!attempt) return null;
  if (attempt.ok) {
    return {
      ok: true,
      label: `exact decomposition verified at iteration ${attempt.iteration}`,
      link: attempt.path ?? null,
    };
  }
  return { ok: false, label: attempt.message, link: null };
}
