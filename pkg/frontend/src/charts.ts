// Trace rendering as pure SVG geometry: an objective chart on a log
// scale and a sparsity chart on a linear scale, each with tick labels
// and visible markers at connection gaps.

import type { Series } from "./state";

export type ChartSpec = {
  width: number;
  height: number;
  path: string;            // SVG path through the points, in order
  points: { x: number; y: number; iter: number; value: number }[];
  gapLines: number[];      // x positions of gap markers
  yTicks: { y: number; label: string }[];
  xTicks: { x: number; label: string }[];
  empty: boolean;
};

const MARGIN = 8;

function scale(value: number, lo: number, hi: number, size: number): number {
  if (hi <= lo) return size / 2;
  return MARGIN + ((value - lo) / (hi - lo)) * (size - 2 * MARGIN);
}

export function renderTrace(
  series: Series,
  options: { width?: number; height?: number; logScale?: boolean } = {},
): ChartSpec {
  const width = options.width ?? 480;
  const height = options.height ?? 160;
  const log = options.logScale ?? false;
  const pts = series.points;
  if (pts.length === 0) {
    return {
      width, height, path: "", points: [], gapLines: [],
      yTicks: [{ y: height / 2, label: "" }],
      xTicks: [{ x: MARGIN, label: "0" }],
      empty: true,
    };
  }
  const value = (v: number) => (log ? Math.log10(Math.max(v, 1e-300)) : v);
  const xs = pts.map((p) => p.iter);
  const ys = pts.map((p) => value(p.value));
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);
  const mapped = pts.map((p) => ({
    x: scale(p.iter, xLo, xHi, width),
    y: height - scale(value(p.value), yLo, yHi, height),
    iter: p.iter,
    value: p.value,
  }));
  const path = mapped
    .map((p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(2)},${p.y.toFixed(2)}`)
    .join(" ");
  const gapLines = series.gaps
    .filter((iter) => iter >= xLo && iter <= xHi)
    .map((iter) => scale(iter, xLo, xHi, width));
  const yTicks = [yLo, (yLo + yHi) / 2, yHi].map((v) => ({
    y: height - scale(v, yLo, yHi, height),
    label: log ? `1e${v.toFixed(1)}` : v.toFixed(0),
  }));
  const xTicks = [xLo, xHi].map((v) => ({
    x: scale(v, xLo, xHi, width),
    label: String(v),
  }));
  return { width, height, path, points: mapped, gapLines, yTicks, xTicks, empty: false };
}

export function chartSvg(spec: ChartSpec, cssClass: string): string {
  const gapMarks = spec.gapLines
    .map((x) => `<line class="gap" x1="${x.toFixed(2)}" y1="0" x2="${x.toFixed(2)}" y2="${spec.height}" />`)
    .join("");
  const axis = `<line class="axis" x1="${MARGIN}" y1="${spec.height - MARGIN}" x2="${spec.width - MARGIN}" y2="${spec.height - MARGIN}" />`
    + `<line class="axis" x1="${MARGIN}" y1="${MARGIN}" x2="${MARGIN}" y2="${spec.height - MARGIN}" />`;
  const trace = spec.empty ? "" : `<path class="trace" d="${spec.path}" fill="none" />`;
  const ticks = spec.yTicks
    .map((t) => `<text class="tick" x="${MARGIN + 2}" y="${t.y.toFixed(2)}">${t.label}</text>`)
    .join("");
  return `<svg class="${cssClass}" viewBox="0 0 ${spec.width} ${spec.height}">${axis}${gapMarks}${trace}${ticks}</svg>`;
}
