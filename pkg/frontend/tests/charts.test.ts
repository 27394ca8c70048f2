import { describe, expect, it } from "vitest";

import { chartSvg, renderTrace } from "../src/charts";
import type { Series } from "../src/state";

describe("renderTrace", () => {
  it("renders an empty chart with axes for an empty series", () => {
    const spec = renderTrace({ points: [], gaps: [] });
    expect(spec.empty).toBe(true);
    expect(spec.path).toBe("");
    const svg = chartSvg(spec, "objective");
    expect(svg).toContain("<svg");
    expect(svg).toContain('class="axis"');
    expect(svg).not.toContain('class="trace"');
  });

  it("renders five events as five points in order", () => {
    const series: Series = {
      points: [1, 2, 3, 4, 5].map((i) => ({ iter: i, value: 1 / i })),
      gaps: [],
    };
    const spec = renderTrace(series);
    expect(spec.points).toHaveLength(5);
    const xs = spec.points.map((p) => p.x);
    expect([...xs].sort((a, b) => a - b)).toEqual(xs);
    expect(spec.path.startsWith("M")).toBe(true);
    expect(spec.path.split("L")).toHaveLength(5);
  });

  it("marks reconnect gaps visibly", () => {
    const series: Series = {
      points: [
        { iter: 1, value: 1 }, { iter: 2, value: 0.5 }, { iter: 10, value: 0.1 },
      ],
      gaps: [2],
    };
    const spec = renderTrace(series);
    expect(spec.gapLines).toHaveLength(1);
    const svg = chartSvg(spec, "objective");
    expect(svg).toContain('class="gap"');
  });

  it("uses a log scale when asked", () => {
    const series: Series = {
      points: [
        { iter: 1, value: 1 }, { iter: 2, value: 1e-2 }, { iter: 3, value: 1e-4 },
      ],
      gaps: [],
    };
    const spec = renderTrace(series, { logScale: true });
    const ys = spec.points.map((p) => p.y);
    // log scale makes the equal-ratio drops equally spaced
    expect(ys[1] - ys[0]).toBeCloseTo(ys[2] - ys[1], 6);
    expect(spec.yTicks[0].label).toContain("1e");
  });
});
