import { describe, expect, it } from "vitest";

import { classifyEntry, heatmapHtml, renderFactorHeatmap } from "../src/heatmap";
import type { FactorBlocks } from "../src/types";

describe("factor heatmap", () => {
  it("renders all-zero factors as a uniform neutral grid", () => {
    const factors: FactorBlocks = {
      A: [[0, 0], [0, 0]], B: [[0]], C: [[0]], D: [[0]],
    };
    const blocks = renderFactorHeatmap(factors);
    for (const block of blocks) {
      expect(block.cells.every((c) => c.band === "zero")).toBe(true);
    }
  });

  it("maps exact unit entries onto the unit bands only", () => {
    // a slice of the published exact factor entries: everything is 0 or +-1
    const factors: FactorBlocks = {
      A: [[0, 1, -1], [1, 0, 0], [-1, 1, 0]],
      B: [[1, 0], [0, -1], [1, 1]],
      C: [[0, 0], [1, -1], [0, 1]],
      D: [[-1, 0], [0, 0], [1, -1]],
    };
    const bands = new Set(
      renderFactorHeatmap(factors).flatMap((b) => b.cells.map((c) => c.band)));
    expect([...bands].sort()).toEqual(["neg-unit", "pos-unit", "zero"]);
  });

  it("renders 0.999 in the unit band with a numeric tooltip", () => {
    expect(classifyEntry(0.999)).toBe("pos-unit");
    expect(classifyEntry(-0.999)).toBe("neg-unit");
    const blocks = renderFactorHeatmap({ A: [[0.999]], B: [[0]], C: [[0]], D: [[0]] });
    const cell = blocks[0].cells[0];
    expect(cell.band).toBe("pos-unit");
    expect(cell.tooltip).toContain("0.999");
  });

  it("distinguishes near-zero from zero and from mid-range values", () => {
    expect(classifyEntry(0)).toBe("zero");
    expect(classifyEntry(5e-4)).toBe("near-zero");
    expect(classifyEntry(0.4)).toBe("pos");
    expect(classifyEntry(-0.4)).toBe("neg");
  });

  it("emits one table cell per entry", () => {
    const html = heatmapHtml(renderFactorHeatmap({
      A: [[0.2, -0.3]], B: [[1]], C: [[0]], D: [[-1]],
    }));
    expect(html.match(/<td/g)).toHaveLength(5);
    expect(html).toContain("factor-block");
  });
});
