// Signed heatmap of the block factor entries.  Values are only binned
// for display; the numbers shown in tooltips are the service's own.

import type { FactorBlocks } from "./types";

export type HeatCell = {
  row: number;
  col: number;
  value: number;
  band: "zero" | "near-zero" | "pos" | "neg" | "pos-unit" | "neg-unit";
  tooltip: string;
};

export type HeatBlock = {
  name: string;
  rows: number;
  cols: number;
  cells: HeatCell[];
};

export const NEAR_ZERO = 1e-3;
export const UNIT_BAND = 0.05;

export function classifyEntry(value: number): HeatCell["band"] {
  const mag = Math.abs(value);
  if (mag === 0) return "zero";
  if (mag < NEAR_ZERO) return "near-zero";
  if (Math.abs(mag - 1) <= UNIT_BAND) return value > 0 ? "pos-unit" : "neg-unit";
  return value > 0 ? "pos" : "neg";
}

export function renderFactorHeatmap(factors: FactorBlocks): HeatBlock[] {
  return (Object.keys(factors) as (keyof FactorBlocks)[]).map((name) => {
    const grid = factors[name];
    const rows = grid.length;
    const cols = rows ? grid[0].length : 0;
    const cells: HeatCell[] = [];
    for (let r = 0; r < rows; r += 1) {
      for (let c = 0; c < cols; c += 1) {
        const value = grid[r][c];
        cells.push({
          row: r,
          col: c,
          value,
          band: classifyEntry(value),
          tooltip: `${name}[${r},${c}] = ${value}`,
        });
      }
    }
    return { name, rows, cols, cells };
  });
}

export function heatmapHtml(blocks: HeatBlock[]): string {
  return blocks
    .map((block) => {
      const rows: string[] = [];
      for (let r = 0; r < block.rows; r += 1) {
        const cells = block.cells
          .filter((cell) => cell.row === r)
          .map((cell) =>
            `<td class="cell ${cell.band}" title="${cell.tooltip}"></td>`)
          .join("");
        rows.push(`<tr>${cells}</tr>`);
      }
      return `<figure class="factor-block"><figcaption>${block.name}</figcaption>` +
        `<table>${rows.join("")}</table></figure>`;
    })
    .join("");
}
