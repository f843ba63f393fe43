/** Pure heat-map model for decoder attention matrices.
 *
 * Sparsemax rows contain exact zeros that mean "this source word played
 * no part"; those cells get their own color instead of the bottom of the
 * sequential ramp, so sparsity stays visible.
 */

export const ZERO_COLOR = "#eef1f4";

export interface HeatCell {
  row: number;
  col: number;
  value: number;
  color: string;
  /** Monotone in value; 0 for exact zeros, 1 for a full-probability cell. */
  saturation: number;
}

export interface HeatmapModel {
  cells: HeatCell[];
  rowLabels: string[];
  colLabels: string[];
  nRows: number;
  nCols: number;
}

// sequential ramp from a pale to a saturated blue
const LOW = { r: 0xdb, g: 0xea, b: 0xfe };
const HIGH = { r: 0x1e, g: 0x3a, b: 0x8a };

function channel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

export function heatColor(value: number): { color: string; saturation: number } {
  if (value < 0 || value > 1 || Number.isNaN(value)) {
    throw new RangeError(`attention weight ${value} outside [0, 1]`);
  }
  if (value === 0) {
    return { color: ZERO_COLOR, saturation: 0 };
  }
  const r = channel(LOW.r, HIGH.r, value);
  const g = channel(LOW.g, HIGH.g, value);
  const b = channel(LOW.b, HIGH.b, value);
  const hex = (n: number) => n.toString(16).padStart(2, "0");
  return { color: `#${hex(r)}${hex(g)}${hex(b)}`, saturation: value };
}

export function buildHeatmap(
  matrix: number[][],
  rowLabels: string[],
  colLabels: string[],
): HeatmapModel {
  if (matrix.length !== rowLabels.length) {
    throw new Error(
      `matrix has ${matrix.length} rows but ${rowLabels.length} row labels`,
    );
  }
  const cells: HeatCell[] = [];
  matrix.forEach((row, i) => {
    if (row.length !== colLabels.length) {
      throw new Error(
        `row ${i} has ${row.length} cells but ${colLabels.length} col labels`,
      );
    }
    row.forEach((value, j) => {
      const { color, saturation } = heatColor(value);
      cells.push({ row: i, col: j, value, color, saturation });
    });
  });
  return {
    cells,
    rowLabels: [...rowLabels],
    colLabels: [...colLabels],
    nRows: rowLabels.length,
    nCols: colLabels.length,
  };
}

/** Column index of the most saturated cell in a row. */
export function rowArgmax(model: HeatmapModel, row: number): number {
  const cells = model.cells.filter((c) => c.row === row);
  let best = cells[0];
  for (const cell of cells) {
    if (cell.saturation > best.saturation) best = cell;
  }
  return best.col;
}
