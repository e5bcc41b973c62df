/**
 * Cross-attention heatmap: one row per molecule atom, one column per
 * knowledge-text token, cell shade proportional to attention weight.
 */

import { RawNum } from "./jsonRaw.js";

export interface HeatmapOptions {
  matrix: RawNum[][];
  rowLabels: string[];
  colLabels: string[];
  /** Set when the server clipped the matrix; shown as a caption note. */
  truncatedFrom?: { rows: number; cols: number } | null;
  doc?: Document;
}

/** Dark-blue → amber ramp over t in [0, 1]. */
export function heatColor(t: number): string {
  const x = Math.max(0, Math.min(1, t));
  const r = Math.round(24 + x * (249 - 24));
  const g = Math.round(39 + x * (168 - 39));
  const b = Math.round(84 + x * (38 - 84));
  return `rgb(${r}, ${g}, ${b})`;
}

/**
 * Build the heatmap element.  `dataset.rows`/`dataset.cols` carry the
 * rendered matrix dimensions (atoms × tokens); each weight cell is a
 * `.hm-cell` with the raw weight bytes in its tooltip.
 */
export function renderHeatmap(options: HeatmapOptions): HTMLElement {
  const doc = options.doc ?? document;
  const { matrix, rowLabels, colLabels } = options;
  const rows = matrix.length;
  const cols = matrix[0]?.length ?? 0;

  const container = doc.createElement("div");
  container.className = "heatmap";
  container.dataset["rows"] = String(rows);
  container.dataset["cols"] = String(cols);

  const grid = doc.createElement("div");
  grid.className = "hm-grid";
  grid.style.gridTemplateColumns = `auto repeat(${cols}, minmax(1.4rem, 2.4rem))`;

  const corner = doc.createElement("div");
  corner.className = "hm-corner";
  corner.textContent = "atom \\ token";
  grid.appendChild(corner);

  for (const label of colLabels.slice(0, cols)) {
    const head = doc.createElement("div");
    head.className = "hm-col-label";
    head.textContent = label;
    head.title = label;
    grid.appendChild(head);
  }

  let max = 0;
  for (const row of matrix) {
    for (const cell of row) {
      if (cell.value > max) max = cell.value;
    }
  }
  const scale = max > 0 ? max : 1;

  matrix.forEach((row, r) => {
    const rowLabel = rowLabels[r] ?? String(r + 1);
    const label = doc.createElement("div");
    label.className = "hm-row-label";
    label.textContent = rowLabel;
    grid.appendChild(label);
    row.forEach((cell, c) => {
      const node = doc.createElement("div");
      node.className = "hm-cell";
      node.dataset["row"] = String(r);
      node.dataset["col"] = String(c);
      node.style.backgroundColor = heatColor(cell.value / scale);
      node.title = `atom ${rowLabel} × ${colLabels[c] ?? `token ${c + 1}`}: ${cell.raw}`;
      grid.appendChild(node);
    });
  });

  container.appendChild(grid);

  const caption = doc.createElement("p");
  caption.className = "hm-caption";
  let text = `${rows} atom${rows === 1 ? "" : "s"} × ${cols} token${cols === 1 ? "" : "s"}`;
  if (options.truncatedFrom) {
    text += ` (truncated from ${options.truncatedFrom.rows} × ${options.truncatedFrom.cols})`;
  }
  caption.textContent = text;
  container.appendChild(caption);

  return container;
}
