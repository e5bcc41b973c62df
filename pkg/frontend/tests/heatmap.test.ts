import { describe, expect, it } from "vitest";

import { heatColor, renderHeatmap } from "../src/heatmap.js";
import { RawNum } from "../src/jsonRaw.js";

function matrixOf(values: number[][]): RawNum[][] {
  return values.map((row) => row.map((v) => new RawNum(v, String(v))));
}

describe("renderHeatmap", () => {
  it("renders one cell per matrix entry with matching dimensions", () => {
    const element = renderHeatmap({
      matrix: matrixOf([
        [0.1, 0.5, 0.4],
        [0.7, 0.2, 0.1],
      ]),
      rowLabels: ["1", "2"],
      colLabels: ["strong", "potent", "binder"],
    });
    expect(element.dataset["rows"]).toBe("2");
    expect(element.dataset["cols"]).toBe("3");
    const cells = element.querySelectorAll(".hm-cell");
    expect(cells.length).toBe(6);
    expect(element.querySelectorAll(".hm-col-label").length).toBe(3);
    expect(element.querySelectorAll(".hm-row-label").length).toBe(2);
  });

  it("puts the raw weight bytes and labels in each cell tooltip", () => {
    const matrix = [[new RawNum(0.20374174471744028, "0.20374174471744028")]];
    const element = renderHeatmap({ matrix, rowLabels: ["1"], colLabels: ["strong"] });
    const cell = element.querySelector(".hm-cell") as HTMLElement;
    expect(cell.title).toBe("atom 1 × strong: 0.20374174471744028");
  });

  it("notes truncation in the caption", () => {
    const element = renderHeatmap({
      matrix: matrixOf([[1]]),
      rowLabels: ["1"],
      colLabels: ["t"],
      truncatedFrom: { rows: 70, cols: 6 },
    });
    const caption = element.querySelector(".hm-caption") as HTMLElement;
    expect(caption.textContent).toBe("1 atom × 1 token (truncated from 70 × 6)");
  });

  it("survives an all-zero matrix without NaN colors", () => {
    const element = renderHeatmap({
      matrix: matrixOf([[0, 0]]),
      rowLabels: ["1"],
      colLabels: ["a", "b"],
    });
    const cell = element.querySelector(".hm-cell") as HTMLElement;
    expect(cell.style.backgroundColor).toBe(heatColor(0));
  });

  it("heatColor spans the ramp and clamps", () => {
    expect(heatColor(0)).toBe("rgb(24, 39, 84)");
    expect(heatColor(1)).toBe("rgb(249, 168, 38)");
    expect(heatColor(-5)).toBe(heatColor(0));
    expect(heatColor(5)).toBe(heatColor(1));
  });
});
