import { describe, expect, it } from "vitest";

import { numText, percent, shortHash, timestamp, variantLabel } from "../src/format.js";
import { RawNum } from "../src/jsonRaw.js";

describe("format", () => {
  it("numText passes the raw bytes through untouched", () => {
    expect(numText(new RawNum(0.4290586090505813, "0.4290586090505813"))).toBe(
      "0.4290586090505813",
    );
    expect(numText(new RawNum(1e-7, "1e-07"))).toBe("1e-07");
  });

  it("percent clamps to [0, 100] and keeps one decimal", () => {
    expect(percent(new RawNum(0.4290586090505813, "x"))).toBe("42.9%");
    expect(percent(new RawNum(1.7, "x"))).toBe("100.0%");
    expect(percent(new RawNum(-0.2, "x"))).toBe("0.0%");
  });

  it("shortHash keeps the leading 12 hex chars", () => {
    expect(shortHash("f9d5efaa4192e5aaba9c838af57968d1")).toBe("f9d5efaa4192");
  });

  it("variantLabel names the variants and passes unknowns through", () => {
    expect(variantLabel("full")).toBe("graph + knowledge fusion");
    expect(variantLabel("gin_only")).toBe("graph only");
    expect(variantLabel("chem_only")).toBe("knowledge only");
    expect(variantLabel("other")).toBe("other");
  });

  it("timestamp renders compact UTC", () => {
    expect(timestamp(new Date("2024-05-04T03:02:01.500Z"))).toBe("2024-05-04 03:02:01 UTC");
  });
});
