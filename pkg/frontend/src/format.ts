/** Display helpers. Numeric display is byte-faithful to the API. */

import { RawNum } from "./jsonRaw.js";

/** The exact bytes the API serialized for this number. */
export function numText(num: RawNum): string {
  return num.raw;
}

/** A 0..1 value as a percent string for meter widths (display aid only). */
export function percent(num: RawNum): string {
  const clamped = Math.max(0, Math.min(1, num.value));
  return `${(clamped * 100).toFixed(1)}%`;
}

/** Leading slice of a sha256 hex digest for compact display. */
export function shortHash(hash: string): string {
  return hash.slice(0, 12);
}

/** Human label for a model variant tag. */
export function variantLabel(variant: string): string {
  switch (variant) {
    case "full":
      return "graph + knowledge fusion";
    case "gin_only":
      return "graph only";
    case "chem_only":
      return "knowledge only";
    default:
      return variant;
  }
}

/** Compact UTC timestamp for the history list. */
export function timestamp(date: Date): string {
  return `${date.toISOString().replace("T", " ").slice(0, 19)} UTC`;
}
