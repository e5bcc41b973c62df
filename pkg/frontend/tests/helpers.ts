/** Shared test utilities: fixture loading, raw-literal extraction, fetch mock. */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { FetchLike } from "../src/api.js";

/** Load a fixture captured from the real HTTP server (see scripts/). */
export function fixture(name: string): string {
  // vitest runs rooted at the package directory (next to vitest.config.ts)
  return readFileSync(join(process.cwd(), "tests", "fixtures", name), "utf-8");
}

const NUM = "-?\\d[\\d.eE+\\-]*";

function extract(raw: string, pattern: RegExp): string {
  const found = pattern.exec(raw);
  if (!found || found[1] === undefined) {
    throw new Error(`fixture does not match ${String(pattern)}`);
  }
  return found[1];
}

/**
 * The exact byte sequence the server serialized for one prediction output.
 * Extraction is regex-based on the raw text, deliberately independent of
 * the console's own JSON parser.
 */
export function outputLiteral(raw: string, label: string): string {
  return extract(raw, new RegExp(`"outputs": \\{[^}]*?"${label}": (${NUM})`));
}

/** The exact byte sequences for one gate array ("xattn" or "dense"). */
export function gateLiterals(raw: string, kind: "xattn" | "dense"): string[] {
  const list = extract(raw, new RegExp(`"gates": \\{[^}]*?"${kind}": \\[([^\\]]*)\\]`));
  return list.split(",").map((entry) => entry.trim());
}

export interface RecordedCall {
  url: string;
  init?: RequestInit;
}

export interface Route {
  body: string;
  status?: number;
}

/** Fetch stub that serves fixture bytes and records every call. */
export function mockFetch(routes: { model?: Route; predict?: Route }): {
  fn: FetchLike;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const fn: FetchLike = (url, init) => {
    calls.push({ url, ...(init !== undefined ? { init } : {}) });
    let route: Route | undefined;
    if (url.endsWith("/api/model")) route = routes.model;
    else if (url.endsWith("/api/predict")) route = routes.predict;
    if (!route) {
      return Promise.reject(new Error(`unexpected fetch: ${url}`));
    }
    return Promise.resolve(
      new Response(route.body, {
        status: route.status ?? 200,
        headers: { "Content-Type": "application/json; charset=utf-8" },
      }),
    );
  };
  return { fn, calls };
}

/** Body bytes of the most recent /api/predict call. */
export function lastPredictBody(calls: RecordedCall[]): string {
  const predictCalls = calls.filter((call) => call.url.endsWith("/api/predict"));
  const last = predictCalls[predictCalls.length - 1];
  if (!last || typeof last.init?.body !== "string") {
    throw new Error("no recorded /api/predict body");
  }
  return last.init.body;
}
