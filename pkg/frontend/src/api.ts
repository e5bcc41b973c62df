/**
 * Thin fetch wrapper around the two prediction endpoints.
 *
 * Both calls hand back the raw response text alongside the decoded view:
 * the UI renders numbers from the raw bytes, and tests can assert the
 * round-trip is byte-exact.
 */

import {
  decodeModelInfo,
  decodePredictResponse,
  ModelInfo,
  PredictRequest,
  PredictResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    /** Byte offset accompanying parse/validation errors, when the server sent one. */
    readonly offset: number | null = null,
    readonly body: string = "",
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function errorFromBody(status: number, body: string): ApiError {
  try {
    const payload = JSON.parse(body) as { error?: unknown; offset?: unknown };
    if (payload !== null && typeof payload === "object" && typeof payload.error === "string") {
      const offset = typeof payload.offset === "number" ? payload.offset : null;
      return new ApiError(status, payload.error, offset, body);
    }
  } catch {
    // not a JSON error payload; fall through to the generic message
  }
  return new ApiError(status, `request failed with status ${status}`, null, body);
}

/** Serialize a prediction request; key order matches what the tests capture. */
export function requestBody(request: PredictRequest): string {
  const payload: Record<string, string> = { smiles: request.smiles };
  if (request.knowledgeText !== undefined) {
    payload["knowledge_text"] = request.knowledgeText;
  }
  return JSON.stringify(payload);
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly base: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  async model(): Promise<{ raw: string; info: ModelInfo }> {
    const response = await this.fetchFn(`${this.base}/api/model`);
    const raw = await response.text();
    if (!response.ok) throw errorFromBody(response.status, raw);
    return { raw, info: decodeModelInfo(raw) };
  }

  async predict(request: PredictRequest): Promise<{ raw: string; result: PredictResponse }> {
    const response = await this.fetchFn(`${this.base}/api/predict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: requestBody(request),
    });
    const raw = await response.text();
    if (!response.ok) throw errorFromBody(response.status, raw);
    return { raw, result: decodePredictResponse(raw) };
  }
}
