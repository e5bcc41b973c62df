/**
 * Typed views over the prediction API's JSON payloads.
 *
 * Decoders validate the wire shape at runtime and keep every displayed
 * quantity (prediction outputs, gate values, attention weights) as a
 * {@link RawNum} so the UI can render the exact bytes the server sent.
 * Structural integers (layer counts, matrix dimensions) are unwrapped to
 * plain numbers.
 */

import { parseRawJson, RawJson, RawNum } from "./jsonRaw.js";

export class DecodeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "DecodeError";
  }
}

export interface GateValues {
  xattn: RawNum[];
  dense: RawNum[];
}

export interface CrossAttention {
  /** Possibly truncated weight matrix: one row per molecule atom kept. */
  matrix: RawNum[][];
  /** Full (pre-truncation) dimensions reported by the server. */
  rows: number;
  cols: number;
  truncated: boolean;
}

export interface OutputValue {
  label: string;
  value: RawNum;
}

export interface PredictResponse {
  requestSha256: string;
  smiles: string;
  task: string | null;
  taskType: string;
  variant: string;
  outputs: OutputValue[];
  gates: GateValues | null;
  tokens: string[];
  crossAttention: CrossAttention | null;
  model: { checkpointSha256: string; variant: string; version: string };
}

export interface ModelInfo {
  variant: string;
  task: string | null;
  taskType: string;
  labelColumns: string[];
  knowledgeDim: number;
  gin: { numLayers: number; hidden: number; inputDim: number };
  fusion: { width: number; heads: number; ffnExpansion: number; numBlocks: number };
  head: { tasks: number; dropout: number };
  provider: string | null;
  gates: GateValues | null;
  checkpointSha256: string;
  version: string;
}

export interface PredictRequest {
  smiles: string;
  knowledgeText?: string;
}

// ---------------------------------------------------------------------------
// narrowing helpers

type JsonObject = { [key: string]: RawJson };

function describe(value: RawJson | undefined): string {
  if (value === undefined) return "missing";
  if (value === null) return "null";
  if (value instanceof RawNum) return "number";
  if (Array.isArray(value)) return "array";
  return typeof value;
}

function asObj(value: RawJson | undefined, name: string): JsonObject {
  if (
    value === null ||
    value === undefined ||
    typeof value !== "object" ||
    Array.isArray(value) ||
    value instanceof RawNum
  ) {
    throw new DecodeError(`${name}: expected an object, got ${describe(value)}`);
  }
  return value;
}

function asArr(value: RawJson | undefined, name: string): RawJson[] {
  if (!Array.isArray(value)) {
    throw new DecodeError(`${name}: expected an array, got ${describe(value)}`);
  }
  return value;
}

function asStr(value: RawJson | undefined, name: string): string {
  if (typeof value !== "string") {
    throw new DecodeError(`${name}: expected a string, got ${describe(value)}`);
  }
  return value;
}

function asStrOrNull(value: RawJson | undefined, name: string): string | null {
  if (value === null) return null;
  return asStr(value, name);
}

function asBool(value: RawJson | undefined, name: string): boolean {
  if (typeof value !== "boolean") {
    throw new DecodeError(`${name}: expected a boolean, got ${describe(value)}`);
  }
  return value;
}

function asRawNum(value: RawJson | undefined, name: string): RawNum {
  if (!(value instanceof RawNum)) {
    throw new DecodeError(`${name}: expected a number, got ${describe(value)}`);
  }
  return value;
}

function asNum(value: RawJson | undefined, name: string): number {
  return asRawNum(value, name).value;
}

function asInt(value: RawJson | undefined, name: string): number {
  const num = asNum(value, name);
  if (!Number.isInteger(num)) {
    throw new DecodeError(`${name}: expected an integer, got ${num}`);
  }
  return num;
}

function asStrArray(value: RawJson | undefined, name: string): string[] {
  return asArr(value, name).map((entry, i) => asStr(entry, `${name}[${i}]`));
}

function asRawNumArray(value: RawJson | undefined, name: string): RawNum[] {
  return asArr(value, name).map((entry, i) => asRawNum(entry, `${name}[${i}]`));
}

function decodeGates(value: RawJson | undefined, name: string): GateValues | null {
  if (value === null) return null;
  const obj = asObj(value, name);
  return {
    xattn: asRawNumArray(obj["xattn"], `${name}.xattn`),
    dense: asRawNumArray(obj["dense"], `${name}.dense`),
  };
}

function decodeAttention(value: RawJson | undefined): CrossAttention | null {
  if (value === null || value === undefined) return null;
  const obj = asObj(value, "cross_attention");
  const matrix = asArr(obj["matrix"], "cross_attention.matrix").map((row, i) =>
    asRawNumArray(row, `cross_attention.matrix[${i}]`),
  );
  const width = matrix[0]?.length ?? 0;
  matrix.forEach((row, i) => {
    if (row.length !== width) {
      throw new DecodeError(
        `cross_attention.matrix[${i}]: ragged row (${row.length} vs ${width})`,
      );
    }
  });
  return {
    matrix,
    rows: asInt(obj["rows"], "cross_attention.rows"),
    cols: asInt(obj["cols"], "cross_attention.cols"),
    truncated: asBool(obj["truncated"], "cross_attention.truncated"),
  };
}

// ---------------------------------------------------------------------------
// payload decoders

export function decodePredictResponse(text: string): PredictResponse {
  const root = asObj(parseRawJson(text), "response");
  const outputs = Object.entries(asObj(root["outputs"], "outputs")).map(
    ([label, value]) => ({ label, value: asRawNum(value, `outputs.${label}`) }),
  );
  if (outputs.length === 0) {
    throw new DecodeError("outputs: expected at least one value");
  }
  const model = asObj(root["model"], "model");
  return {
    requestSha256: asStr(root["request_sha256"], "request_sha256"),
    smiles: asStr(root["smiles"], "smiles"),
    task: asStrOrNull(root["task"], "task"),
    taskType: asStr(root["task_type"], "task_type"),
    variant: asStr(root["variant"], "variant"),
    outputs,
    gates: decodeGates(root["gates"], "gates"),
    tokens: asStrArray(root["tokens"], "tokens"),
    crossAttention: decodeAttention(root["cross_attention"]),
    model: {
      checkpointSha256: asStr(model["checkpoint_sha256"], "model.checkpoint_sha256"),
      variant: asStr(model["variant"], "model.variant"),
      version: asStr(model["version"], "model.version"),
    },
  };
}

export function decodeModelInfo(text: string): ModelInfo {
  const root = asObj(parseRawJson(text), "model info");
  const gin = asObj(root["gin"], "gin");
  const fusion = asObj(root["fusion"], "fusion");
  const head = asObj(root["head"], "head");
  return {
    variant: asStr(root["variant"], "variant"),
    task: asStrOrNull(root["task"], "task"),
    taskType: asStr(root["task_type"], "task_type"),
    labelColumns: asStrArray(root["label_columns"], "label_columns"),
    knowledgeDim: asInt(root["knowledge_dim"], "knowledge_dim"),
    gin: {
      numLayers: asInt(gin["num_layers"], "gin.num_layers"),
      hidden: asInt(gin["hidden"], "gin.hidden"),
      inputDim: asInt(gin["input_dim"], "gin.input_dim"),
    },
    fusion: {
      width: asInt(fusion["width"], "fusion.width"),
      heads: asInt(fusion["heads"], "fusion.heads"),
      ffnExpansion: asInt(fusion["ffn_expansion"], "fusion.ffn_expansion"),
      numBlocks: asInt(fusion["num_blocks"], "fusion.num_blocks"),
    },
    head: {
      tasks: asInt(head["tasks"], "head.tasks"),
      dropout: asNum(head["dropout"], "head.dropout"),
    },
    provider: asStrOrNull(root["provider"], "provider"),
    gates: decodeGates(root["gates"], "gates"),
    checkpointSha256: asStr(root["checkpoint_sha256"], "checkpoint_sha256"),
    version: asStr(root["version"], "version"),
  };
}
