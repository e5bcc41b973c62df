/**
 * JSON parser that preserves each number's exact source bytes.
 *
 * The console renders predictions, gate values, and attention weights with
 * the very byte sequence the API serialized, instead of re-formatting a
 * parsed double (which could differ in notation across languages).  Every
 * number in the parsed tree is therefore a {@link RawNum} carrying both the
 * numeric value (for meters and color scales) and the raw literal (for
 * display).
 */

/** A JSON number: numeric value plus the exact literal it was parsed from. */
export class RawNum {
  constructor(
    readonly value: number,
    readonly raw: string,
  ) {}
}

export type RawJson =
  | RawNum
  | string
  | boolean
  | null
  | RawJson[]
  | { [key: string]: RawJson };

export class JsonParseError extends Error {
  constructor(
    message: string,
    readonly offset: number,
  ) {
    super(`${message} at offset ${offset}`);
    this.name = "JsonParseError";
  }
}

const NUMBER = /-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/y;
const WHITESPACE = new Set([" ", "\t", "\n", "\r"]);

class Parser {
  pos = 0;

  constructor(readonly text: string) {}

  skipWhitespace(): void {
    while (this.pos < this.text.length && WHITESPACE.has(this.text[this.pos]!)) {
      this.pos += 1;
    }
  }

  private match(word: string): boolean {
    if (this.text.startsWith(word, this.pos)) {
      this.pos += word.length;
      return true;
    }
    return false;
  }

  parseValue(): RawJson {
    this.skipWhitespace();
    const char = this.text[this.pos];
    if (char === undefined) {
      throw new JsonParseError("unexpected end of input", this.pos);
    }
    if (char === "{") return this.parseObject();
    if (char === "[") return this.parseArray();
    if (char === '"') return this.parseString();
    if (this.match("true")) return true;
    if (this.match("false")) return false;
    if (this.match("null")) return null;
    return this.parseNumber();
  }

  private parseNumber(): RawNum {
    NUMBER.lastIndex = this.pos;
    const found = NUMBER.exec(this.text);
    if (!found || found[0].length === 0) {
      throw new JsonParseError("invalid value", this.pos);
    }
    this.pos += found[0].length;
    return new RawNum(Number(found[0]), found[0]);
  }

  private parseString(): string {
    const start = this.pos;
    this.pos += 1; // opening quote
    for (;;) {
      const char = this.text[this.pos];
      if (char === undefined || char === "\n") {
        throw new JsonParseError("unterminated string", start);
      }
      if (char === "\\") {
        this.pos += 2;
        continue;
      }
      this.pos += 1;
      if (char === '"') break;
    }
    // Escape decoding is delegated to the built-in parser on the exact
    // slice, so escape semantics can never drift from standard JSON.
    try {
      return JSON.parse(this.text.slice(start, this.pos)) as string;
    } catch {
      throw new JsonParseError("invalid string escape", start);
    }
  }

  private parseObject(): { [key: string]: RawJson } {
    this.pos += 1; // {
    const result: { [key: string]: RawJson } = {};
    this.skipWhitespace();
    if (this.text[this.pos] === "}") {
      this.pos += 1;
      return result;
    }
    for (;;) {
      this.skipWhitespace();
      if (this.text[this.pos] !== '"') {
        throw new JsonParseError("expected a string key", this.pos);
      }
      const key = this.parseString();
      this.skipWhitespace();
      if (this.text[this.pos] !== ":") {
        throw new JsonParseError("expected ':'", this.pos);
      }
      this.pos += 1;
      result[key] = this.parseValue();
      this.skipWhitespace();
      const next = this.text[this.pos];
      this.pos += 1;
      if (next === ",") continue;
      if (next === "}") return result;
      throw new JsonParseError("expected ',' or '}'", this.pos - 1);
    }
  }

  private parseArray(): RawJson[] {
    this.pos += 1; // [
    const result: RawJson[] = [];
    this.skipWhitespace();
    if (this.text[this.pos] === "]") {
      this.pos += 1;
      return result;
    }
    for (;;) {
      result.push(this.parseValue());
      this.skipWhitespace();
      const next = this.text[this.pos];
      this.pos += 1;
      if (next === ",") continue;
      if (next === "]") return result;
      throw new JsonParseError("expected ',' or ']'", this.pos - 1);
    }
  }
}

/** Parse `text` as JSON, wrapping every number in a {@link RawNum}. */
export function parseRawJson(text: string): RawJson {
  const parser = new Parser(text);
  const value = parser.parseValue();
  parser.skipWhitespace();
  if (parser.pos !== text.length) {
    throw new JsonParseError("unexpected trailing characters", parser.pos);
  }
  return value;
}

/** Recursively unwrap {@link RawNum} values into plain numbers. */
export function plain(value: RawJson): unknown {
  if (value instanceof RawNum) return value.value;
  if (Array.isArray(value)) return value.map(plain);
  if (value !== null && typeof value === "object") {
    const result: Record<string, unknown> = {};
    for (const [key, entry] of Object.entries(value)) {
      result[key] = plain(entry);
    }
    return result;
  }
  return value;
}
