import { describe, expect, it } from "vitest";

import { ConsoleApp } from "../src/app.js";
import {
  fixture,
  gateLiterals,
  lastPredictBody,
  mockFetch,
  outputLiteral,
  RecordedCall,
  Route,
} from "./helpers.js";

const MODEL_RAW = fixture("model_response.json");
const PREDICT_RAW = fixture("predict_response.json");
const REQUEST_RAW = fixture("predict_request.json");
const ERROR_RAW = fixture("error_response.json");
const GIN_MODEL_RAW = fixture("model_gin_response.json");
const GIN_PREDICT_RAW = fixture("predict_gin_response.json");
const GIN_REQUEST_RAW = fixture("predict_gin_request.json");

const FIXTURE_REQUEST = JSON.parse(REQUEST_RAW) as { smiles: string; knowledge_text: string };
/** Heavy atoms in the fixture molecule c1ccoc1CC. */
const FIXTURE_ATOMS = 7;

async function mount(routes: { model?: Route; predict?: Route }): Promise<{
  app: ConsoleApp;
  root: HTMLElement;
  calls: RecordedCall[];
}> {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const { fn, calls } = mockFetch(routes);
  const app = new ConsoleApp(root, { fetchFn: fn });
  await app.init();
  return { app, root, calls };
}

function field<T extends HTMLElement>(root: HTMLElement, role: string): T {
  const node = root.querySelector(`[data-role="${role}"]`);
  if (!node) throw new Error(`missing [data-role="${role}"]`);
  return node as T;
}

function fillFixtureForm(root: HTMLElement): void {
  field<HTMLInputElement>(root, "smiles").value = FIXTURE_REQUEST.smiles;
  field<HTMLTextAreaElement>(root, "knowledge-text").value = FIXTURE_REQUEST.knowledge_text;
}

describe("ConsoleApp", () => {
  it("renders model metadata on init", async () => {
    const { root } = await mount({ model: { body: MODEL_RAW } });
    const body = field<HTMLElement>(root, "model-body").textContent ?? "";
    expect(body).toContain("graph + knowledge fusion");
    expect(body).toContain("fusion_synthetic");
    const checkpoint = (JSON.parse(MODEL_RAW) as { checkpoint_sha256: string }).checkpoint_sha256;
    expect(body).toContain(checkpoint.slice(0, 12));
    expect(field<HTMLTextAreaElement>(root, "knowledge-text").disabled).toBe(false);
  });

  it("submits the fixture request and renders prediction and gates byte-identically", async () => {
    const { app, root, calls } = await mount({
      model: { body: MODEL_RAW },
      predict: { body: PREDICT_RAW },
    });
    fillFixtureForm(root);
    const entry = await app.submit();
    expect(entry).not.toBeNull();

    // the submitted body is exactly the captured fixture request bytes
    expect(lastPredictBody(calls)).toBe(REQUEST_RAW);

    // rendered prediction equals the response bytes for that value
    const expectedOutput = outputLiteral(PREDICT_RAW, "active");
    expect(expectedOutput.length).toBeGreaterThan(10); // full double precision, not a rounding
    const rendered = field<HTMLElement>(root, "output-value").textContent;
    expect(rendered).toBe(expectedOutput);
    expect(PREDICT_RAW).toContain(`"active": ${rendered}`);

    // rendered gate values equal the response bytes for tanh(alpha)
    const xattn = field<HTMLElement>(root, "gate-xattn").textContent;
    const dense = field<HTMLElement>(root, "gate-dense").textContent;
    expect(xattn).toBe(gateLiterals(PREDICT_RAW, "xattn")[0]);
    expect(dense).toBe(gateLiterals(PREDICT_RAW, "dense")[0]);
    expect(PREDICT_RAW).toContain(`"xattn": [${xattn}]`);
    expect(PREDICT_RAW).toContain(`"dense": [${dense}]`);
  });

  it("renders the attention heatmap at molecule-atoms × text-tokens", async () => {
    const { app, root } = await mount({
      model: { body: MODEL_RAW },
      predict: { body: PREDICT_RAW },
    });
    fillFixtureForm(root);
    await app.submit();

    const parsed = JSON.parse(PREDICT_RAW) as {
      tokens: string[];
      cross_attention: { rows: number; cols: number; matrix: number[][] };
    };
    expect(parsed.cross_attention.rows).toBe(FIXTURE_ATOMS);
    expect(parsed.cross_attention.cols).toBe(parsed.tokens.length);

    const heatmap = root.querySelector(".heatmap") as HTMLElement;
    expect(heatmap).not.toBeNull();
    expect(heatmap.dataset["rows"]).toBe(String(parsed.cross_attention.rows));
    expect(heatmap.dataset["cols"]).toBe(String(parsed.cross_attention.cols));
    expect(heatmap.querySelectorAll(".hm-cell").length).toBe(
      parsed.cross_attention.rows * parsed.cross_attention.cols,
    );
    expect(root.querySelectorAll('[data-role="token"]').length).toBe(parsed.tokens.length);

    // spot-check: a cell tooltip carries the raw weight bytes
    const firstWeight = /"matrix": \[\[(-?\d[\d.eE+\-]*)/.exec(PREDICT_RAW)?.[1];
    expect(firstWeight).toBeTruthy();
    const firstCell = heatmap.querySelector('.hm-cell[data-row="0"][data-col="0"]') as HTMLElement;
    expect(firstCell.title).toContain(firstWeight!);
  });

  it("validates locally before calling the API", async () => {
    const { app, root, calls } = await mount({ model: { body: MODEL_RAW } });
    const errorBox = field<HTMLElement>(root, "error");

    await app.submit(); // empty form
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toContain("SMILES");

    field<HTMLInputElement>(root, "smiles").value = "CCO";
    await app.submit(); // fusion model without a note
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toContain("note");

    expect(calls.filter((call) => call.url.endsWith("/api/predict")).length).toBe(0);
  });

  it("renders server error messages with their status", async () => {
    const { app, root } = await mount({
      model: { body: MODEL_RAW },
      predict: { body: ERROR_RAW, status: 400 },
    });
    field<HTMLInputElement>(root, "smiles").value = "C1CC";
    field<HTMLTextAreaElement>(root, "knowledge-text").value = "a potent binder";
    const entry = await app.submit();
    expect(entry).toBeNull();
    const errorBox = field<HTMLElement>(root, "error");
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toBe(
      "API error 400: unmatched ring closure digit 1 (byte offset 1)",
    );
    expect((root.querySelector('[data-role="result"]') as HTMLElement).hidden).toBe(true);
  });

  it("handles graph-only models: note disabled, omitted from the request, no gates or heatmap", async () => {
    const { app, root, calls } = await mount({
      model: { body: GIN_MODEL_RAW },
      predict: { body: GIN_PREDICT_RAW },
    });
    const note = field<HTMLTextAreaElement>(root, "knowledge-text");
    expect(note.disabled).toBe(true);

    field<HTMLInputElement>(root, "smiles").value = "CCO";
    await app.submit();

    expect(lastPredictBody(calls)).toBe(GIN_REQUEST_RAW);
    expect(field<HTMLElement>(root, "output-value").textContent).toBe(
      outputLiteral(GIN_PREDICT_RAW, "expt"),
    );
    expect(root.querySelector(".gates-none")).not.toBeNull();
    expect(root.querySelector(".heatmap")).toBeNull();
    expect(root.querySelectorAll('[data-role="token"]').length).toBe(0);
  });

  it("restores earlier predictions from history", async () => {
    const { app, root } = await mount({
      model: { body: MODEL_RAW },
      predict: { body: PREDICT_RAW },
    });
    fillFixtureForm(root);
    await app.submit();
    await app.submit();
    const items = root.querySelectorAll('[data-role="history-item"]');
    expect(items.length).toBe(2);

    // wipe the displayed value, then restore the first (oldest) entry
    field<HTMLElement>(root, "output-value").textContent = "clobbered";
    const oldest = root.querySelector('[data-role="history-item"][data-id="1"]');
    expect(oldest).not.toBeNull();
    (oldest as HTMLButtonElement).click();
    expect(field<HTMLElement>(root, "output-value").textContent).toBe(
      outputLiteral(PREDICT_RAW, "active"),
    );
  });

  it("stays usable when model metadata is unavailable", async () => {
    const { app, root } = await mount({
      model: { body: '{"error": "no checkpoint loaded"}', status: 503 },
      predict: { body: PREDICT_RAW },
    });
    expect(field<HTMLElement>(root, "model-body").textContent).toBe("model unavailable");
    expect(field<HTMLElement>(root, "error").textContent).toContain("503");

    fillFixtureForm(root);
    const entry = await app.submit();
    expect(entry).not.toBeNull();
    expect(field<HTMLElement>(root, "output-value").textContent).toBe(
      outputLiteral(PREDICT_RAW, "active"),
    );
  });
});
