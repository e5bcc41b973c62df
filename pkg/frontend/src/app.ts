/**
 * The console application: a form that submits a molecule plus a chemist
 * note to the prediction API and renders outputs, fusion gate values,
 * text tokens, and the atom × token cross-attention heatmap.
 *
 * Every numeric quantity is rendered from the raw response bytes (see
 * jsonRaw.ts), so what the user reads is exactly what the API said.
 */

import { ApiClient, ApiError, FetchLike } from "./api.js";
import { numText, percent, shortHash, timestamp, variantLabel } from "./format.js";
import { renderHeatmap } from "./heatmap.js";
import { HistoryEntry, PredictionHistory } from "./history.js";
import { ModelInfo, PredictRequest } from "./types.js";

export interface AppOptions {
  /** API origin; empty string means same-origin relative requests. */
  base?: string;
  /** Injected fetch for tests; defaults to the global fetch. */
  fetchFn?: FetchLike;
}

export class ConsoleApp {
  readonly client: ApiClient;
  readonly history = new PredictionHistory();
  model: ModelInfo | null = null;

  private readonly doc: Document;
  private modelBody!: HTMLElement;
  private form!: HTMLFormElement;
  private smilesInput!: HTMLInputElement;
  private textInput!: HTMLTextAreaElement;
  private submitButton!: HTMLButtonElement;
  private errorBox!: HTMLElement;
  private resultPanel!: HTMLElement;
  private historyList!: HTMLElement;

  constructor(
    readonly root: HTMLElement,
    options: AppOptions = {},
  ) {
    this.doc = root.ownerDocument;
    this.client = new ApiClient(options.base ?? "", options.fetchFn);
    this.buildSkeleton();
  }

  /** Fetch model metadata and render the model panel. */
  async init(): Promise<void> {
    try {
      const { info } = await this.client.model();
      this.model = info;
      this.renderModel(info);
    } catch (error) {
      this.modelBody.textContent = "model unavailable";
      this.showError(describeError(error));
    }
  }

  /** Validate the form, call the API, and render the result. */
  async submit(): Promise<HistoryEntry | null> {
    this.clearError();
    const smiles = this.smilesInput.value.trim();
    if (!smiles) {
      this.showError("enter a SMILES string");
      return null;
    }
    const usesText = this.model === null || this.model.variant !== "gin_only";
    const request: PredictRequest = { smiles };
    let knowledgeText: string | null = null;
    if (usesText) {
      knowledgeText = this.textInput.value;
      if (!knowledgeText.trim()) {
        this.showError("this model fuses a chemist note; enter one");
        return null;
      }
      request.knowledgeText = knowledgeText;
    }

    this.submitButton.disabled = true;
    try {
      const { raw, result } = await this.client.predict(request);
      const entry = this.history.add({
        smiles,
        knowledgeText,
        raw,
        result,
        at: new Date(),
      });
      this.renderResult(entry);
      this.renderHistory();
      return entry;
    } catch (error) {
      this.showError(describeError(error));
      return null;
    } finally {
      this.submitButton.disabled = false;
    }
  }

  // -- rendering ------------------------------------------------------------

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = this.doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private row(parent: HTMLElement, term: string, value: string): HTMLElement {
    const wrapper = this.el("div", "kv");
    wrapper.appendChild(this.el("dt", "kv-term", term));
    const detail = this.el("dd", "kv-value", value);
    wrapper.appendChild(detail);
    parent.appendChild(wrapper);
    return detail;
  }

  private buildSkeleton(): void {
    this.root.classList.add("console");

    const header = this.el("header", "masthead");
    header.appendChild(this.el("h1", undefined, "molfuse console"));
    header.appendChild(
      this.el("p", "tagline", "molecular property predictions from graph + chemist knowledge"),
    );
    this.root.appendChild(header);

    const modelPanel = this.el("section", "panel model-panel");
    modelPanel.appendChild(this.el("h2", undefined, "Model"));
    this.modelBody = this.el("div", "model-body", "loading model metadata…");
    this.modelBody.dataset["role"] = "model-body";
    modelPanel.appendChild(this.modelBody);
    this.root.appendChild(modelPanel);

    const formPanel = this.el("section", "panel");
    formPanel.appendChild(this.el("h2", undefined, "Request"));
    this.form = this.el("form", "predict-form");

    const smilesLabel = this.el("label", undefined, "SMILES");
    this.smilesInput = this.el("input");
    this.smilesInput.name = "smiles";
    this.smilesInput.dataset["role"] = "smiles";
    this.smilesInput.placeholder = "c1ccoc1CC";
    this.smilesInput.spellcheck = false;
    smilesLabel.appendChild(this.smilesInput);
    this.form.appendChild(smilesLabel);

    const textLabel = this.el("label", undefined, "Chemist note");
    this.textInput = this.el("textarea");
    this.textInput.name = "knowledge_text";
    this.textInput.dataset["role"] = "knowledge-text";
    this.textInput.rows = 3;
    this.textInput.placeholder = "free-text knowledge about the molecule";
    textLabel.appendChild(this.textInput);
    this.form.appendChild(textLabel);

    this.submitButton = this.el("button", "submit", "Predict");
    this.submitButton.type = "submit";
    this.form.appendChild(this.submitButton);

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    formPanel.appendChild(this.form);
    this.root.appendChild(formPanel);

    this.errorBox = this.el("div", "error-box");
    this.errorBox.dataset["role"] = "error";
    this.errorBox.hidden = true;
    this.root.appendChild(this.errorBox);

    this.resultPanel = this.el("section", "panel result-panel");
    this.resultPanel.dataset["role"] = "result";
    this.resultPanel.hidden = true;
    this.root.appendChild(this.resultPanel);

    const historyPanel = this.el("section", "panel history-panel");
    historyPanel.appendChild(this.el("h2", undefined, "History"));
    this.historyList = this.el("ul", "history");
    this.historyList.dataset["role"] = "history";
    historyPanel.appendChild(this.historyList);
    this.root.appendChild(historyPanel);
  }

  private renderModel(info: ModelInfo): void {
    this.modelBody.textContent = "";
    const list = this.el("dl", "model-grid");
    this.row(list, "variant", `${variantLabel(info.variant)} (${info.variant})`);
    this.row(list, "task", info.task ?? "—");
    this.row(list, "objective", info.taskType);
    this.row(list, "labels", info.labelColumns.join(", "));
    this.row(
      list,
      "graph encoder",
      `${info.gin.numLayers} layers × ${info.gin.hidden} hidden`,
    );
    if (info.variant !== "gin_only") {
      this.row(
        list,
        "fusion",
        `${info.fusion.width} wide, ${info.fusion.heads} heads, ` +
          `${info.fusion.numBlocks} block${info.fusion.numBlocks === 1 ? "" : "s"}`,
      );
      this.row(list, "text embedding", `${info.knowledgeDim}-d (${info.provider ?? "none"})`);
    }
    if (info.gates) {
      const gateText = info.gates.xattn
        .map((gate, block) => `block ${block}: ${gate.raw} / ${info.gates!.dense[block]!.raw}`)
        .join("; ");
      this.row(list, "gates tanh(α) x-attn / dense", gateText);
    }
    const ckpt = this.row(list, "checkpoint", shortHash(info.checkpointSha256));
    ckpt.title = info.checkpointSha256;
    this.row(list, "version", info.version);
    this.modelBody.appendChild(list);

    if (info.variant === "gin_only") {
      this.textInput.disabled = true;
      this.textInput.placeholder = "this model reads only the molecular graph";
    } else {
      this.textInput.disabled = false;
    }
  }

  private renderResult(entry: HistoryEntry): void {
    const { result } = entry;
    this.resultPanel.hidden = false;
    this.resultPanel.textContent = "";
    this.resultPanel.appendChild(this.el("h2", undefined, "Prediction"));

    const meta = this.el("dl", "result-meta");
    this.row(meta, "molecule", result.smiles);
    this.row(meta, "task", result.task ?? "—");
    this.row(meta, "variant", variantLabel(result.variant));
    this.row(meta, "submitted", timestamp(entry.at));
    this.resultPanel.appendChild(meta);

    const table = this.el("table", "outputs");
    const head = this.el("tr");
    head.appendChild(this.el("th", undefined, "label"));
    head.appendChild(
      this.el("th", undefined, result.taskType === "classification" ? "probability" : "value"),
    );
    table.appendChild(head);
    for (const output of result.outputs) {
      const row = this.el("tr");
      row.appendChild(this.el("td", "output-label", output.label));
      const cell = this.el("td", "output-cell");
      const value = this.el("span", "output-value", numText(output.value));
      value.dataset["role"] = "output-value";
      value.dataset["label"] = output.label;
      cell.appendChild(value);
      if (result.taskType === "classification") {
        const meter = this.el("div", "meter");
        const fill = this.el("div", "meter-fill");
        fill.style.width = percent(output.value);
        meter.appendChild(fill);
        meter.title = percent(output.value);
        cell.appendChild(meter);
      }
      row.appendChild(cell);
      table.appendChild(row);
    }
    this.resultPanel.appendChild(table);

    const gates = this.el("div", "gates");
    gates.appendChild(this.el("h3", undefined, "Fusion gates"));
    if (result.gates === null) {
      gates.appendChild(
        this.el("p", "gates-none", "no fusion gates: this variant reads only the molecular graph"),
      );
    } else {
      result.gates.xattn.forEach((gate, block) => {
        const line = this.el("div", "gate-row");
        line.appendChild(this.el("span", "gate-name", `block ${block} tanh(α)`));
        line.appendChild(this.el("span", "gate-kind", "cross-attention"));
        const xattn = this.el("span", "gate-value", gate.raw);
        xattn.dataset["role"] = "gate-xattn";
        xattn.dataset["block"] = String(block);
        line.appendChild(xattn);
        line.appendChild(this.el("span", "gate-kind", "dense"));
        const dense = this.el("span", "gate-value", result.gates!.dense[block]!.raw);
        dense.dataset["role"] = "gate-dense";
        dense.dataset["block"] = String(block);
        line.appendChild(dense);
        gates.appendChild(line);
      });
    }
    this.resultPanel.appendChild(gates);

    if (result.tokens.length > 0) {
      const tokens = this.el("div", "tokens");
      tokens.appendChild(this.el("h3", undefined, "Knowledge tokens"));
      const strip = this.el("div", "token-strip");
      for (const token of result.tokens) {
        const chip = this.el("span", "token-chip", token);
        chip.dataset["role"] = "token";
        strip.appendChild(chip);
      }
      tokens.appendChild(strip);
      this.resultPanel.appendChild(tokens);
    }

    if (result.crossAttention) {
      const attention = this.el("div", "attention");
      attention.appendChild(this.el("h3", undefined, "Cross-attention (atoms × tokens)"));
      const matrix = result.crossAttention.matrix;
      const cols = matrix[0]?.length ?? 0;
      attention.appendChild(
        renderHeatmap({
          matrix,
          rowLabels: matrix.map((_, i) => String(i + 1)),
          colLabels: result.tokens.slice(0, cols),
          truncatedFrom: result.crossAttention.truncated
            ? { rows: result.crossAttention.rows, cols: result.crossAttention.cols }
            : null,
          doc: this.doc,
        }),
      );
      this.resultPanel.appendChild(attention);
    }

    const footer = this.el("dl", "result-footer");
    const req = this.row(footer, "request sha256", shortHash(result.requestSha256));
    req.title = result.requestSha256;
    req.dataset["role"] = "request-sha";
    const ckpt = this.row(footer, "checkpoint", shortHash(result.model.checkpointSha256));
    ckpt.title = result.model.checkpointSha256;
    this.resultPanel.appendChild(footer);
  }

  private renderHistory(): void {
    this.historyList.textContent = "";
    for (const entry of this.history.list()) {
      const item = this.el("li", "history-item");
      const button = this.el("button", "history-button");
      button.type = "button";
      button.dataset["role"] = "history-item";
      button.dataset["id"] = String(entry.id);
      const first = entry.result.outputs[0];
      button.appendChild(this.el("code", "history-smiles", entry.smiles));
      button.appendChild(
        this.el("span", "history-value", first ? `${first.label} ${first.value.raw}` : ""),
      );
      button.appendChild(this.el("span", "history-time", timestamp(entry.at)));
      button.addEventListener("click", () => {
        const stored = this.history.get(entry.id);
        if (stored) this.renderResult(stored);
      });
      item.appendChild(button);
      this.historyList.appendChild(item);
    }
  }

  private showError(message: string): void {
    this.errorBox.hidden = false;
    this.errorBox.textContent = message;
  }

  private clearError(): void {
    this.errorBox.hidden = true;
    this.errorBox.textContent = "";
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return `API error ${error.status}: ${error.message}`;
  }
  if (error instanceof Error) {
    return error.message;
  }
  return String(error);
}
