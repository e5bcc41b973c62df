/** In-session prediction history, newest first, bounded. */

import { PredictResponse } from "./types.js";

export interface HistoryEntry {
  id: number;
  smiles: string;
  knowledgeText: string | null;
  /** Raw response bytes, kept so restored views stay byte-faithful. */
  raw: string;
  result: PredictResponse;
  at: Date;
}

export class PredictionHistory {
  static readonly LIMIT = 50;

  private entries: HistoryEntry[] = [];
  private nextId = 1;

  add(entry: Omit<HistoryEntry, "id">): HistoryEntry {
    const stored: HistoryEntry = { ...entry, id: this.nextId };
    this.nextId += 1;
    this.entries.unshift(stored);
    if (this.entries.length > PredictionHistory.LIMIT) {
      this.entries.length = PredictionHistory.LIMIT;
    }
    return stored;
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  get(id: number): HistoryEntry | undefined {
    return this.entries.find((entry) => entry.id === id);
  }

  clear(): void {
    this.entries = [];
  }

  get size(): number {
    return this.entries.length;
  }
}
