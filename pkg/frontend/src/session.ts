// Labeling session: pulls the next document, submits judgments, requeues skips.

import { ApiClient, LabelAck, QueueItem } from "./api.js";

export interface SessionDoc {
  docId: string;
  text: string;
  cycleIndex: number;
  skipped: boolean;
}

export interface SessionCounts {
  labeled: number;
  skipped: number;
}

/**
 * Skipped documents are kept locally and replayed once the server queue is
 * drained, so "skip" never loses a document and never hits the network.
 */
export class LabelSession {
  current: SessionDoc | null = null;
  lastError: string | null = null;
  private skips: SessionDoc[] = [];
  private counts: SessionCounts = { labeled: 0, skipped: 0 };

  constructor(
    private api: ApiClient,
    private taskName: string,
    private annotator: string = "ui",
  ) {}

  progress(): SessionCounts {
    return { ...this.counts };
  }

  /** Fetch the next document to show. Returns null when everything is labeled. */
  async advance(): Promise<SessionDoc | null> {
    let item: QueueItem;
    try {
      item = await this.api.nextDocument(this.taskName);
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      this.current = null;
      return null;
    }
    this.lastError = null;
    if (item.done) {
      // server exhausted: fall back to documents the annotator set aside
      this.current = this.skips.shift() ?? null;
      return this.current;
    }
    this.current = {
      docId: item.doc_id!,
      text: item.text!,
      cycleIndex: item.cycle_index!,
      skipped: false,
    };
    return this.current;
  }

  /** Submit yes/no for the current document, then advance. */
  async label(cls: "yes" | "no"): Promise<LabelAck | null> {
    if (this.current === null) throw new Error("no document to label");
    const doc = this.current;
    let ack: LabelAck;
    try {
      ack = await this.api.submitLabel(this.taskName, doc.docId, cls, this.annotator);
    } catch (err) {
      // keep the document on screen so the judgment can be retried
      this.lastError = err instanceof Error ? err.message : String(err);
      return null;
    }
    this.lastError = null;
    this.counts.labeled += 1;
    await this.advance();
    return ack;
  }

  /** Set the current document aside and advance; it resurfaces after the queue. */
  async skip(): Promise<SessionDoc | null> {
    if (this.current === null) throw new Error("no document to skip");
    if (!this.current.skipped) {
      this.counts.skipped += 1;
      this.skips.push({ ...this.current, skipped: true });
    }
    return this.advance();
  }
}
