import { describe, expect, it, vi } from "vitest";

import { ApiClient, QueueItem } from "./api.js";
import { LabelSession } from "./session.js";

function fakeApi(queue: QueueItem[]) {
  const submitted: { docId: string; cls: string }[] = [];
  const api = {
    nextDocument: vi.fn(async () => queue.shift() ?? { done: true }),
    submitLabel: vi.fn(async (_t: string, docId: string, cls: string) => {
      submitted.push({ docId, cls });
      return { labels_total: submitted.length, cycle_index: 0, training_in_progress: false };
    }),
  } as unknown as ApiClient;
  return { api, submitted };
}

const doc = (id: string): QueueItem => ({
  done: false,
  doc_id: id,
  text: `text of ${id}`,
  cycle_index: 1,
});

describe("LabelSession", () => {
  it("advances through the server queue", async () => {
    const { api } = fakeApi([doc("a"), doc("b")]);
    const s = new LabelSession(api, "t");
    const first = await s.advance();
    expect(first?.docId).toBe("a");
    expect(s.current?.text).toBe("text of a");
  });

  it("labeling submits and moves to the next document", async () => {
    const { api, submitted } = fakeApi([doc("a"), doc("b")]);
    const s = new LabelSession(api, "t", "me");
    await s.advance();
    const ack = await s.label("yes");
    expect(ack?.labels_total).toBe(1);
    expect(submitted).toEqual([{ docId: "a", cls: "yes" }]);
    expect(s.current?.docId).toBe("b");
    expect(s.progress().labeled).toBe(1);
  });

  it("skips are requeued after the server runs dry", async () => {
    const { api } = fakeApi([doc("a"), doc("b")]);
    const s = new LabelSession(api, "t");
    await s.advance();
    await s.skip(); // sets "a" aside, shows "b"
    expect(s.current?.docId).toBe("b");
    await s.label("no"); // queue now empty -> "a" resurfaces
    expect(s.current?.docId).toBe("a");
    expect(s.current?.skipped).toBe(true);
    expect(s.progress()).toEqual({ labeled: 1, skipped: 1 });
  });

  it("a skipped document can still be labeled", async () => {
    const { api, submitted } = fakeApi([doc("a")]);
    const s = new LabelSession(api, "t");
    await s.advance();
    await s.skip();
    expect(s.current?.docId).toBe("a");
    await s.label("yes");
    expect(submitted).toEqual([{ docId: "a", cls: "yes" }]);
    expect(s.current).toBeNull();
  });

  it("returns null when everything is labeled", async () => {
    const { api } = fakeApi([]);
    const s = new LabelSession(api, "t");
    expect(await s.advance()).toBeNull();
    await expect(s.label("yes")).rejects.toThrow("no document");
  });

  it("keeps the document on a failed submit so it can be retried", async () => {
    const { api } = fakeApi([doc("a"), doc("b")]);
    const s = new LabelSession(api, "t");
    await s.advance();
    (api.submitLabel as ReturnType<typeof vi.fn>).mockRejectedValueOnce(
      new Error("network down"),
    );
    const ack = await s.label("yes");
    expect(ack).toBeNull();
    expect(s.lastError).toBe("network down");
    expect(s.current?.docId).toBe("a");
    expect(s.progress().labeled).toBe(0);
    // retry succeeds and clears the error
    await s.label("yes");
    expect(s.lastError).toBeNull();
    expect(s.current?.docId).toBe("b");
  });

  it("surfaces fetch failures from advance without throwing", async () => {
    const api = {
      nextDocument: vi.fn().mockRejectedValue(new Error("HTTP 500")),
    } as unknown as ApiClient;
    const s = new LabelSession(api, "t");
    expect(await s.advance()).toBeNull();
    expect(s.lastError).toBe("HTTP 500");
  });
});
