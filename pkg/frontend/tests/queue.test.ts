import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { DecisionQueue } from "../src/queue.js";
import type { Decision, LabelAck } from "../src/types.js";

function decision(docId: string, decide: "include" | "exclude" = "include"): Decision {
  return { docId, decision: decide, timestamp: 1 };
}

function ack(remaining: number): LabelAck {
  return { accepted: 1, remaining_in_batch: remaining };
}

type Harness = {
  queue: DecisionQueue;
  delivered: Decision[];
  rejected: { decision: Decision; status: number }[];
  received: string[];
  retries: (() => void)[];
  setOffline: (value: boolean) => void;
};

function makeHarness(options: { rejectWith?: Map<string, number> } = {}): Harness {
  let offline = false;
  const received: string[] = [];
  const delivered: Decision[] = [];
  const rejected: { decision: Decision; status: number }[] = [];
  const retries: (() => void)[] = [];

  const queue = new DecisionQueue(
    async (d) => {
      if (offline) throw new TypeError("fetch failed");
      const status = options.rejectWith?.get(d.docId);
      if (status) throw new ApiError(status, `rejected ${d.docId}`);
      received.push(d.docId);
      return ack(0);
    },
    {
      onDelivered: (d) => delivered.push(d),
      onRejected: (d, error) => rejected.push({ decision: d, status: error.status }),
    },
    1,
    (fn) => retries.push(fn),
  );
  return {
    queue,
    delivered,
    rejected,
    received,
    retries,
    setOffline: (value) => {
      offline = value;
    },
  };
}

async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

describe("DecisionQueue", () => {
  it("delivers decisions in order when online", async () => {
    const h = makeHarness();
    h.queue.enqueue(decision("a"));
    h.queue.enqueue(decision("b"));
    await settle();
    expect(h.received).toEqual(["a", "b"]);
    expect(h.queue.pending).toBe(0);
  });

  it("refuses a second decision for the same document", async () => {
    const h = makeHarness();
    expect(h.queue.enqueue(decision("a", "include"))).toBe(true);
    expect(h.queue.enqueue(decision("a", "exclude"))).toBe(false);
    await settle();
    expect(h.received).toEqual(["a"]);
  });

  it("delivers outage-time decisions exactly once after reconnect", async () => {
    const h = makeHarness();
    h.setOffline(true);
    for (const docId of ["a", "b", "c"]) h.queue.enqueue(decision(docId));
    await settle();
    expect(h.received).toEqual([]);
    expect(h.queue.pending).toBe(3);
    expect(h.queue.isOnline).toBe(false);
    expect(h.retries.length).toBe(1);

    // still offline: the scheduled retry fails again and reschedules
    h.retries.shift()!();
    await settle();
    expect(h.queue.pending).toBe(3);
    expect(h.retries.length).toBe(1);

    h.setOffline(false);
    h.retries.shift()!();
    await settle();
    expect(h.received).toEqual(["a", "b", "c"]);
    expect(h.delivered.map((d) => d.docId)).toEqual(["a", "b", "c"]);
    expect(h.queue.pending).toBe(0);
    expect(h.queue.isOnline).toBe(true);
    // exactly once: no duplicates in the server-side receive log
    expect(new Set(h.received).size).toBe(h.received.length);
  });

  it("keeps later decisions queued behind a retrying head", async () => {
    const h = makeHarness();
    h.setOffline(true);
    h.queue.enqueue(decision("a"));
    await settle();
    h.queue.enqueue(decision("b"));
    await settle();
    expect(h.queue.pending).toBe(2);
    h.setOffline(false);
    await h.queue.flush();
    expect(h.received).toEqual(["a", "b"]);
  });

  it("drops permanently rejected decisions and keeps going", async () => {
    const h = makeHarness({ rejectWith: new Map([["bad", 409]]) });
    h.queue.enqueue(decision("good1"));
    h.queue.enqueue(decision("bad"));
    h.queue.enqueue(decision("good2"));
    await settle();
    expect(h.received).toEqual(["good1", "good2"]);
    expect(h.rejected).toHaveLength(1);
    expect(h.rejected[0]!.status).toBe(409);
    expect(h.queue.pending).toBe(0);
  });
});
