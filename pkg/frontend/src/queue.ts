/**
 * Offline-safe decision queue.
 *
 * Decisions enter once (one per document per session) and leave only when
 * the server acknowledges them or permanently rejects them. Network
 * failures keep the head decision queued and schedule a retry, so
 * decisions made during an outage are delivered after reconnect; the
 * server deduplicates by (session, document), which makes a retry of an
 * already-landed POST harmless.
 */

import { ApiError } from "./api.js";
import type { Decision, LabelAck } from "./types.js";

export type QueueCallbacks = {
  onDelivered: (decision: Decision, ack: LabelAck) => void;
  onRejected: (decision: Decision, error: ApiError) => void;
  onConnectivity?: (online: boolean, pending: number) => void;
};

export type Scheduler = (fn: () => void, delayMs: number) => void;

export class DecisionQueue {
  private readonly waiting: Decision[] = [];
  private readonly enqueued = new Set<string>();
  private flushing = false;
  private retryScheduled = false;
  private online = true;
  private sendCount = 0;

  constructor(
    private readonly send: (decision: Decision) => Promise<LabelAck>,
    private readonly callbacks: QueueCallbacks,
    private readonly retryDelayMs = 1000,
    private readonly schedule: Scheduler = (fn, ms) => {
      setTimeout(fn, ms);
    },
  ) {}

  get pending(): number {
    return this.waiting.length;
  }

  get isOnline(): boolean {
    return this.online;
  }

  /** Total send attempts, observable for delivery accounting in tests. */
  get attempts(): number {
    return this.sendCount;
  }

  /** Returns false when the document already has a queued/sent decision. */
  enqueue(decision: Decision): boolean {
    if (this.enqueued.has(decision.docId)) return false;
    this.enqueued.add(decision.docId);
    this.waiting.push(decision);
    void this.flush();
    return true;
  }

  async flush(): Promise<void> {
    if (this.flushing) return;
    this.flushing = true;
    try {
      while (this.waiting.length > 0) {
        const head = this.waiting[0]!;
        let ack: LabelAck;
        try {
          this.sendCount += 1;
          ack = await this.send(head);
        } catch (error) {
          if (error instanceof ApiError) {
            // the server saw and refused this decision: drop it for good
            this.waiting.shift();
            this.callbacks.onRejected(head, error);
            continue;
          }
          // network failure: keep the decision and retry later
          this.setOnline(false);
          this.scheduleRetry();
          return;
        }
        this.waiting.shift();
        this.setOnline(true);
        this.callbacks.onDelivered(head, ack);
      }
    } finally {
      this.flushing = false;
    }
  }

  private scheduleRetry(): void {
    if (this.retryScheduled) return;
    this.retryScheduled = true;
    this.schedule(() => {
      this.retryScheduled = false;
      void this.flush();
    }, this.retryDelayMs);
  }

  private setOnline(online: boolean): void {
    if (this.online !== online) {
      this.online = online;
      this.callbacks.onConnectivity?.(online, this.waiting.length);
    }
  }
}
