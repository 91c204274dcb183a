/**
 * Session state container.
 *
 * Holds exactly what the server said (batch, progress, chart points built
 * from progress/trace responses) plus the reviewer's in-flight decisions.
 * Displayed numbers always come from a server response field; the store
 * never counts anything up on its own.
 */

import { ApiClient, ApiError } from "./api.js";
import { DecisionQueue, type Scheduler } from "./queue.js";
import {
  decisionLabel,
  type BatchResponse,
  type ChartPoint,
  type Decision,
  type Progress,
} from "./types.js";

export type CardStatus = "pending" | "submitting" | "decided";

export type StoreState = {
  sessionId: string;
  batch: BatchResponse | null;
  progress: Progress | null;
  chart: ChartPoint[];
  cardStatus: Map<string, CardStatus>;
  decisions: Map<string, Decision>;
  selected: number;
  complete: boolean;
  offline: boolean;
  blind: boolean;
  sessionExpired: boolean;
  notice: string | null;
};

type Listener = (state: StoreState) => void;

export class SessionStore {
  private readonly state: StoreState;
  private readonly queue: DecisionQueue;
  private readonly listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    sessionId: string,
    options: { blind?: boolean; retryDelayMs?: number; schedule?: Scheduler } = {},
  ) {
    this.state = {
      sessionId,
      batch: null,
      progress: null,
      chart: [],
      cardStatus: new Map(),
      decisions: new Map(),
      selected: 0,
      complete: false,
      offline: false,
      blind: options.blind ?? false,
      sessionExpired: false,
      notice: null,
    };
    this.queue = new DecisionQueue(
      (decision) => this.api.postLabel(this.state.sessionId, decision.docId, decisionLabel(decision.decision)),
      {
        onDelivered: (decision, ack) => {
          this.state.cardStatus.set(decision.docId, "decided");
          if (ack.remaining_in_batch === 0) void this.advance();
          else this.emit();
        },
        onRejected: (decision, error) => this.handleRejection(decision, error),
        onConnectivity: (online) => {
          this.state.offline = !online;
          this.emit();
        },
      },
      options.retryDelayMs ?? 1000,
      options.schedule,
    );
  }

  getState(): StoreState {
    return this.state;
  }

  get pendingDeliveries(): number {
    return this.queue.pending;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      const index = this.listeners.indexOf(listener);
      if (index >= 0) this.listeners.splice(index, 1);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Initial load; resuming sessions rebuild the chart from the trace. */
  async start(): Promise<void> {
    try {
      const progress = await this.api.getProgress(this.state.sessionId);
      this.state.progress = progress;
      if (progress.iteration > 0) {
        this.state.chart = chartFromTrace(await this.api.exportTrace(this.state.sessionId), progress);
      }
      await this.loadBatch();
    } catch (error) {
      this.absorb(error);
    }
    this.emit();
  }

  private async loadBatch(): Promise<void> {
    const batch = await this.api.getBatch(this.state.sessionId);
    this.state.batch = batch;
    this.state.complete = batch.complete === true || batch.docs.length === 0;
    this.state.selected = 0;
    this.state.cardStatus = new Map(batch.docs.map((d) => [d.id, "pending"]));
    this.state.decisions = new Map();
  }

  /** After the server commits a batch: refresh progress, extend the chart. */
  private async advance(): Promise<void> {
    try {
      const progress = await this.api.getProgress(this.state.sessionId);
      this.state.progress = progress;
      this.state.chart = [
        ...this.state.chart,
        {
          iteration: progress.iteration,
          screened: progress.screened,
          relevantFound: progress.relevant_found,
          phase: progress.phase,
        },
      ];
      await this.loadBatch();
    } catch (error) {
      this.absorb(error);
    }
    this.emit();
  }

  decide(docId: string, decision: "include" | "exclude"): void {
    if (this.state.complete || this.state.batch === null) return;
    if (!this.state.batch.docs.some((d) => d.id === docId)) return;
    const existing = this.state.cardStatus.get(docId);
    if (existing === "decided" || existing === "submitting") {
      this.state.notice = `document ${docId} already has a decision`;
      this.emit();
      return;
    }
    const record: Decision = { docId, decision, timestamp: Date.now() };
    const accepted = this.queue.enqueue(record);
    if (!accepted) {
      this.state.notice = `document ${docId} already has a decision`;
      this.emit();
      return;
    }
    // optimistic: show the decision immediately, roll back on rejection
    this.state.decisions.set(docId, record);
    this.state.cardStatus.set(docId, "submitting");
    this.state.notice = null;
    this.emit();
  }

  decideSelected(decision: "include" | "exclude"): void {
    const doc = this.selectedDoc();
    if (doc) this.decide(doc.id, decision);
  }

  selectedDoc() {
    return this.state.batch?.docs[this.state.selected] ?? null;
  }

  moveSelection(delta: number): void {
    const count = this.state.batch?.docs.length ?? 0;
    if (count === 0) return;
    this.state.selected = Math.min(count - 1, Math.max(0, this.state.selected + delta));
    this.emit();
  }

  exportTrace(): Promise<string> {
    return this.api.exportTrace(this.state.sessionId);
  }

  retryNow(): Promise<void> {
    return this.queue.flush();
  }

  private handleRejection(decision: Decision, error: ApiError): void {
    if (error.status === 409) {
      // the server already holds a decision for this document; keep it
      this.state.cardStatus.set(decision.docId, "decided");
      this.state.notice = error.detail;
    } else {
      // roll the optimistic mark back
      this.state.decisions.delete(decision.docId);
      this.state.cardStatus.set(decision.docId, "pending");
      this.state.notice = error.detail;
    }
    this.emit();
  }

  private absorb(error: unknown): void {
    if (error instanceof ApiError && error.status === 404) {
      this.state.sessionExpired = true;
      this.state.notice = "session not found; reconnect to continue";
    } else if (error instanceof ApiError) {
      this.state.notice = error.detail;
    } else {
      this.state.offline = true;
      this.state.notice = "network unavailable; will retry";
    }
  }
}

/**
 * Rebuild per-batch chart points from the exported trace: the last row of
 * every iteration carries the server's cumulative counts at that commit,
 * and a non-empty novelty cell marks a novelty-phase batch.
 */
export function chartFromTrace(csv: string, progress: Progress): ChartPoint[] {
  const lines = csv.trim().split("\n");
  const header = lines[0]?.split(",") ?? [];
  const iterationCol = header.indexOf("iteration");
  const screenedCol = header.indexOf("cumulative_screened");
  const relevantCol = header.indexOf("cumulative_relevant");
  const noveltyCol = header.indexOf("novelty");
  if (iterationCol < 0 || screenedCol < 0 || relevantCol < 0) return [];

  const lastPerIteration = new Map<number, ChartPoint>();
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const iteration = Number(cells[iterationCol]);
    if (!Number.isFinite(iteration) || iteration < 1) continue;
    const scoredByNovelty = noveltyCol >= 0 && (cells[noveltyCol] ?? "") !== "";
    const previous = lastPerIteration.get(iteration);
    lastPerIteration.set(iteration, {
      iteration,
      screened: Number(cells[screenedCol]),
      relevantFound: Number(cells[relevantCol]),
      phase: scoredByNovelty || previous?.phase === "novelty" ? "novelty" : "relevance_only",
    });
  }
  const points = [...lastPerIteration.values()].sort((a, b) => a.iteration - b.iteration);
  if (points.length > 0 && progress.iteration === points[points.length - 1]!.iteration) {
    points[points.length - 1]!.phase = progress.phase;
  }
  return points;
}
