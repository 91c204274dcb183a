/** Payload types for the screening service API (shapes mirror the server). */

export type BatchDoc = {
  id: string;
  title: string;
  abstract: string;
  relevance: number | null;
  novelty: number | null;
};

export type BatchResponse = {
  iteration: number;
  docs: BatchDoc[];
  complete?: boolean;
};

export type Progress = {
  screened: number;
  total: number;
  relevant_found: number;
  phase: "novelty" | "relevance_only";
  topics_found: number;
  iteration: number;
};

export type LabelAck = {
  accepted: number;
  remaining_in_batch: number;
};

export type Decision = {
  docId: string;
  decision: "include" | "exclude";
  timestamp: number;
};

export function decisionLabel(decision: Decision["decision"]): 0 | 1 {
  return decision === "include" ? 1 : 0;
}

/** One chart point per completed batch, straight from a progress response. */
export type ChartPoint = {
  iteration: number;
  screened: number;
  relevantFound: number;
  phase: Progress["phase"];
};
