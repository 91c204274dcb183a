/** Thin typed client for the screening service. */

import type { BatchResponse, LabelAck, Progress } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async createSession(
    corpusRef: string,
    featureModel: string,
    strategy: string,
    config: Record<string, unknown>,
  ): Promise<string> {
    const body = JSON.stringify({
      corpus_ref: corpusRef,
      feature_model: featureModel,
      strategy,
      config,
    });
    const result = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body,
    });
    return result.session_id;
  }

  getBatch(sessionId: string): Promise<BatchResponse> {
    return this.request<BatchResponse>(`/sessions/${sessionId}/batch`);
  }

  getProgress(sessionId: string): Promise<Progress> {
    return this.request<Progress>(`/sessions/${sessionId}/progress`);
  }

  postLabel(sessionId: string, docId: string, label: 0 | 1): Promise<LabelAck> {
    return this.request<LabelAck>(`/sessions/${sessionId}/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ labels: [{ id: docId, label }] }),
    });
  }

  async exportTrace(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/export`);
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }
}
