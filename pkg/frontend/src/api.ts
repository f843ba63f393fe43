/** Typed client for the /v1 API. Every state change round-trips here. */

import type {
  AttentionView,
  Candidate,
  EditSpec,
  FacetView,
  HistoryEntry,
  Knobs,
  ReviewFlag,
  SessionView,
  SpanSpec,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(`${this.baseUrl}/v1${path}`, init);
    if (!resp.ok) {
      let code = `HTTP${resp.status}`;
      let message = resp.statusText;
      try {
        const err = await resp.json();
        code = err.code ?? code;
        message = err.message ?? message;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }

  createSession(text: string) {
    return this.request<{ session_id: string; flags: ReviewFlag[] }>(
      "POST",
      "/sessions",
      { text },
    );
  }

  getSession(sessionId: string) {
    return this.request<SessionView>("GET", `/sessions/${sessionId}`);
  }

  editText(sessionId: string, edits: EditSpec[]) {
    return this.request<{ flags: ReviewFlag[]; text: string }>(
      "PATCH",
      `/sessions/${sessionId}/text`,
      { edits },
    );
  }

  candidates(sessionId: string, kind: "named_entity" | "noun_phrase") {
    return this.request<{ candidates: Candidate[] }>(
      "GET",
      `/sessions/${sessionId}/candidates?kind=${kind}`,
    );
  }

  generate(sessionId: string, spans: SpanSpec[]) {
    return this.request<{ facets: FacetView[]; filtered_out: number }>(
      "POST",
      `/sessions/${sessionId}/generate`,
      { spans },
    );
  }

  attention(sessionId: string, questionId: string) {
    return this.request<AttentionView>(
      "GET",
      `/sessions/${sessionId}/questions/${questionId}/attention`,
    );
  }

  editQuestion(sessionId: string, questionId: string, text: string) {
    return this.request<{ history: HistoryEntry[] }>(
      "PUT",
      `/sessions/${sessionId}/questions/${questionId}`,
      { text },
    );
  }

  questionHistory(sessionId: string, questionId: string) {
    return this.request<{ history: HistoryEntry[] }>(
      "GET",
      `/sessions/${sessionId}/questions/${questionId}/history`,
    );
  }

  editAnswer(sessionId: string, answerId: string, text: string) {
    return this.request<{ history: HistoryEntry[] }>(
      "PUT",
      `/sessions/${sessionId}/answers/${answerId}`,
      { text },
    );
  }

  answerHistory(sessionId: string, answerId: string) {
    return this.request<{ history: HistoryEntry[] }>(
      "GET",
      `/sessions/${sessionId}/answers/${answerId}/history`,
    );
  }

  setKnobs(sessionId: string, knobs: Knobs) {
    return this.request<{ knobs: Knobs; facets: FacetView[] }>(
      "PUT",
      `/sessions/${sessionId}/knobs`,
      knobs,
    );
  }

  exportJson(sessionId: string) {
    return this.request<unknown>(
      "GET",
      `/sessions/${sessionId}/export?format=json`,
    );
  }

  async exportText(sessionId: string): Promise<string> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/v1/sessions/${sessionId}/export?format=text`,
      { method: "GET" },
    );
    if (!resp.ok) {
      throw new ApiError(resp.status, `HTTP${resp.status}`, resp.statusText);
    }
    return resp.text();
  }

  exportUrl(sessionId: string, format: "json" | "text"): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/export?format=${format}`;
  }
}
