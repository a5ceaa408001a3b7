import type {
  AnswerResult,
  AskResult,
  CellView,
  CodeView,
  NavView,
  PageMeta,
  ResponseOption,
  RunResult,
  SessionHandle,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

type FetchLike = typeof fetch;

/**
 * Thin typed client for the dpage session API. All navigation, grading and
 * LLM decisions happen on the service; this class only moves JSON.
 */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, payload?.detail ?? payload);
    }
    return payload as T;
  }

  pageMeta(): Promise<PageMeta> {
    return this.request("GET", "/page/meta");
  }

  createSession(pageId: string): Promise<SessionHandle> {
    return this.request("POST", "/sessions", { pageId });
  }

  thread(sessionId: string): Promise<CellView[]> {
    return this.request("GET", `/sessions/${sessionId}/thread`);
  }

  nav(sessionId: string): Promise<NavView> {
    return this.request("GET", `/sessions/${sessionId}/nav`);
  }

  responses(sessionId: string): Promise<ResponseOption[]> {
    return this.request("GET", `/sessions/${sessionId}/responses`);
  }

  select(sessionId: string, cellId: string): Promise<NavView> {
    return this.request("POST", `/sessions/${sessionId}/select`, { cellId });
  }

  jump(sessionId: string, cellId: string): Promise<NavView> {
    return this.request("POST", `/sessions/${sessionId}/jump`, { cellId });
  }

  ask(sessionId: string, question: string): Promise<AskResult> {
    return this.request("POST", `/sessions/${sessionId}/ask`, { question });
  }

  code(sessionId: string, cellId: string): Promise<CodeView> {
    return this.request("GET", `/sessions/${sessionId}/code/${cellId}`);
  }

  answer(sessionId: string, directiveId: string, selected: number[]): Promise<AnswerResult> {
    return this.request("POST", `/sessions/${sessionId}/answers/${directiveId}`, { selected });
  }

  answerAction(sessionId: string, directiveId: string, action: "skip" | "reveal"): Promise<AnswerResult> {
    return this.request("POST", `/sessions/${sessionId}/answers/${directiveId}`, { action });
  }

  run(sessionId: string, directiveId: string, code: string): Promise<RunResult> {
    return this.request("POST", `/sessions/${sessionId}/run/${directiveId}`, { code });
  }
}
