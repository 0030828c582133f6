// Thin fetch client for the studio service. Every UI feature goes through
// this module; there is no other backend.

import type {
  Diagnostic,
  InterviewAnswerDoc,
  ResultsDoc,
  SessionInfo,
  StreamItem,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly diagnostics: Diagnostic[] = [],
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let message = `${response.status} ${response.statusText}`;
  let diagnostics: Diagnostic[] = [];
  try {
    const body = await response.json();
    if (Array.isArray(body.diagnostics)) diagnostics = body.diagnostics;
    if (typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(message, response.status, diagnostics);
}

export class StudioApi {
  constructor(readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  createSession(document: string): Promise<{ session: string; diagnostics: Diagnostic[] }> {
    return this.request("POST", "/sessions", { document });
  }

  info(sid: string): Promise<SessionInfo> {
    return this.request("GET", `/sessions/${sid}`);
  }

  updateAgents(sid: string, edits: Record<string, unknown>[]): Promise<{ diagnostics: Diagnostic[] }> {
    return this.request("PATCH", `/sessions/${sid}/agents`, { edits });
  }

  start(sid: string, pacingSps: number | null): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sid}/start`, { pacing_sps: pacingSps });
  }

  pause(sid: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sid}/pause`);
  }

  resume(sid: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sid}/resume`);
  }

  abort(sid: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sid}/abort`);
  }

  events(sid: string, since: number | null, waitS = 0): Promise<{ items: StreamItem[]; next: number; state: string }> {
    const params = new URLSearchParams();
    if (since !== null) params.set("since", String(since));
    if (waitS > 0) params.set("wait_s", String(waitS));
    return this.request("GET", `/sessions/${sid}/events?${params}`);
  }

  interview(sid: string, agent: string, question: string): Promise<InterviewAnswerDoc> {
    return this.request("POST", `/sessions/${sid}/interview`, { agent, question });
  }

  results(sid: string): Promise<ResultsDoc> {
    return this.request("GET", `/sessions/${sid}/results`);
  }

  async logText(sid: string): Promise<string> {
    const response = await fetch(`${this.base}/sessions/${sid}/log`);
    if (!response.ok) throw await parseError(response);
    return response.text();
  }
}

/** Browser push channel; node tests use polling via `events()` instead. */
export function subscribeSse(
  base: string,
  sid: string,
  since: number | null,
  onItem: (item: StreamItem) => void,
  onEnd: () => void,
): () => void {
  const params = since === null ? "" : `?since=${since}`;
  const source = new EventSource(`${base}/sessions/${sid}/stream${params}`);
  source.onmessage = (event) => onItem(JSON.parse(event.data) as StreamItem);
  source.addEventListener("end", () => {
    source.close();
    onEnd();
  });
  return () => source.close();
}
