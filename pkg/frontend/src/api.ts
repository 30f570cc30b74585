// Thin fetch client for the session service. Every non-2xx response
// carries {error: {code, message, httpStatus}}; we rethrow that as
// ApiError so the UI can show the code verbatim.

import type { EditBody, ModeName, SessionSnapshot, SuggestionsDict } from "./types.js";

export class ApiError extends Error {
  code: string;
  httpStatus: number;

  constructor(code: string, message: string, httpStatus: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.httpStatus = httpStatus;
  }
}

export interface CreateSessionResult extends Omit<SessionSnapshot, "ended"> {
  sessionId: string;
}

export interface RevisionResult {
  revision: number;
}

export interface SuggestionsResult extends SuggestionsDict {
  revision: number;
}

async function parseError(res: Response): Promise<never> {
  let code = "http-error";
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status-line message
  }
  throw new ApiError(code, message, res.status);
}

export class Api {
  constructor(private baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      await parseError(res);
    }
    return (await res.json()) as T;
  }

  createSession(opts: {
    modelSource?: string;
    packageName?: string;
    mode: ModeName | string;
    seed?: number;
  }): Promise<CreateSessionResult> {
    return this.request("POST", "/sessions", opts);
  }

  /** Returns null on 204 (nothing newer than sinceRevision). */
  async pollModel(sessionId: string, sinceRevision?: number): Promise<SessionSnapshot | null> {
    const query = sinceRevision === undefined ? "" : `?sinceRevision=${sinceRevision}`;
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/model${query}`);
    if (res.status === 204) {
      return null;
    }
    if (!res.ok) {
      await parseError(res);
    }
    return (await res.json()) as SessionSnapshot;
  }

  applyEdit(sessionId: string, edit: EditBody): Promise<RevisionResult> {
    return this.request("POST", `/sessions/${sessionId}/edits`, edit);
  }

  suggestions(sessionId: string): Promise<SuggestionsResult> {
    return this.request("GET", `/sessions/${sessionId}/suggestions`);
  }

  requestSuggestions(sessionId: string, kinds?: string[]): Promise<SuggestionsResult> {
    return this.request("POST", `/sessions/${sessionId}/suggestions/request`, kinds ? { kinds } : {});
  }

  accept(sessionId: string, candidateId: string): Promise<RevisionResult> {
    return this.request("POST", `/sessions/${sessionId}/suggestions/${candidateId}/accept`);
  }

  dismiss(sessionId: string, candidateId: string): Promise<RevisionResult> {
    return this.request("POST", `/sessions/${sessionId}/suggestions/${candidateId}/dismiss`);
  }

  setMode(sessionId: string, mode: ModeName | string): Promise<RevisionResult & { mode: ModeName }> {
    return this.request("POST", `/sessions/${sessionId}/mode`, { mode });
  }

  finalize(sessionId: string): Promise<SuggestionsResult> {
    return this.request("POST", `/sessions/${sessionId}/finalize`);
  }

  end(sessionId: string): Promise<RevisionResult & { ended: boolean }> {
    return this.request("POST", `/sessions/${sessionId}/end`);
  }

  async log(sessionId: string): Promise<string> {
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/log`);
    if (!res.ok) {
      await parseError(res);
    }
    return res.text();
  }
}
