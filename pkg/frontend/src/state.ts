// Single source of truth for what the page shows. Every field here is
// server-acknowledged: handlers write into the store only from response
// or poll payloads, never from what the user just clicked. The one
// exception is the in-flight bookkeeping (pendingRefresh, busy), which
// is explicitly presentation state.

import type { ModeName, SessionSnapshot, SuggestionsDict } from "./types.js";

export interface ViewState {
  sessionId: string | null;
  revision: number;
  mode: ModeName;
  ended: boolean;
  snapshot: SessionSnapshot | null;
  suggestions: SuggestionsDict;
  /** true while a suggestion refresh is expected but not yet observed */
  pendingRefresh: boolean;
  /** the refresh is pending until a revision above this is seen */
  pendingAboveRevision: number | null;
  /** true while a mutation request is in flight (at most one) */
  busy: boolean;
  /** last ApiError, shown verbatim until the next successful call */
  error: { code: string; message: string } | null;
  startedAtMs: number | null;
  elapsedSeconds: number;
}

const EMPTY_SUGGESTIONS: SuggestionsDict = {
  classes: [],
  attributes: [],
  associations: [],
  errors: [],
};

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = {
    sessionId: null,
    revision: -1,
    mode: "NoAssistance",
    ended: false,
    snapshot: null,
    suggestions: EMPTY_SUGGESTIONS,
    pendingRefresh: false,
    pendingAboveRevision: null,
    busy: false,
    error: null,
    startedAtMs: null,
    elapsedSeconds: 0,
  };
  private listeners: Listener[] = [];

  get current(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  patch(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  sessionStarted(sessionId: string, snapshot: SessionSnapshot, nowMs: number): void {
    this.patch({
      sessionId,
      revision: snapshot.revision,
      mode: snapshot.mode,
      ended: snapshot.ended,
      snapshot,
      suggestions: EMPTY_SUGGESTIONS,
      pendingRefresh: false,
      pendingAboveRevision: null,
      busy: false,
      error: null,
      startedAtMs: nowMs,
      elapsedSeconds: 0,
    });
  }

  /** A background refresh was scheduled server-side; it will land as a
   * revision above the mutation's own bump. */
  expectRefreshAbove(revision: number): void {
    this.patch({ pendingRefresh: true, pendingAboveRevision: revision });
  }

  /** A poll or mutation response acknowledged newer state. */
  applySnapshot(snapshot: SessionSnapshot, suggestions?: SuggestionsDict): void {
    const refreshLanded =
      this.state.pendingRefresh &&
      this.state.pendingAboveRevision !== null &&
      snapshot.revision > this.state.pendingAboveRevision;
    this.patch({
      revision: snapshot.revision,
      mode: snapshot.mode,
      ended: snapshot.ended,
      snapshot,
      suggestions: suggestions ?? this.state.suggestions,
      pendingRefresh: this.state.pendingRefresh && !refreshLanded,
      pendingAboveRevision: refreshLanded ? null : this.state.pendingAboveRevision,
    });
  }

  applySuggestions(suggestions: SuggestionsDict, revision: number): void {
    this.patch({ suggestions, revision, pendingRefresh: false, pendingAboveRevision: null });
  }

  failed(code: string, message: string): void {
    this.patch({ error: { code, message }, busy: false });
  }

  clearError(): void {
    if (this.state.error) {
      this.patch({ error: null });
    }
  }

  tick(nowMs: number): void {
    if (this.state.startedAtMs === null || this.state.ended) {
      return;
    }
    const elapsed = Math.floor((nowMs - this.state.startedAtMs) / 1000);
    if (elapsed !== this.state.elapsedSeconds) {
      this.patch({ elapsedSeconds: elapsed });
    }
  }
}

export function formatElapsed(totalSeconds: number): string {
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${String(minutes).padStart(2, "0")}:${String(seconds).padStart(2, "0")}`;
}
