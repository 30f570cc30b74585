// App shell: builds the static layout, wires controls to the API, and
// re-renders canvas + panels from the store on every change. All model
// state shown comes from server responses; clicking a button only ever
// sends a request and waits for acknowledged state (mutations are
// serialized through `mutate`, polling through `pollOnce`).

import { Api, ApiError } from "./api.js";
import { renderCanvas } from "./canvas.js";
import { renderPanels } from "./panels.js";
import { formatElapsed, Store } from "./state.js";
import { ALL_MODES, type EditBody, type ModeName } from "./types.js";

export interface InitOptions {
  baseUrl?: string;
  pollIntervalMs?: number;
  now?: () => number;
}

const DEFAULT_POLL_MS = 1000;

const EXAMPLE_SOURCE = `package HospitalSystem

class Hospital {
  name: String
  numRooms: int
}

class Staff {
  name: String
}

class Doctor {
  speciality: String
  qualification: String
}

Hospital o-- Staff
`;

const LAYOUT = `
  <header class="topbar">
    <strong>modelmate</strong>
    <span id="timer" class="timer">00:00</span>
    <span id="pending" class="pending" hidden>refreshing…</span>
    <span id="error-bar" class="error-bar" hidden></span>
  </header>

  <section id="setup" class="setup">
    <h2>New session</h2>
    <label>Starting model (leave empty for a blank canvas)
      <textarea id="model-source" rows="8" spellcheck="false"></textarea>
    </label>
    <div class="row">
      <label>Package <input id="package-name" value="Model" /></label>
      <label>Mode
        <select id="start-mode">
          <option>NoAssistance</option>
          <option>Automatic</option>
          <option>OnRequest</option>
          <option>AtEnd</option>
        </select>
      </label>
      <label>Seed <input id="seed" type="number" value="0" /></label>
      <button id="load-example">Load example</button>
      <button id="start-session">Start session</button>
    </div>
  </section>

  <main id="workspace" class="workspace" hidden>
    <section class="left">
      <fieldset id="mode-switcher" class="mode-switcher">
        <legend>Assistance mode</legend>
      </fieldset>
      <div id="request-buttons" class="request-buttons" hidden>
        <button data-kinds="classes">Suggest classes</button>
        <button data-kinds="attributes">Suggest attributes</button>
        <button data-kinds="associations">Suggest associations</button>
      </div>
      <div id="predict-holder" hidden>
        <button id="predict">Predict</button>
      </div>

      <details class="editbox" open>
        <summary>Edit canvas</summary>
        <div class="row">
          <input id="new-class-name" placeholder="class name" />
          <button id="add-class">Add class</button>
        </div>
        <div class="row">
          <input id="attr-class" placeholder="class" />
          <input id="attr-name" placeholder="attribute" />
          <input id="attr-type" placeholder="type" value="String" />
          <button id="add-attribute">Add attribute</button>
        </div>
        <div class="row">
          <input id="assoc-source" placeholder="source" />
          <input id="assoc-target" placeholder="target" />
          <select id="assoc-kind">
            <option>association</option>
            <option>aggregation</option>
            <option>composition</option>
            <option>inheritance</option>
          </select>
          <input id="assoc-label" placeholder="label (optional)" />
          <button id="add-association">Add association</button>
        </div>
      </details>

      <div class="row session-actions">
        <button id="download-log">Download log</button>
        <button id="end-session">End session</button>
      </div>
      <pre id="log-view" class="log-view" hidden></pre>
    </section>

    <section id="canvas" class="canvas"></section>
    <aside id="panels" class="panels"></aside>
  </main>
`;

function $<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) {
    throw new Error(`missing element ${selector}`);
  }
  return node as T;
}

export class App {
  readonly store = new Store();
  readonly api: Api;
  private root: HTMLElement;
  private pollIntervalMs: number;
  private now: () => number;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private tickTimer: ReturnType<typeof setInterval> | null = null;
  private pollInFlight = false;
  private mutationInFlight = false;

  constructor(root: HTMLElement, options: InitOptions = {}) {
    this.root = root;
    this.api = new Api(options.baseUrl ?? "");
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_MS;
    this.now = options.now ?? Date.now;

    root.innerHTML = LAYOUT;
    this.buildModeSwitcher();
    this.wireControls();
    this.store.subscribe(() => this.render());
  }

  private buildModeSwitcher(): void {
    const holder = $<HTMLElement>(this.root, "#mode-switcher");
    for (const mode of ALL_MODES) {
      const label = this.root.ownerDocument.createElement("label");
      const radio = this.root.ownerDocument.createElement("input");
      radio.type = "radio";
      radio.name = "mode";
      radio.value = mode;
      radio.addEventListener("change", () => {
        void this.switchMode(mode);
      });
      label.appendChild(radio);
      label.appendChild(this.root.ownerDocument.createTextNode(" " + mode));
      holder.appendChild(label);
    }
  }

  private wireControls(): void {
    $<HTMLButtonElement>(this.root, "#load-example").addEventListener("click", () => {
      $<HTMLTextAreaElement>(this.root, "#model-source").value = EXAMPLE_SOURCE;
    });
    $<HTMLButtonElement>(this.root, "#start-session").addEventListener("click", () => {
      void this.startSession();
    });
    $<HTMLButtonElement>(this.root, "#add-class").addEventListener("click", () => {
      const name = $<HTMLInputElement>(this.root, "#new-class-name").value.trim();
      void this.applyEdit({ kind: "create-class", name });
    });
    $<HTMLButtonElement>(this.root, "#add-attribute").addEventListener("click", () => {
      void this.applyEdit({
        kind: "create-attribute",
        className: $<HTMLInputElement>(this.root, "#attr-class").value.trim(),
        name: $<HTMLInputElement>(this.root, "#attr-name").value.trim(),
        typeName: $<HTMLInputElement>(this.root, "#attr-type").value.trim() || "String",
      });
    });
    $<HTMLButtonElement>(this.root, "#add-association").addEventListener("click", () => {
      const label = $<HTMLInputElement>(this.root, "#assoc-label").value.trim();
      void this.applyEdit({
        kind: "create-association",
        source: $<HTMLInputElement>(this.root, "#assoc-source").value.trim(),
        target: $<HTMLInputElement>(this.root, "#assoc-target").value.trim(),
        associationKind: $<HTMLSelectElement>(this.root, "#assoc-kind").value,
        label: label || undefined,
      });
    });
    for (const button of this.root.querySelectorAll<HTMLButtonElement>("#request-buttons button")) {
      button.addEventListener("click", () => {
        void this.requestSuggestions(button.dataset.kinds ? [button.dataset.kinds] : undefined);
      });
    }
    $<HTMLButtonElement>(this.root, "#predict").addEventListener("click", () => {
      void this.predict();
    });
    $<HTMLButtonElement>(this.root, "#download-log").addEventListener("click", () => {
      void this.showLog();
    });
    $<HTMLButtonElement>(this.root, "#end-session").addEventListener("click", () => {
      void this.endSession();
    });
  }

  // --- actions ------------------------------------------------------------

  async startSession(): Promise<void> {
    const source = $<HTMLTextAreaElement>(this.root, "#model-source").value;
    const packageName = $<HTMLInputElement>(this.root, "#package-name").value.trim() || "Model";
    const mode = $<HTMLSelectElement>(this.root, "#start-mode").value as ModeName;
    const seedRaw = $<HTMLInputElement>(this.root, "#seed").value;
    try {
      const created = await this.api.createSession({
        modelSource: source.trim() ? source : undefined,
        packageName,
        mode,
        seed: seedRaw === "" ? undefined : Number(seedRaw),
      });
      this.store.sessionStarted(
        created.sessionId,
        { revision: created.revision, mode: created.mode, ended: false, model: created.model },
        this.now(),
      );
      this.startTimers();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Serialize mutations: the UI keeps at most one in flight. */
  private async mutate<T>(work: () => Promise<T>): Promise<T | null> {
    if (this.mutationInFlight) {
      return null;
    }
    this.mutationInFlight = true;
    this.store.patch({ busy: true });
    try {
      const result = await work();
      this.store.patch({ busy: false, error: null });
      return result;
    } catch (err) {
      this.fail(err);
      return null;
    } finally {
      this.mutationInFlight = false;
    }
  }

  private sessionId(): string {
    const id = this.store.current.sessionId;
    if (!id) {
      throw new Error("no active session");
    }
    return id;
  }

  async applyEdit(edit: EditBody): Promise<void> {
    const auto = this.store.current.mode === "Automatic";
    const result = await this.mutate(() => this.api.applyEdit(this.sessionId(), edit));
    if (result && auto) {
      this.store.expectRefreshAbove(result.revision);
    }
    await this.pollOnce();
  }

  async acceptCandidate(candidateId: string): Promise<void> {
    const auto = this.store.current.mode === "Automatic";
    const result = await this.mutate(() => this.api.accept(this.sessionId(), candidateId));
    if (result) {
      if (auto) {
        this.store.expectRefreshAbove(result.revision);
      }
      await this.pollOnce();
    }
  }

  async dismissCandidate(candidateId: string): Promise<void> {
    const result = await this.mutate(() => this.api.dismiss(this.sessionId(), candidateId));
    if (result) {
      await this.pollOnce();
    }
  }

  async switchMode(mode: ModeName): Promise<void> {
    await this.mutate(() => this.api.setMode(this.sessionId(), mode));
    await this.pollOnce();
  }

  async requestSuggestions(kinds?: string[]): Promise<void> {
    const result = await this.mutate(() => this.api.requestSuggestions(this.sessionId(), kinds));
    if (result) {
      const { revision, ...suggestions } = result;
      this.store.applySuggestions(suggestions, revision);
      await this.pollOnce();
    }
  }

  async predict(): Promise<void> {
    const result = await this.mutate(() => this.api.finalize(this.sessionId()));
    if (result) {
      const { revision, ...suggestions } = result;
      this.store.applySuggestions(suggestions, revision);
      await this.pollOnce();
    }
  }

  async showLog(): Promise<string | null> {
    try {
      const text = await this.api.log(this.sessionId());
      const view = $<HTMLPreElement>(this.root, "#log-view");
      view.hidden = false;
      view.textContent = text;
      this.offerDownload(text);
      return text;
    } catch (err) {
      this.fail(err);
      return null;
    }
  }

  /** Render a save link next to the log view. A programmatic click would
   * navigate some DOM implementations away from the page, so the link is
   * left for the user. */
  private offerDownload(text: string): void {
    const doc = this.root.ownerDocument;
    const win = doc.defaultView;
    if (!win || typeof win.Blob !== "function" || typeof URL.createObjectURL !== "function") {
      return; // log text is already rendered in #log-view
    }
    try {
      const existing = this.root.querySelector<HTMLAnchorElement>("a.log-download");
      if (existing) {
        URL.revokeObjectURL(existing.href);
        existing.remove();
      }
      const link = doc.createElement("a");
      link.className = "log-download";
      link.href = URL.createObjectURL(new win.Blob([text], { type: "text/csv" }));
      link.download = `${this.sessionId()}.csv`;
      link.textContent = "Save CSV";
      $<HTMLPreElement>(this.root, "#log-view").before(link);
    } catch {
      // blob URLs unavailable; the log stays readable in the view
    }
  }

  async endSession(): Promise<void> {
    await this.mutate(() => this.api.end(this.sessionId()));
    await this.pollOnce();
    this.stopTimers();
  }

  // --- polling ------------------------------------------------------------

  startTimers(): void {
    this.stopTimers();
    this.pollTimer = setInterval(() => {
      void this.pollOnce();
    }, this.pollIntervalMs);
    this.tickTimer = setInterval(() => this.store.tick(this.now()), 250);
  }

  stopTimers(): void {
    if (this.pollTimer) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
    if (this.tickTimer) {
      clearInterval(this.tickTimer);
      this.tickTimer = null;
    }
  }

  /** One poll cycle; at most one in flight. Returns true if state advanced. */
  async pollOnce(): Promise<boolean> {
    const state = this.store.current;
    if (!state.sessionId || this.pollInFlight) {
      return false;
    }
    this.pollInFlight = true;
    try {
      const snapshot = await this.api.pollModel(state.sessionId, state.revision);
      if (snapshot === null) {
        return false;
      }
      const suggestions = await this.api.suggestions(state.sessionId);
      const { revision, ...rest } = suggestions;
      this.store.applySnapshot(snapshot, rest);
      if (snapshot.ended) {
        this.stopTimers();
      }
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    } finally {
      this.pollInFlight = false;
    }
  }

  // --- rendering ----------------------------------------------------------

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.store.failed(err.code, err.message);
    } else {
      this.store.failed("client-error", String(err));
    }
  }

  private render(): void {
    const state = this.store.current;
    $<HTMLElement>(this.root, "#setup").hidden = state.sessionId !== null;
    $<HTMLElement>(this.root, "#workspace").hidden = state.sessionId === null;

    $<HTMLElement>(this.root, "#timer").textContent = formatElapsed(state.elapsedSeconds);
    $<HTMLElement>(this.root, "#pending").hidden = !(state.pendingRefresh || state.busy);

    const errorBar = $<HTMLElement>(this.root, "#error-bar");
    if (state.error) {
      errorBar.hidden = false;
      errorBar.textContent = `${state.error.code}: ${state.error.message}`;
    } else {
      errorBar.hidden = true;
      errorBar.textContent = "";
    }

    if (!state.sessionId) {
      return;
    }

    for (const radio of this.root.querySelectorAll<HTMLInputElement>("input[name=mode]")) {
      radio.checked = radio.value === state.mode;
      radio.disabled = state.ended;
    }
    $<HTMLElement>(this.root, "#request-buttons").hidden = state.mode !== "OnRequest" || state.ended;
    $<HTMLElement>(this.root, "#predict-holder").hidden = state.mode !== "AtEnd" || state.ended;

    if (state.snapshot) {
      renderCanvas($<HTMLElement>(this.root, "#canvas"), state.snapshot.model);
    }
    renderPanels($<HTMLElement>(this.root, "#panels"), state.suggestions, {
      onAccept: (id) => {
        void this.acceptCandidate(id);
      },
      onDismiss: (id) => {
        void this.dismissCandidate(id);
      },
    });
  }
}

export function init(root: HTMLElement, options: InitOptions = {}): App {
  return new App(root, options);
}

const autoRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (autoRoot) {
  init(autoRoot);
}
