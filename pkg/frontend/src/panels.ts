// Suggestion panels: one list per candidate kind, confidence badge and
// Accept/Dismiss buttons per row. The server already ranks and caps the
// lists, but we cap again at MAX_ROWS so a misbehaving backend can't
// flood the sidebar.

import type {
  AssociationPayloadDict,
  AttributePayloadDict,
  CandidateDict,
  ClassPayloadDict,
  SuggestionsDict,
} from "./types.js";

export const MAX_ROWS = 20;

export interface PanelHandlers {
  onAccept: (candidateId: string) => void;
  onDismiss: (candidateId: string) => void;
}

const EDGE_GLYPHS: Record<string, string> = {
  association: "→",
  aggregation: "◇→",
  composition: "◆→",
  inheritance: "-|>",
};

function describeClass(payload: ClassPayloadDict): string {
  return payload.name;
}

function describeAttribute(payload: AttributePayloadDict): string {
  const type = payload.typeName ?? "?";
  return `${payload.className}.${payload.name}: ${type}`;
}

function describeAssociation(payload: AssociationPayloadDict): string {
  const glyph = EDGE_GLYPHS[payload.kind] ?? "→";
  const label = payload.name ? ` (${payload.name})` : "";
  return `${payload.source} ${glyph} ${payload.target}${label}`;
}

function renderRows<P>(
  doc: Document,
  list: HTMLElement,
  candidates: CandidateDict<P>[],
  describe: (payload: P) => string,
  warning: ((payload: P) => string | null) | null,
  handlers: PanelHandlers,
): void {
  if (candidates.length === 0) {
    const empty = doc.createElement("li");
    empty.className = "panel-empty";
    empty.textContent = "No suggestions yet.";
    list.appendChild(empty);
    return;
  }
  for (const candidate of candidates.slice(0, MAX_ROWS)) {
    const row = doc.createElement("li");
    row.className = "candidate-row";
    row.dataset.candidateId = candidate.candidateId;

    const badge = doc.createElement("span");
    badge.className = "confidence-badge";
    badge.title = "times suggested this session";
    badge.textContent = String(candidate.confidence);
    row.appendChild(badge);

    const label = doc.createElement("span");
    label.className = "candidate-label";
    label.textContent = describe(candidate.payload);
    const warn = warning ? warning(candidate.payload) : null;
    if (warn) {
      label.textContent += " ⚠";
      label.title = warn;
    }
    row.appendChild(label);

    const accept = doc.createElement("button");
    accept.className = "accept-btn";
    accept.textContent = "Accept";
    accept.addEventListener("click", () => handlers.onAccept(candidate.candidateId));
    row.appendChild(accept);

    const dismiss = doc.createElement("button");
    dismiss.className = "dismiss-btn";
    dismiss.textContent = "Dismiss";
    dismiss.addEventListener("click", () => handlers.onDismiss(candidate.candidateId));
    row.appendChild(dismiss);

    list.appendChild(row);
  }
}

function section(doc: Document, title: string, kind: string): { root: HTMLElement; list: HTMLElement } {
  const root = doc.createElement("section");
  root.className = "panel";
  root.dataset.kind = kind;
  const heading = doc.createElement("h3");
  heading.textContent = title;
  root.appendChild(heading);
  const list = doc.createElement("ul");
  list.className = "panel-list";
  root.appendChild(list);
  return { root, list };
}

/** Replace `host`'s contents with the three per-kind candidate panels. */
export function renderPanels(
  host: HTMLElement,
  suggestions: SuggestionsDict,
  handlers: PanelHandlers,
): void {
  const doc = host.ownerDocument;
  host.replaceChildren();

  const classes = section(doc, "Classes", "class");
  renderRows(doc, classes.list, suggestions.classes, describeClass, null, handlers);
  host.appendChild(classes.root);

  const attributes = section(doc, "Attributes", "attribute");
  renderRows(
    doc,
    attributes.list,
    suggestions.attributes,
    describeAttribute,
    (payload) => payload.typeWarning,
    handlers,
  );
  host.appendChild(attributes.root);

  const associations = section(doc, "Associations", "association");
  renderRows(doc, associations.list, suggestions.associations, describeAssociation, null, handlers);
  host.appendChild(associations.root);

  if (suggestions.errors.length > 0) {
    const notes = doc.createElement("p");
    notes.className = "panel-errors";
    notes.textContent = suggestions.errors.join("; ");
    host.appendChild(notes);
  }
}
