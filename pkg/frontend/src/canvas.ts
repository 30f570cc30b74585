// SVG class-diagram renderer. Boxes on a simple grid, straight edges
// clipped to box borders, arrowheads by association kind: hollow
// triangle for inheritance (at the supertype end), hollow diamond for
// aggregation and a filled one for composition (at the owning end,
// which the wire format puts first).

import type { AssociationDict, ClassDict, ModelDict } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const BOX_PADDING_X = 10;
const HEADER_HEIGHT = 26;
const ROW_HEIGHT = 18;
const CHAR_WIDTH = 7.5;
const MIN_BOX_WIDTH = 110;
const GRID_GAP_X = 70;
const GRID_GAP_Y = 60;
const CANVAS_MARGIN = 30;

interface Box {
  name: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

function boxSize(cls: ClassDict): { width: number; height: number } {
  let longest = cls.name.length;
  for (const attr of cls.attributes) {
    longest = Math.max(longest, attr.name.length + attr.typeName.length + 2);
  }
  const width = Math.max(MIN_BOX_WIDTH, longest * CHAR_WIDTH + BOX_PADDING_X * 2);
  const height = HEADER_HEIGHT + Math.max(1, cls.attributes.length) * ROW_HEIGHT;
  return { width, height };
}

/** Grid layout: roughly square, row-major, row height from its tallest box. */
export function layoutBoxes(classes: ClassDict[]): Map<string, Box> {
  const boxes = new Map<string, Box>();
  if (classes.length === 0) {
    return boxes;
  }
  const columns = Math.ceil(Math.sqrt(classes.length));
  let x = CANVAS_MARGIN;
  let y = CANVAS_MARGIN;
  let rowHeight = 0;
  classes.forEach((cls, i) => {
    const { width, height } = boxSize(cls);
    if (i > 0 && i % columns === 0) {
      x = CANVAS_MARGIN;
      y += rowHeight + GRID_GAP_Y;
      rowHeight = 0;
    }
    boxes.set(cls.name, { name: cls.name, x, y, width, height });
    x += width + GRID_GAP_X;
    rowHeight = Math.max(rowHeight, height);
  });
  return boxes;
}

/** Point where the segment from the box center towards (tx, ty) leaves the box. */
function borderPoint(box: Box, tx: number, ty: number): { x: number; y: number } {
  const cx = box.x + box.width / 2;
  const cy = box.y + box.height / 2;
  const dx = tx - cx;
  const dy = ty - cy;
  if (dx === 0 && dy === 0) {
    return { x: cx, y: cy };
  }
  const scaleX = dx !== 0 ? box.width / 2 / Math.abs(dx) : Infinity;
  const scaleY = dy !== 0 ? box.height / 2 / Math.abs(dy) : Infinity;
  const scale = Math.min(scaleX, scaleY);
  return { x: cx + dx * scale, y: cy + dy * scale };
}

function el<K extends keyof SVGElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function markerDefs(doc: Document): SVGDefsElement {
  const defs = doc.createElementNS(SVG_NS, "defs") as SVGDefsElement;

  const triangle = el(doc, "marker", {
    id: "arrow-inheritance",
    viewBox: "0 0 16 12",
    refX: "15",
    refY: "6",
    markerWidth: "16",
    markerHeight: "12",
    orient: "auto-start-reverse",
    markerUnits: "userSpaceOnUse",
  });
  triangle.appendChild(
    el(doc, "path", { d: "M 1 1 L 15 6 L 1 11 Z", fill: "white", stroke: "black" }),
  );
  defs.appendChild(triangle);

  for (const [kind, fill] of [
    ["aggregation", "white"],
    ["composition", "black"],
  ] as const) {
    const diamond = el(doc, "marker", {
      id: `arrow-${kind}`,
      viewBox: "0 0 18 12",
      refX: "1",
      refY: "6",
      markerWidth: "18",
      markerHeight: "12",
      orient: "auto",
      markerUnits: "userSpaceOnUse",
    });
    diamond.appendChild(
      el(doc, "path", { d: "M 1 6 L 9 1 L 17 6 L 9 11 Z", fill, stroke: "black" }),
    );
    defs.appendChild(diamond);
  }

  const open = el(doc, "marker", {
    id: "arrow-association",
    viewBox: "0 0 12 12",
    refX: "11",
    refY: "6",
    markerWidth: "12",
    markerHeight: "12",
    orient: "auto-start-reverse",
    markerUnits: "userSpaceOnUse",
  });
  open.appendChild(
    el(doc, "path", { d: "M 1 1 L 11 6 L 1 11", fill: "none", stroke: "black" }),
  );
  defs.appendChild(open);

  return defs;
}

function renderBox(doc: Document, cls: ClassDict, box: Box): SVGGElement {
  const group = el(doc, "g", { class: "class-box", "data-class": cls.name });
  group.appendChild(
    el(doc, "rect", {
      x: String(box.x),
      y: String(box.y),
      width: String(box.width),
      height: String(box.height),
      fill: "#fdf6e3",
      stroke: "#333",
      rx: "2",
    }),
  );
  group.appendChild(
    el(doc, "line", {
      x1: String(box.x),
      y1: String(box.y + HEADER_HEIGHT - 4),
      x2: String(box.x + box.width),
      y2: String(box.y + HEADER_HEIGHT - 4),
      stroke: "#333",
    }),
  );
  const title = el(doc, "text", {
    x: String(box.x + box.width / 2),
    y: String(box.y + 17),
    "text-anchor": "middle",
    "font-weight": "bold",
    "font-size": "13",
    class: "class-title",
  });
  title.textContent = cls.name;
  group.appendChild(title);

  cls.attributes.forEach((attr, i) => {
    const row = el(doc, "text", {
      x: String(box.x + BOX_PADDING_X),
      y: String(box.y + HEADER_HEIGHT + 10 + i * ROW_HEIGHT),
      "font-size": "12",
      class: "attr-row",
    });
    row.textContent = `${attr.name}: ${attr.typeName}`;
    group.appendChild(row);
  });
  return group;
}

function renderEdge(
  doc: Document,
  assoc: AssociationDict,
  boxes: Map<string, Box>,
): SVGGElement | null {
  const sourceBox = boxes.get(assoc.source);
  const targetBox = boxes.get(assoc.target);
  if (!sourceBox || !targetBox) {
    return null;
  }
  const targetCenter = {
    x: targetBox.x + targetBox.width / 2,
    y: targetBox.y + targetBox.height / 2,
  };
  const sourceCenter = {
    x: sourceBox.x + sourceBox.width / 2,
    y: sourceBox.y + sourceBox.height / 2,
  };
  const from = borderPoint(sourceBox, targetCenter.x, targetCenter.y);
  const to = borderPoint(targetBox, sourceCenter.x, sourceCenter.y);

  const group = el(doc, "g", {
    class: "edge",
    "data-kind": assoc.kind,
    "data-source": assoc.source,
    "data-target": assoc.target,
  });
  const line = el(doc, "line", {
    x1: String(from.x),
    y1: String(from.y),
    x2: String(to.x),
    y2: String(to.y),
    stroke: "black",
    "stroke-width": "1.5",
  });
  // Inheritance and plain associations point at the target; the
  // aggregation/composition diamond sits at the source (owning) end.
  if (assoc.kind === "inheritance" || assoc.kind === "association") {
    line.setAttribute("marker-end", `url(#arrow-${assoc.kind})`);
  } else {
    line.setAttribute("marker-start", `url(#arrow-${assoc.kind})`);
  }
  group.appendChild(line);

  if (assoc.name) {
    const label = el(doc, "text", {
      x: String((from.x + to.x) / 2),
      y: String((from.y + to.y) / 2 - 6),
      "text-anchor": "middle",
      "font-size": "11",
      "font-style": "italic",
      class: "edge-label",
    });
    label.textContent = assoc.name;
    group.appendChild(label);
  }
  return group;
}

/** Replace `host`'s contents with an SVG drawing of `model`. */
export function renderCanvas(host: HTMLElement, model: ModelDict): void {
  const doc = host.ownerDocument;
  host.replaceChildren();

  if (model.classes.length === 0) {
    const hint = doc.createElement("p");
    hint.className = "canvas-hint";
    hint.textContent = "Empty canvas. Add a class to start modeling.";
    host.appendChild(hint);
    return;
  }

  const boxes = layoutBoxes(model.classes);
  let width = 0;
  let height = 0;
  for (const box of boxes.values()) {
    width = Math.max(width, box.x + box.width + CANVAS_MARGIN);
    height = Math.max(height, box.y + box.height + CANVAS_MARGIN);
  }

  const svg = el(doc, "svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: "diagram",
  });
  svg.appendChild(markerDefs(doc));

  const edgeLayer = el(doc, "g", { class: "edges" });
  for (const assoc of model.associations) {
    const edge = renderEdge(doc, assoc, boxes);
    if (edge) {
      edgeLayer.appendChild(edge);
    }
  }
  svg.appendChild(edgeLayer);

  const boxLayer = el(doc, "g", { class: "boxes" });
  for (const cls of model.classes) {
    const box = boxes.get(cls.name);
    if (box) {
      boxLayer.appendChild(renderBox(doc, cls, box));
    }
  }
  svg.appendChild(boxLayer);
  host.appendChild(svg);
}
