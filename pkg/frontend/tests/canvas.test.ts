import { beforeEach, describe, expect, it } from "vitest";

import { layoutBoxes, renderCanvas } from "../src/canvas.js";
import type { ModelDict } from "../src/types.js";

const HOSPITAL: ModelDict = {
  packageName: "HospitalSystem",
  classes: [
    {
      name: "Hospital",
      attributes: [
        { name: "name", typeName: "String" },
        { name: "numRooms", typeName: "int" },
      ],
    },
    { name: "Staff", attributes: [{ name: "name", typeName: "String" }] },
    {
      name: "Doctor",
      attributes: [
        { name: "speciality", typeName: "String" },
        { name: "qualification", typeName: "String" },
      ],
    },
  ],
  associations: [
    { source: "Hospital", target: "Staff", kind: "aggregation", name: null },
    { source: "Doctor", target: "Staff", kind: "inheritance", name: null },
  ],
};

let host: HTMLElement;

beforeEach(() => {
  host = document.createElement("div");
  document.body.appendChild(host);
});

describe("renderCanvas", () => {
  it("draws one box per class and one edge per association", () => {
    renderCanvas(host, HOSPITAL);
    expect(host.querySelectorAll("g.class-box")).toHaveLength(3);
    expect(host.querySelectorAll("g.edge")).toHaveLength(2);
    const titles = [...host.querySelectorAll(".class-title")].map((t) => t.textContent);
    expect(titles).toEqual(["Hospital", "Staff", "Doctor"]);
  });

  it("lists attributes inside their box", () => {
    renderCanvas(host, HOSPITAL);
    const hospital = host.querySelector('g.class-box[data-class="Hospital"]');
    const rows = [...hospital!.querySelectorAll(".attr-row")].map((r) => r.textContent);
    expect(rows).toEqual(["name: String", "numRooms: int"]);
  });

  it("puts a hollow triangle at the inheritance target end", () => {
    renderCanvas(host, HOSPITAL);
    const edge = host.querySelector('g.edge[data-kind="inheritance"] line');
    expect(edge!.getAttribute("marker-end")).toBe("url(#arrow-inheritance)");
    const marker = host.querySelector("marker#arrow-inheritance path");
    expect(marker!.getAttribute("fill")).toBe("white");
  });

  it("puts the diamond at the owning end of an aggregation", () => {
    renderCanvas(host, HOSPITAL);
    const edge = host.querySelector('g.edge[data-kind="aggregation"] line');
    expect(edge!.getAttribute("marker-start")).toBe("url(#arrow-aggregation)");
    expect(edge!.getAttribute("marker-end")).toBeNull();
    const hollow = host.querySelector("marker#arrow-aggregation path");
    expect(hollow!.getAttribute("fill")).toBe("white");
    const filled = host.querySelector("marker#arrow-composition path");
    expect(filled!.getAttribute("fill")).toBe("black");
  });

  it("shows a hint on an empty canvas", () => {
    renderCanvas(host, { packageName: "Fresh", classes: [], associations: [] });
    expect(host.querySelector("svg")).toBeNull();
    expect(host.querySelector(".canvas-hint")!.textContent).toMatch(/add a class/i);
  });

  it("grows to four boxes after a class lands on the canvas", () => {
    renderCanvas(host, HOSPITAL);
    expect(host.querySelectorAll("g.class-box")).toHaveLength(3);
    const grown: ModelDict = {
      ...HOSPITAL,
      classes: [...HOSPITAL.classes, { name: "Patient", attributes: [] }],
    };
    renderCanvas(host, grown);
    expect(host.querySelectorAll("g.class-box")).toHaveLength(4);
    expect(host.querySelector('g.class-box[data-class="Patient"]')).not.toBeNull();
  });

  it("labels named edges", () => {
    const model: ModelDict = {
      packageName: "P",
      classes: [
        { name: "Doctor", attributes: [] },
        { name: "Patient", attributes: [] },
      ],
      associations: [{ source: "Doctor", target: "Patient", kind: "association", name: "treats" }],
    };
    renderCanvas(host, model);
    expect(host.querySelector(".edge-label")!.textContent).toBe("treats");
    const line = host.querySelector("g.edge line");
    expect(line!.getAttribute("marker-end")).toBe("url(#arrow-association)");
  });
});

describe("layoutBoxes", () => {
  it("never overlaps boxes", () => {
    const classes = Array.from({ length: 12 }, (_, i) => ({
      name: `VeryLongClassName${i}`,
      attributes: [{ name: "someAttributeName", typeName: "String" }],
    }));
    const boxes = [...layoutBoxes(classes).values()];
    expect(boxes).toHaveLength(12);
    for (let i = 0; i < boxes.length; i++) {
      for (let j = i + 1; j < boxes.length; j++) {
        const a = boxes[i];
        const b = boxes[j];
        const disjoint =
          a.x + a.width <= b.x ||
          b.x + b.width <= a.x ||
          a.y + a.height <= b.y ||
          b.y + b.height <= a.y;
        expect(disjoint, `${a.name} overlaps ${b.name}`).toBe(true);
      }
    }
  });
});
