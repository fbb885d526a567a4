import { describe, expect, it } from "vitest";

import { formatLabel, layerAssignments, layeredLayout, renderSvg } from "../src/graph.js";
import type { NetworkSnapshot } from "../src/types.js";

const snapshot: NetworkSnapshot = {
  nodes: [
    { "term-text": "a_h2", label: [["a_h2"]], "is-premise": false, probability: 0.33 },
    { "term-text": "(urn h2)", label: [["a_h2"]], "is-premise": false, probability: 0.33 },
    { "term-text": "((draw 1) white)", label: [["a_h2"]], "is-premise": true, probability: 1 },
    { "term-text": "a_2", label: [], "is-premise": false, probability: 0 },
  ],
  assumptions: [
    { "display-name": "a_h2", kind: "distribution-element", weight: 0.33, retracted: false },
    { "display-name": "a_2", kind: "structure", weight: null, retracted: true },
  ],
  "choose-sets": [],
  nogoods: [],
  justifications: [
    { antecedents: ["a_h2"], consequent: "(urn h2)" },
    { antecedents: ["(urn h2)"], consequent: "((draw 1) white)" },
  ],
};

describe("layout", () => {
  it("layers nodes by justification depth, assumptions on top", () => {
    const layers = layerAssignments(snapshot);
    expect(layers.get("a_h2")).toBe(0);
    expect(layers.get("(urn h2)")).toBe(1);
    expect(layers.get("((draw 1) white)")).toBe(2);
  });

  it("tolerates cyclic justifications", () => {
    const cyclic: NetworkSnapshot = {
      ...snapshot,
      justifications: [
        { antecedents: ["(urn h2)"], consequent: "((draw 1) white)" },
        { antecedents: ["((draw 1) white)"], consequent: "(urn h2)" },
      ],
    };
    const layers = layerAssignments(cyclic);
    expect(layers.size).toBe(4); // terminates with every node placed
  });

  it("produces one edge per antecedent", () => {
    const layout = layeredLayout(snapshot);
    expect(layout.edges).toEqual([
      { from: "a_h2", to: "(urn h2)" },
      { from: "(urn h2)", to: "((draw 1) white)" },
    ]);
  });
});

describe("rendering", () => {
  it("prints each node's label beneath it", () => {
    expect(formatLabel([["a_h2"], ["a_1", "a_x"]])).toBe("[{a_h2}, {a_1, a_x}]");
    const svg = renderSvg(snapshot);
    expect(svg).toContain("(urn h2)");
    expect(svg).toContain("[{a_h2}]");
  });

  it("strikes through retracted assumptions", () => {
    const svg = renderSvg(snapshot);
    const struck = svg.split("<g").filter((part) => part.includes("a_2"));
    expect(struck.some((part) => part.includes('text-decoration="line-through"'))).toBe(true);
  });

  it("renders an empty snapshot as an empty canvas", () => {
    const empty: NetworkSnapshot = {
      nodes: [], assumptions: [], "choose-sets": [], nogoods: [], justifications: [],
    };
    const svg = renderSvg(empty);
    expect(svg).toContain("<svg");
    expect(svg).not.toContain("<text");
  });
});
