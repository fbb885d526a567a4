/**
 * Justification-graph layout and SVG rendering. Assumptions sit in the top
 * layer, derived propositions below, each annotated with its label printed
 * beneath the term. Pure string output so it is testable without a DOM.
 */

import type { NetworkSnapshot } from "./types.js";

export interface PlacedNode {
  term: string;
  layer: number;
  x: number;
  y: number;
  labelText: string;
  premise: boolean;
  retracted: boolean;
}

export interface PlacedEdge {
  from: string;
  to: string;
}

export interface Layout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  width: number;
  height: number;
}

const COLUMN_WIDTH = 190;
const ROW_HEIGHT = 92;
const MARGIN = 30;

export function formatLabel(label: string[][]): string {
  return "[" + label.map((env) => "{" + env.join(", ") + "}").join(", ") + "]";
}

/** Longest-path layering: nodes with no incoming justifications on top. */
export function layerAssignments(snapshot: NetworkSnapshot): Map<string, number> {
  const layers = new Map<string, number>();
  for (const node of snapshot.nodes) layers.set(node["term-text"], 0);
  // relax repeatedly; the cap keeps cyclic justifications from looping
  const passes = snapshot.nodes.length + 1;
  for (let i = 0; i < passes; i += 1) {
    let changed = false;
    for (const just of snapshot.justifications) {
      const below = Math.max(
        0,
        ...just.antecedents.map((a) => (layers.get(a) ?? 0) + 1),
      );
      const current = layers.get(just.consequent) ?? 0;
      if (below > current) {
        layers.set(just.consequent, below);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return layers;
}

export function layeredLayout(snapshot: NetworkSnapshot): Layout {
  const layers = layerAssignments(snapshot);
  const retracted = new Set(
    snapshot.assumptions.filter((a) => a.retracted).map((a) => a["display-name"]),
  );
  const byLayer = new Map<number, string[]>();
  for (const node of snapshot.nodes) {
    const layer = layers.get(node["term-text"]) ?? 0;
    const bucket = byLayer.get(layer) ?? [];
    bucket.push(node["term-text"]);
    byLayer.set(layer, bucket);
  }
  // grouping by term text keeps values of one variable adjacent
  for (const bucket of byLayer.values()) bucket.sort();

  const nodes: PlacedNode[] = [];
  const views = new Map(snapshot.nodes.map((n) => [n["term-text"], n]));
  let maxRow = 0;
  for (const [layer, terms] of byLayer) {
    maxRow = Math.max(maxRow, terms.length);
    terms.forEach((term, i) => {
      const view = views.get(term);
      if (view === undefined) return;
      nodes.push({
        term,
        layer,
        x: MARGIN + i * COLUMN_WIDTH,
        y: MARGIN + layer * ROW_HEIGHT,
        labelText: formatLabel(view.label),
        premise: view["is-premise"],
        retracted: retracted.has(term),
      });
    });
  }
  const edges: PlacedEdge[] = [];
  for (const just of snapshot.justifications) {
    for (const antecedent of just.antecedents) {
      edges.push({ from: antecedent, to: just.consequent });
    }
  }
  const depth = Math.max(0, ...[...byLayer.keys()]);
  return {
    nodes,
    edges,
    width: 2 * MARGIN + Math.max(1, maxRow) * COLUMN_WIDTH,
    height: 2 * MARGIN + (depth + 1) * ROW_HEIGHT,
  };
}

function escapeXml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderSvg(snapshot: NetworkSnapshot): string {
  const layout = layeredLayout(snapshot);
  const positions = new Map(layout.nodes.map((n) => [n.term, n]));
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" ` +
      `height="${layout.height}" viewBox="0 0 ${layout.width} ${layout.height}">`,
  );
  for (const edge of layout.edges) {
    const from = positions.get(edge.from);
    const to = positions.get(edge.to);
    if (from === undefined || to === undefined) continue;
    parts.push(
      `<line x1="${from.x}" y1="${from.y + 14}" x2="${to.x}" y2="${to.y - 14}" ` +
        `stroke="#8a8a8a" stroke-width="1"/>`,
    );
  }
  for (const node of layout.nodes) {
    const decoration = node.retracted ? ' text-decoration="line-through"' : "";
    const weight = node.premise ? ' font-weight="bold"' : "";
    parts.push(`<g class="node" data-term="${escapeXml(node.term)}">`);
    parts.push(
      `<text x="${node.x}" y="${node.y}" text-anchor="middle"` +
        `${decoration}${weight} font-size="13">${escapeXml(node.term)}</text>`,
    );
    parts.push(
      `<text x="${node.x}" y="${node.y + 16}" text-anchor="middle" ` +
        `font-size="11" fill="#555">${escapeXml(node.labelText)}</text>`,
    );
    parts.push("</g>");
  }
  parts.push("</svg>");
  return parts.join("");
}
