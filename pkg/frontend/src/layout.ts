import type { GraphNode } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

const COLUMNS = 4;
const CELL_WIDTH = 170;
const CELL_HEIGHT = 110;
const MARGIN = 40;

/**
 * Deterministic placement for a node that was never dragged. Node ids are
 * monotonic within a session, so id-derived grid slots never collide.
 */
export function defaultPosition(id: number): Point {
  const slot = id - 1;
  return {
    x: MARGIN + (slot % COLUMNS) * CELL_WIDTH,
    y: MARGIN + Math.floor(slot / COLUMNS) * CELL_HEIGHT,
  };
}

/**
 * Carry dragged positions across a state update: removed nodes are dropped,
 * new nodes get their deterministic slot, everything else stays put.
 */
export function reconcilePositions(
  nodes: GraphNode[],
  previous: ReadonlyMap<number, Point>,
): Map<number, Point> {
  const next = new Map<number, Point>();
  for (const node of nodes) {
    next.set(node.id, previous.get(node.id) ?? defaultPosition(node.id));
  }
  return next;
}
