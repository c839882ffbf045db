import type { GraphNode, GraphShape, GraphState } from "../src/types.js";

export function shape(overrides: Partial<GraphShape> = {}): GraphShape {
  return { node_cap: 12, question: "", nodes: [], edges: [], selected: [], ...overrides };
}

export function node(id: number, kind: GraphNode["kind"], payload: string): GraphNode {
  return { id, kind, payload };
}

export function ack(overrides: Partial<GraphShape> = {}, sparql?: string): GraphState {
  const state: GraphState = { graph: shape(overrides), diagnostics: [] };
  if (sparql !== undefined) {
    state.sparql = sparql;
  }
  return state;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
