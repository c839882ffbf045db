import { reconcilePositions, type Point } from "./layout.js";
import type { Catalog, Diagnostic, ExecuteResult, GraphShape, GraphState } from "./types.js";

/** Shown in the SPARQL pane whenever the server withheld the text. */
export const INVALID_QUERY = "(invalid query)";

export interface CanvasState {
  sessionId: string | null;
  nodeCap: number;
  catalog: Catalog | null;
  graph: GraphShape;
  diagnostics: Diagnostic[];
  sparql: string | null;
  positions: Map<number, Point>;
  results: ExecuteResult | null;
  toast: string | null;
}

export function emptyGraph(nodeCap = 12): GraphShape {
  return { node_cap: nodeCap, question: "", nodes: [], edges: [], selected: [] };
}

export function initialState(): CanvasState {
  return {
    sessionId: null,
    nodeCap: 12,
    catalog: null,
    graph: emptyGraph(),
    diagnostics: [],
    sparql: null,
    positions: new Map(),
    results: null,
    toast: null,
  };
}

/**
 * Replace the local mirror with an acknowledged server state. The SPARQL
 * text is taken verbatim from the response and never synthesized locally;
 * results from a previous execution are stale after any graph change.
 */
export function applyServerState(state: CanvasState, server: GraphState): CanvasState {
  return {
    ...state,
    graph: server.graph,
    diagnostics: server.diagnostics,
    sparql: server.sparql ?? null,
    positions: reconcilePositions(server.graph.nodes, state.positions),
    results: null,
  };
}

export function applyCatalog(state: CanvasState, catalog: Catalog): CanvasState {
  return { ...state, catalog };
}

export function sparqlPaneText(state: CanvasState): string {
  return state.sparql ?? INVALID_QUERY;
}
