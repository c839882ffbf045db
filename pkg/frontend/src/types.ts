/** Wire types mirroring the service API; field names are normative. */

export type NodeKind = "variable" | "class" | "literal";

export interface GraphNode {
  id: number;
  kind: NodeKind;
  payload: string;
}

export interface GraphEdge {
  from: number;
  to: number;
  predicate: string;
}

export interface GraphShape {
  node_cap: number;
  question: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
  selected: string[];
}

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  message: string;
  subject: number | null;
  subject_kind: "node" | "edge" | null;
}

/** Graph state response; `sparql` is present only when the graph is valid. */
export interface GraphState {
  graph: GraphShape;
  diagnostics: Diagnostic[];
  sparql?: string;
}

export interface CatalogClass {
  iri: string;
  curie: string;
  label: string;
  parents: string[];
}

export interface CatalogProperty {
  iri: string;
  curie: string;
  kind: "object" | "datatype";
  domains: string[];
  ranges: string[];
}

export interface Catalog {
  source: string;
  namespaces: Record<string, string>;
  classes: CatalogClass[];
  properties: CatalogProperty[];
}

export interface UploadSummary {
  source: string;
  classes: number;
  properties: number;
  diagnostics: Diagnostic[];
}

export interface ResultCell {
  kind: "iri" | "literal";
  value: string;
  text: string;
}

export interface ExecuteResult {
  sparql: string;
  vars: string[];
  rows: ResultCell[][];
}
