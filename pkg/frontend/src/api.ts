import type {
  Catalog,
  ExecuteResult,
  Diagnostic,
  GraphState,
  NodeKind,
  UploadSummary,
} from "./types.js";

/** A rejected request, decoded from the service's error envelope. */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly diagnostics: Diagnostic[] = [],
  ) {
    super(message);
    this.name = "ApiFailure";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  health(): Promise<{ status: string; triples: number }> {
    return this.json("GET", "/api/health");
  }

  createSession(): Promise<{ id: string; node_cap: number }> {
    return this.json("POST", "/api/sessions");
  }

  uploadOntology(session: string, name: string, owl: BodyInit): Promise<UploadSummary> {
    const path = `/api/sessions/${session}/ontology?name=${encodeURIComponent(name)}`;
    return this.json("POST", path, owl, "application/rdf+xml");
  }

  catalog(session: string): Promise<Catalog> {
    return this.json("GET", `/api/sessions/${session}/catalog`);
  }

  graph(session: string): Promise<GraphState> {
    return this.json("GET", `/api/sessions/${session}/graph`);
  }

  addNode(session: string, kind: NodeKind, payload: string): Promise<GraphState & { id: number }> {
    const body = JSON.stringify({ kind, payload });
    return this.json("POST", `/api/sessions/${session}/graph/nodes`, body, "application/json");
  }

  addEdge(
    session: string,
    from: number,
    to: number,
    predicate: string,
  ): Promise<GraphState & { index: number }> {
    const body = JSON.stringify({ from, to, predicate });
    return this.json("POST", `/api/sessions/${session}/graph/edges`, body, "application/json");
  }

  removeNode(session: string, nodeId: number): Promise<GraphState> {
    return this.json("DELETE", `/api/sessions/${session}/graph/nodes/${nodeId}`);
  }

  removeEdge(session: string, index: number): Promise<GraphState> {
    return this.json("DELETE", `/api/sessions/${session}/graph/edges/${index}`);
  }

  clear(session: string): Promise<GraphState> {
    return this.json("POST", `/api/sessions/${session}/graph/clear`);
  }

  setSelected(session: string, selected: string[]): Promise<GraphState> {
    const body = JSON.stringify({ selected });
    return this.json("PUT", `/api/sessions/${session}/graph/selected`, body, "application/json");
  }

  setQuestion(session: string, question: string): Promise<GraphState> {
    const body = JSON.stringify({ question });
    return this.json("PUT", `/api/sessions/${session}/graph/question`, body, "application/json");
  }

  execute(session: string): Promise<ExecuteResult> {
    return this.json("POST", `/api/sessions/${session}/execute`);
  }

  async saveDocument(session: string): Promise<string> {
    const response = await this.send("GET", `/api/sessions/${session}/document`);
    return response.text();
  }

  loadDocument(session: string, document: BodyInit): Promise<GraphState> {
    return this.json("PUT", `/api/sessions/${session}/document`, document, "text/plain");
  }

  private async json<T>(method: string, path: string, body?: BodyInit, type?: string): Promise<T> {
    const response = await this.send(method, path, body, type);
    return (await response.json()) as T;
  }

  private async send(method: string, path: string, body?: BodyInit, type?: string): Promise<Response> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = body;
      init.headers = { "Content-Type": type ?? "application/json" };
    }
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      throw await decodeFailure(response);
    }
    return response;
  }
}

async function decodeFailure(response: Response): Promise<ApiFailure> {
  try {
    const body = (await response.json()) as {
      error?: { code?: string; message?: string; diagnostics?: Diagnostic[] };
    };
    const error = body.error ?? {};
    return new ApiFailure(
      response.status,
      error.code ?? "HTTP_ERROR",
      error.message ?? `request failed with status ${response.status}`,
      error.diagnostics ?? [],
    );
  } catch {
    return new ApiFailure(response.status, "HTTP_ERROR", `request failed with status ${response.status}`);
  }
}
