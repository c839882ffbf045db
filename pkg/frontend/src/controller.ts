import { ApiClient, ApiFailure } from "./api.js";
import {
  applyCatalog,
  applyServerState,
  initialState,
  type CanvasState,
} from "./state.js";
import type { GraphState, NodeKind } from "./types.js";

type Listener = (state: CanvasState) => void;

/**
 * Owns the canvas state and issues service calls. Each editing gesture maps
 * to exactly one graph call; gestures are queued so at most one request is
 * in flight. A rejected call leaves the state untouched except for a toast.
 */
export class Controller {
  state: CanvasState = initialState();

  private queue: Promise<unknown> = Promise.resolve();
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  /** Create the session and seed the mirror from the server. */
  async start(): Promise<void> {
    const session = await this.api.createSession();
    this.state = { ...this.state, sessionId: session.id, nodeCap: session.node_cap };
    this.acknowledge(await this.api.graph(session.id));
  }

  async uploadOntology(name: string, owl: BodyInit): Promise<void> {
    const session = this.session();
    try {
      await this.api.uploadOntology(session, name, owl);
    } catch (failure) {
      this.showToast(describe(failure));
      return;
    }
    const catalog = await this.api.catalog(session);
    this.state = applyCatalog(this.state, catalog);
    this.acknowledge(await this.api.graph(session));
  }

  addNode(kind: NodeKind, payload: string): Promise<void> {
    return this.mutate((session) => this.api.addNode(session, kind, payload));
  }

  addEdge(from: number, to: number, predicate: string): Promise<void> {
    return this.mutate((session) => this.api.addEdge(session, from, to, predicate));
  }

  removeNode(nodeId: number): Promise<void> {
    return this.mutate((session) => this.api.removeNode(session, nodeId));
  }

  removeEdge(index: number): Promise<void> {
    return this.mutate((session) => this.api.removeEdge(session, index));
  }

  clearGraph(): Promise<void> {
    return this.mutate((session) => this.api.clear(session));
  }

  setSelected(selected: string[]): Promise<void> {
    return this.mutate((session) => this.api.setSelected(session, selected));
  }

  setQuestion(question: string): Promise<void> {
    return this.mutate((session) => this.api.setQuestion(session, question));
  }

  async execute(): Promise<void> {
    await this.enqueue(async () => {
      try {
        const results = await this.api.execute(this.session());
        this.state = { ...this.state, results, toast: null };
      } catch (failure) {
        if (failure instanceof ApiFailure && failure.diagnostics.length > 0) {
          this.state = { ...this.state, diagnostics: failure.diagnostics, results: null };
        }
        this.state = { ...this.state, toast: describe(failure) };
      }
      this.emit();
    });
  }

  saveDocument(): Promise<string> {
    return this.api.saveDocument(this.session());
  }

  async loadDocument(document: BodyInit): Promise<void> {
    await this.enqueue(async () => {
      try {
        const server = await this.api.loadDocument(this.session(), document);
        // positions are not part of the document: recompute placement
        this.state = { ...this.state, positions: new Map() };
        this.acknowledge(server);
      } catch (failure) {
        this.showToast(describe(failure));
      }
    });
  }

  /** Purely local: sprite positions never touch the service. */
  moveNode(nodeId: number, x: number, y: number): void {
    const positions = new Map(this.state.positions);
    positions.set(nodeId, { x, y });
    this.state = { ...this.state, positions };
    this.emit();
  }

  dismissToast(): void {
    this.state = { ...this.state, toast: null };
    this.emit();
  }

  private mutate(call: (session: string) => Promise<GraphState>): Promise<void> {
    return this.enqueue(async () => {
      try {
        this.acknowledge(await call(this.session()));
      } catch (failure) {
        this.showToast(describe(failure, this.state.nodeCap));
      }
    });
  }

  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const run = this.queue.then(work);
    this.queue = run.catch(() => undefined);
    return run;
  }

  private acknowledge(server: GraphState): void {
    this.state = { ...applyServerState(this.state, server), toast: null };
    this.emit();
  }

  private showToast(message: string): void {
    this.state = { ...this.state, toast: message };
    this.emit();
  }

  private session(): string {
    if (this.state.sessionId === null) {
      throw new Error("no session yet");
    }
    return this.state.sessionId;
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }
}

function describe(failure: unknown, nodeCap?: number): string {
  if (failure instanceof ApiFailure) {
    if (failure.code === "CAP_EXCEEDED" && nodeCap !== undefined) {
      return `node limit (${nodeCap}) reached`;
    }
    return failure.message;
  }
  return failure instanceof Error ? failure.message : String(failure);
}
