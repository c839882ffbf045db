import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import {
  renderCanvas,
  renderCatalog,
  renderDiagnostics,
  renderResults,
  renderSparql,
  renderToast,
  renderTools,
} from "./render.js";
import type { CanvasState } from "./state.js";
import type { NodeKind } from "./types.js";

const controller = new Controller(new ApiClient(""));

const panel = (id: string): HTMLElement => {
  const element = document.getElementById(id);
  if (element === null) {
    throw new Error(`missing panel #${id}`);
  }
  return element;
};

function render(state: CanvasState): void {
  panel("catalog").innerHTML = renderCatalog(state.catalog);
  panel("canvas").innerHTML = renderCanvas(state.graph, state.positions);
  panel("sparql").innerHTML = renderSparql(state);
  panel("diagnostics").innerHTML = renderDiagnostics(state.diagnostics);
  panel("results").innerHTML = renderResults(state.results);
  panel("tools").innerHTML = renderTools(state);
  panel("toast-area").innerHTML = renderToast(state.toast);
}

controller.onChange(render);

document.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  event.preventDefault();
  const data = new FormData(form);
  const text = (key: string): string => String(data.get(key) ?? "");
  if (form.id === "node-form") {
    void controller.addNode(text("kind") as NodeKind, text("payload"));
  } else if (form.id === "edge-form") {
    void controller.addEdge(Number(text("from")), Number(text("to")), text("predicate"));
  } else if (form.id === "question-form") {
    void controller.setQuestion(text("question"));
  }
});

document.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (target === null) {
    return;
  }
  const action = target.dataset.action;
  if (action === "execute") {
    void controller.execute();
  } else if (action === "clear") {
    void controller.clearGraph();
  } else if (action === "save") {
    void downloadDocument();
  } else if (action === "remove-node") {
    void controller.removeNode(Number(target.dataset.id));
  } else if (action === "remove-edge") {
    void controller.removeEdge(Number(target.dataset.index));
  } else if (action === "dismiss-toast") {
    controller.dismissToast();
  } else if (action === "pick-class") {
    prefillNodeForm("class", target.dataset.curie ?? "");
  } else if (action === "pick-property") {
    prefillEdgeForm(target.dataset.curie ?? "");
  }
});

document.addEventListener("change", (event) => {
  const input = event.target as HTMLInputElement;
  if (input.id === "load-ontology" || input.id === "load-document") {
    const file = input.files?.[0];
    if (file === undefined) {
      return;
    }
    void file.arrayBuffer().then((bytes) => {
      if (input.id === "load-ontology") {
        return controller.uploadOntology(file.name, bytes);
      }
      return controller.loadDocument(bytes);
    });
    input.value = "";
  } else if (input.classList.contains("output-toggle")) {
    const checked = Array.from(
      document.querySelectorAll<HTMLInputElement>(".output-toggle:checked"),
      (box) => box.value,
    );
    void controller.setSelected(checked);
  }
});

function prefillNodeForm(kind: NodeKind, payload: string): void {
  const form = document.getElementById("node-form") as HTMLFormElement | null;
  if (form === null) {
    return;
  }
  (form.elements.namedItem("kind") as HTMLSelectElement).value = kind;
  (form.elements.namedItem("payload") as HTMLInputElement).value = payload;
}

function prefillEdgeForm(predicate: string): void {
  const form = document.getElementById("edge-form") as HTMLFormElement | null;
  if (form === null) {
    return;
  }
  (form.elements.namedItem("predicate") as HTMLSelectElement).value = predicate;
}

async function downloadDocument(): Promise<void> {
  const text = await controller.saveDocument();
  const blob = new Blob([text], { type: "text/plain" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = "query.oqb";
  link.click();
  URL.revokeObjectURL(url);
}

// sprite dragging is UI-local; positions never reach the service
let drag: { id: number; offsetX: number; offsetY: number } | null = null;

document.addEventListener("pointerdown", (event) => {
  const sprite = (event.target as HTMLElement).closest<SVGGElement>("g.node");
  if (sprite === null || (event.target as HTMLElement).dataset.action === "remove-node") {
    return;
  }
  const id = Number(sprite.dataset.nodeId);
  const point = canvasPoint(event);
  const current = controller.state.positions.get(id) ?? { x: 0, y: 0 };
  drag = { id, offsetX: point.x - current.x, offsetY: point.y - current.y };
});

document.addEventListener("pointermove", (event) => {
  if (drag === null) {
    return;
  }
  const point = canvasPoint(event);
  controller.moveNode(drag.id, point.x - drag.offsetX, point.y - drag.offsetY);
});

document.addEventListener("pointerup", () => {
  drag = null;
});

function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const svg = document.querySelector<SVGSVGElement>("svg.canvas");
  if (svg === null) {
    return { x: event.clientX, y: event.clientY };
  }
  const box = svg.getBoundingClientRect();
  return {
    x: ((event.clientX - box.left) / box.width) * 760,
    y: ((event.clientY - box.top) / box.height) * 540,
  };
}

void controller
  .start()
  .then(() => render(controller.state))
  .catch((failure: unknown) => {
    panel("toast-area").innerHTML = renderToast(
      `service unreachable: ${failure instanceof Error ? failure.message : String(failure)}`,
    );
  });
