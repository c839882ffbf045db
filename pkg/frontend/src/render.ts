import type { Point } from "./layout.js";
import { sparqlPaneText, type CanvasState } from "./state.js";
import type {
  Catalog,
  CatalogClass,
  Diagnostic,
  ExecuteResult,
  GraphShape,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderCatalog(catalog: Catalog | null): string {
  if (catalog === null) {
    return '<p class="hint">Upload an RDF/XML ontology to browse its classes.</p>';
  }
  const known = new Map(catalog.classes.map((c) => [c.iri, c]));
  const children = new Map<string, CatalogClass[]>();
  const roots: CatalogClass[] = [];
  for (const cls of catalog.classes) {
    const parents = cls.parents.filter((iri) => known.has(iri));
    if (parents.length === 0) {
      roots.push(cls);
    }
    for (const parent of parents) {
      const bucket = children.get(parent) ?? [];
      bucket.push(cls);
      children.set(parent, bucket);
    }
  }
  const tree = (cls: CatalogClass): string => {
    const below = children.get(cls.iri) ?? [];
    const item =
      `<li><button class="class-entry" data-action="pick-class" ` +
      `data-curie="${escapeHtml(cls.curie)}">${escapeHtml(cls.curie)}</button>` +
      ` <span class="label">${escapeHtml(cls.label)}</span>`;
    const nested = below.length > 0 ? `<ul>${below.map(tree).join("")}</ul>` : "";
    return `${item}${nested}</li>`;
  };
  const properties = catalog.properties
    .map(
      (p) =>
        `<li><button class="property-entry" data-action="pick-property" ` +
        `data-curie="${escapeHtml(p.curie)}">${escapeHtml(p.curie)}</button>` +
        ` <span class="label">[${p.kind}]</span></li>`,
    )
    .join("");
  return (
    `<h2>${escapeHtml(catalog.source)}</h2>` +
    `<h3>Classes</h3><ul class="class-tree">${roots.map(tree).join("")}</ul>` +
    `<h3>Properties</h3><ul class="property-list">${properties}</ul>`
  );
}

const NODE_WIDTH = 140;
const NODE_HEIGHT = 54;

export function renderCanvas(graph: GraphShape, positions: ReadonlyMap<number, Point>): string {
  const at = (id: number): Point => positions.get(id) ?? { x: 0, y: 0 };
  const center = (p: Point): Point => ({ x: p.x + NODE_WIDTH / 2, y: p.y + NODE_HEIGHT / 2 });
  const selected = new Set(graph.selected);

  const edges = graph.edges
    .map((edge, index) => {
      const a = center(at(edge.from));
      const b = center(at(edge.to));
      const mid = { x: (a.x + b.x) / 2, y: (a.y + b.y) / 2 };
      return (
        `<g class="edge" data-edge-index="${index}">` +
        `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" marker-end="url(#arrow)"></line>` +
        `<text x="${mid.x}" y="${mid.y - 6}">${escapeHtml(edge.predicate)}</text>` +
        `<text class="delete" data-action="remove-edge" data-index="${index}" ` +
        `x="${mid.x}" y="${mid.y + 14}">remove</text>` +
        `</g>`
      );
    })
    .join("");

  const nodes = graph.nodes
    .map((node) => {
      const p = at(node.id);
      const classes = ["node", node.kind, selected.has(node.payload) ? "selected" : ""]
        .filter(Boolean)
        .join(" ");
      return (
        `<g class="${classes}" data-node-id="${node.id}" transform="translate(${p.x},${p.y})">` +
        `<rect width="${NODE_WIDTH}" height="${NODE_HEIGHT}" rx="8"></rect>` +
        `<text class="payload" x="${NODE_WIDTH / 2}" y="24">${escapeHtml(node.payload)}</text>` +
        `<text class="kind" x="${NODE_WIDTH / 2}" y="42">${node.kind}</text>` +
        `<text class="delete" data-action="remove-node" data-id="${node.id}" x="${NODE_WIDTH - 10}" y="14">x</text>` +
        `</g>`
      );
    })
    .join("");

  return (
    `<svg class="canvas" width="100%" height="100%" viewBox="0 0 760 540">` +
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
    `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z"></path></marker></defs>` +
    `${edges}${nodes}</svg>`
  );
}

export function renderSparql(state: CanvasState): string {
  return `<pre class="sparql-text">${escapeHtml(sparqlPaneText(state))}</pre>`;
}

export function renderDiagnostics(diagnostics: Diagnostic[]): string {
  if (diagnostics.length === 0) {
    return "";
  }
  const items = diagnostics
    .map(
      (d) =>
        `<li class="${d.severity}"><code>${escapeHtml(d.code)}</code> ` +
        `${escapeHtml(d.message)}</li>`,
    )
    .join("");
  return `<ul class="diagnostics">${items}</ul>`;
}

export function renderResults(results: ExecuteResult | null): string {
  if (results === null) {
    return "";
  }
  const header = results.vars.map((v) => `<th>?${escapeHtml(v)}</th>`).join("");
  const rows = results.rows
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td class="${cell.kind}">${escapeHtml(cell.text)}</td>`).join("")}</tr>`,
    )
    .join("");
  const summary = `${results.rows.length} row${results.rows.length === 1 ? "" : "s"}`;
  return (
    `<p class="row-count">${summary}</p>` +
    `<table class="results"><thead><tr>${header}</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderTools(state: CanvasState): string {
  const nodeOptions = state.graph.nodes
    .map((n) => `<option value="${n.id}">${n.id}: ${escapeHtml(n.payload)}</option>`)
    .join("");
  const propertyOptions = (state.catalog?.properties ?? [])
    .map((p) => `<option value="${escapeHtml(p.curie)}">${escapeHtml(p.curie)}</option>`)
    .join("");
  const outputs = state.graph.nodes
    .filter((n) => n.kind === "variable")
    .map((n) => {
      const checked = state.graph.selected.includes(n.payload) ? " checked" : "";
      return (
        `<label><input type="checkbox" class="output-toggle" ` +
        `value="${escapeHtml(n.payload)}"${checked}> ${escapeHtml(n.payload)}</label>`
      );
    })
    .join("");

  return `
<form id="node-form" class="tool">
  <select name="kind">
    <option value="variable">variable</option>
    <option value="class">class</option>
    <option value="literal">literal</option>
  </select>
  <input name="payload" placeholder="?name, tp:Class, or literal" autocomplete="off">
  <button type="submit">Add node</button>
</form>
<form id="edge-form" class="tool">
  <select name="from">${nodeOptions}</select>
  <select name="predicate">${propertyOptions}</select>
  <select name="to">${nodeOptions}</select>
  <button type="submit">Connect</button>
</form>
<div class="tool outputs" id="outputs">Outputs: ${outputs || "<em>no variables yet</em>"}</div>
<form id="question-form" class="tool">
  <input name="question" placeholder="natural language question" autocomplete="off"
    value="${escapeHtml(state.graph.question)}">
  <button type="submit">Set question</button>
</form>
<div class="tool actions">
  <button data-action="execute">Execute</button>
  <button data-action="save">Save .oqb</button>
  <label class="file-button">Load .oqb<input type="file" id="load-document" hidden></label>
  <label class="file-button">Ontology<input type="file" id="load-ontology" hidden></label>
  <button data-action="clear">Clear</button>
</div>`;
}

export function renderToast(toast: string | null): string {
  if (toast === null) {
    return "";
  }
  return (
    `<div class="toast" role="alert">${escapeHtml(toast)} ` +
    `<button data-action="dismiss-toast">dismiss</button></div>`
  );
}
