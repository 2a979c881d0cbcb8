import {
  forceCenter,
  forceLink,
  forceManyBody,
  forceSimulation,
  type SimulationLinkDatum,
  type SimulationNodeDatum,
} from "d3-force";
import type { GraphDoc } from "./types";

// Above this many elements (nodes + edges) a force layout turns to soup,
// so the view falls back to plain tables.
const LAYOUT_LIMIT = 500;
const TABLE_ROW_CAP = 1000;
const WIDTH = 640;
const HEIGHT = 420;

/** Which elements of the rendered graph the service reported as new or edited. */
export interface DiffMarks {
  addedNodes: Set<string>;
  changedNodes: Set<string>;
  addedEdges: Set<string>;
  changedEdges: Set<string>;
}

export function emptyMarks(): DiffMarks {
  return {
    addedNodes: new Set(),
    changedNodes: new Set(),
    addedEdges: new Set(),
    changedEdges: new Set(),
  };
}

function edgeKey(src: string, dst: string, directed: boolean): string {
  if (!directed && dst < src) {
    [src, dst] = [dst, src];
  }
  return `${src}\t${dst}`;
}

/**
 * Extract element marks from the service's diff item listing. Lines follow
 * "+ node <id>", "~ node <id> <detail>", "+ edge <src> -> <dst>" and the
 * like; anything unrecognized is skipped (the chips still show the counts).
 */
export function parseDiffMarks(items: string[], directed: boolean): DiffMarks {
  const marks = emptyMarks();
  for (const item of items) {
    const op = item[0];
    if (op !== "+" && op !== "~") {
      continue;
    }
    if (item.startsWith(`${op} node `)) {
      const rest = item.slice(7);
      const id = op === "+" ? rest : rest.split(" ")[0];
      (op === "+" ? marks.addedNodes : marks.changedNodes).add(id);
    } else if (item.startsWith(`${op} edge `)) {
      const rest = item.slice(7);
      const arrow = rest.indexOf(" -> ");
      if (arrow < 0) {
        continue;
      }
      const src = rest.slice(0, arrow);
      const dst = rest.slice(arrow + 4).split(" ")[0];
      const key = edgeKey(src, dst, directed);
      (op === "+" ? marks.addedEdges : marks.changedEdges).add(key);
    }
  }
  return marks;
}

interface LayoutNode extends SimulationNodeDatum {
  id: string;
}

/** Deterministic palette color for a node's "color" attribute value. */
function attrColor(value: string): string {
  let hash = 0;
  for (let i = 0; i < value.length; i++) {
    hash = (hash * 31 + value.charCodeAt(i)) >>> 0;
  }
  return `hsl(${hash % 360}, 65%, 52%)`;
}

function svgElement<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS("http://www.w3.org/2000/svg", tag);
}

function markClass(base: string, added: boolean, changed: boolean): string {
  if (added) {
    return `${base} mark-added`;
  }
  if (changed) {
    return `${base} mark-changed`;
  }
  return base;
}

function renderForceLayout(graph: GraphDoc, marks: DiffMarks): SVGSVGElement {
  const nodes: LayoutNode[] = Object.keys(graph.nodes).map((id) => ({ id }));
  const links: SimulationLinkDatum<LayoutNode>[] = graph.edges.map((e) => ({
    source: e.src,
    target: e.dst,
  }));

  const simulation = forceSimulation(nodes)
    .force("charge", forceManyBody().strength(-120))
    .force(
      "link",
      forceLink<LayoutNode, SimulationLinkDatum<LayoutNode>>(links)
        .id((d) => d.id)
        .distance(60),
    )
    .force("center", forceCenter(WIDTH / 2, HEIGHT / 2))
    .stop();
  simulation.tick(250);

  const byId = new Map(nodes.map((n) => [n.id, n]));
  const svg = svgElement("svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "graph-svg");

  for (const edge of graph.edges) {
    const a = byId.get(edge.src);
    const b = byId.get(edge.dst);
    if (a === undefined || b === undefined) {
      continue;
    }
    const key = edgeKey(edge.src, edge.dst, graph.directed);
    const line = svgElement("line");
    line.setAttribute("x1", String(a.x ?? 0));
    line.setAttribute("y1", String(a.y ?? 0));
    line.setAttribute("x2", String(b.x ?? 0));
    line.setAttribute("y2", String(b.y ?? 0));
    line.setAttribute(
      "class",
      markClass("graph-edge", marks.addedEdges.has(key), marks.changedEdges.has(key)),
    );
    const title = svgElement("title");
    title.textContent = `${edge.src} -> ${edge.dst} ${JSON.stringify(edge.attrs)}`;
    line.appendChild(title);
    svg.appendChild(line);
  }

  for (const node of nodes) {
    const attrs = graph.nodes[node.id];
    const group = svgElement("g");
    group.setAttribute("transform", `translate(${node.x ?? 0},${node.y ?? 0})`);
    group.setAttribute(
      "class",
      markClass("graph-node", marks.addedNodes.has(node.id), marks.changedNodes.has(node.id)),
    );
    group.setAttribute("data-node-id", node.id);

    const circle = svgElement("circle");
    circle.setAttribute("r", "7");
    const color = attrs["color"];
    if (typeof color === "string" && color !== "") {
      circle.setAttribute("fill", attrColor(color));
    }
    const title = svgElement("title");
    title.textContent = `${node.id} ${JSON.stringify(attrs)}`;
    circle.appendChild(title);
    group.appendChild(circle);

    const label = svgElement("text");
    label.setAttribute("dy", "-10");
    label.textContent = node.id;
    group.appendChild(label);

    svg.appendChild(group);
  }
  return svg;
}

function attrsCell(attrs: Record<string, unknown>): string {
  return JSON.stringify(attrs);
}

function renderTables(graph: GraphDoc, marks: DiffMarks): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "graph-tables";

  const nodeTable = document.createElement("table");
  nodeTable.className = "graph-node-table";
  nodeTable.innerHTML = "<thead><tr><th>node</th><th>attributes</th></tr></thead>";
  const nodeBody = document.createElement("tbody");
  const nodeIds = Object.keys(graph.nodes);
  for (const id of nodeIds.slice(0, TABLE_ROW_CAP)) {
    const row = document.createElement("tr");
    row.className = markClass("", marks.addedNodes.has(id), marks.changedNodes.has(id)).trim();
    const idCell = document.createElement("td");
    idCell.textContent = id;
    const attrCell = document.createElement("td");
    attrCell.textContent = attrsCell(graph.nodes[id]);
    row.append(idCell, attrCell);
    nodeBody.appendChild(row);
  }
  if (nodeIds.length > TABLE_ROW_CAP) {
    const row = document.createElement("tr");
    row.className = "more-row";
    const cell = document.createElement("td");
    cell.colSpan = 2;
    cell.textContent = `and ${nodeIds.length - TABLE_ROW_CAP} more nodes`;
    row.appendChild(cell);
    nodeBody.appendChild(row);
  }
  nodeTable.appendChild(nodeBody);

  const edgeTable = document.createElement("table");
  edgeTable.className = "graph-edge-table";
  edgeTable.innerHTML = "<thead><tr><th>src</th><th>dst</th><th>attributes</th></tr></thead>";
  const edgeBody = document.createElement("tbody");
  for (const edge of graph.edges.slice(0, TABLE_ROW_CAP)) {
    const key = edgeKey(edge.src, edge.dst, graph.directed);
    const row = document.createElement("tr");
    row.className = markClass("", marks.addedEdges.has(key), marks.changedEdges.has(key)).trim();
    const src = document.createElement("td");
    src.textContent = edge.src;
    const dst = document.createElement("td");
    dst.textContent = edge.dst;
    const attrCell = document.createElement("td");
    attrCell.textContent = attrsCell(edge.attrs);
    row.append(src, dst, attrCell);
    edgeBody.appendChild(row);
  }
  if (graph.edges.length > TABLE_ROW_CAP) {
    const row = document.createElement("tr");
    row.className = "more-row";
    const cell = document.createElement("td");
    cell.colSpan = 3;
    cell.textContent = `and ${graph.edges.length - TABLE_ROW_CAP} more edges`;
    row.appendChild(cell);
    edgeBody.appendChild(row);
  }
  edgeTable.appendChild(edgeBody);

  wrap.append(nodeTable, edgeTable);
  return wrap;
}

/** Renders a graph document as a force layout, or tables when it is large. */
export class GraphView {
  constructor(private readonly container: HTMLElement) {}

  render(graph: GraphDoc, marks: DiffMarks = emptyMarks()): void {
    this.container.textContent = "";
    const elementCount = Object.keys(graph.nodes).length + graph.edges.length;
    if (elementCount > LAYOUT_LIMIT) {
      this.container.appendChild(renderTables(graph, marks));
    } else {
      this.container.appendChild(renderForceLayout(graph, marks));
    }
  }
}
