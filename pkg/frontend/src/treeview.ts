// Minima tree rendered as an indented collapsible list (the filesystem
// metaphor). Row computation is pure; the DOM adapter lives at the
// bottom and is deliberately thin.

import { lineage } from "./state.js";
import type { Snapshot, TreeNodeDoc } from "./types.js";

export interface TreeRow {
  id: string;
  depth: number;
  label: string;
  selected: boolean;
  onLineage: boolean;
  collapsed: boolean;
  hasChildren: boolean;
  expandedStatus: boolean;
  flash: boolean;
}

export function nodeLabel(node: TreeNodeDoc): string {
  if (node.parent === null) return "root";
  const cost = node.cost === null ? "?" : node.cost.toFixed(3);
  return `L${node.level} · cost ${cost}`;
}

/** Depth-first rows of the visible tree: children of collapsed nodes
 * are skipped; child order is the snapshot's stored (cost-sorted)
 * order. Safe on a root-only snapshot. */
export function treeRows(
  snapshot: Snapshot | null,
  selection: string,
  collapsed: ReadonlySet<string>,
  flash: ReadonlySet<string> = new Set(),
): TreeRow[] {
  if (!snapshot) return [];
  const byId = new Map(snapshot.nodes.map((n) => [n.id, n]));
  const onLineage = lineage(snapshot, selection);
  const rows: TreeRow[] = [];
  const walk = (id: string, depth: number) => {
    const node = byId.get(id);
    if (!node) return;
    rows.push({
      id,
      depth,
      label: nodeLabel(node),
      selected: id === selection,
      onLineage: onLineage.has(id),
      collapsed: collapsed.has(id),
      hasChildren: node.children.length > 0,
      expandedStatus: node.status === "expanded",
      flash: flash.has(id),
    });
    if (!collapsed.has(id)) {
      for (const child of node.children) walk(child, depth + 1);
    }
  };
  walk(snapshot.root, 0);
  return rows;
}

export interface TreeHandlers {
  onSelect: (id: string) => void;
  onToggle: (id: string) => void;
}

export function renderTreePanel(container: HTMLElement, rows: TreeRow[], handlers: TreeHandlers): void {
  container.textContent = "";
  for (const row of rows) {
    const el = document.createElement("div");
    el.className = "tree-row";
    el.style.paddingLeft = `${row.depth * 16 + 6}px`;
    if (row.selected) el.classList.add("selected");
    else if (row.onLineage) el.classList.add("lineage");
    if (row.flash) el.classList.add("flash");
    const marker = row.hasChildren ? (row.collapsed ? "▸ " : "▾ ") : "• ";
    const badge = row.expandedStatus ? "" : " ✱";
    el.textContent = marker + row.label + badge;
    el.dataset.nodeId = row.id;
    el.addEventListener("click", () => handlers.onSelect(row.id));
    el.addEventListener("dblclick", () => handlers.onToggle(row.id));
    container.appendChild(el);
  }
}
