// UI state and pure transition functions. Rendering is a pure function
// of (snapshot, view state); nothing here talks to the network.

import type { Snapshot } from "./types.js";

export interface UiState {
  session: string | null;
  snapshot: Snapshot | null;
  selection: string; // node id, always present in the snapshot
  collapsed: ReadonlySet<string>;
  pending: boolean; // at most one expansion in flight
  notice: string | null;
  animationNode: string | null; // node whose minimum is being animated
  flash: ReadonlySet<string>; // freshly added nodes, highlighted once
}

export function initialState(): UiState {
  return {
    session: null,
    snapshot: null,
    selection: "n0",
    collapsed: new Set(),
    pending: false,
    notice: null,
    animationNode: null,
    flash: new Set(),
  };
}

function hasNode(snapshot: Snapshot | null, id: string): boolean {
  return !!snapshot && snapshot.nodes.some((n) => n.id === id);
}

/** Clamp the selection to an existing node (falls back to the root). */
function clampSelection(snapshot: Snapshot | null, wanted: string): string {
  if (hasNode(snapshot, wanted)) return wanted;
  return snapshot ? snapshot.root : "n0";
}

export function withSession(state: UiState, session: string, snapshot: Snapshot): UiState {
  return {
    ...initialState(),
    session,
    snapshot,
    selection: snapshot.root,
  };
}

export function withSnapshot(state: UiState, snapshot: Snapshot, newNodes: string[] = []): UiState {
  return {
    ...state,
    snapshot,
    selection: clampSelection(snapshot, state.selection),
    flash: new Set(newNodes),
  };
}

export function select(state: UiState, id: string): UiState {
  if (!hasNode(state.snapshot, id)) return state;
  return { ...state, selection: id, notice: null };
}

export function toggleCollapse(state: UiState, id: string): UiState {
  const collapsed = new Set(state.collapsed);
  if (collapsed.has(id)) collapsed.delete(id);
  else collapsed.add(id);
  return { ...state, collapsed };
}

export function beginExpand(state: UiState): UiState {
  return { ...state, pending: true, notice: null };
}

export function finishExpand(state: UiState, snapshot: Snapshot, newNodes: string[]): UiState {
  return { ...withSnapshot(state, snapshot, newNodes), pending: false };
}

export function failExpand(state: UiState, notice: string): UiState {
  return { ...state, pending: false, notice };
}

export function setNotice(state: UiState, notice: string | null): UiState {
  return { ...state, notice };
}

export function setAnimation(state: UiState, node: string | null): UiState {
  return { ...state, animationNode: node };
}

/** Ancestor chain of the selection, selection included (for lineage
 * highlighting in the tree panel). */
export function lineage(snapshot: Snapshot | null, selection: string): Set<string> {
  const out = new Set<string>();
  if (!snapshot) return out;
  const byId = new Map(snapshot.nodes.map((n) => [n.id, n]));
  let cur = byId.get(selection);
  while (cur) {
    out.add(cur.id);
    cur = cur.parent ? byId.get(cur.parent) : undefined;
  }
  return out;
}
