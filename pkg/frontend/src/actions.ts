// Expansion flow: the only place the UI mutates planning state, always
// through the expand endpoint. Works against any ApiClient, so tests
// drive it with a fake fetch.

import { ApiClient, ApiError } from "./api.js";
import { beginExpand, failExpand, finishExpand, setNotice, UiState } from "./state.js";
import type { Budget, Snapshot } from "./types.js";
import { pollUntilIdle } from "./poll.js";

export interface Store {
  readonly state: UiState;
  set(next: UiState): void;
}

function newNodeIds(before: Snapshot | null, after: Snapshot): string[] {
  const old = new Set((before?.nodes ?? []).map((n) => n.id));
  return after.nodes.filter((n) => !old.has(n.id)).map((n) => n.id);
}

export async function actionExpand(
  api: ApiClient,
  store: Store,
  budget: Budget,
  pollInterval = 250,
): Promise<void> {
  const state = store.state;
  if (!state.session || !state.snapshot) return;
  if (state.pending) {
    // blocked client-side: one expansion at a time
    store.set(setNotice(state, "an expansion is already running"));
    return;
  }
  const nodeId = state.selection;
  const before = state.snapshot;
  store.set(beginExpand(state));
  try {
    const result = await api.expand(state.session, nodeId, budget);
    if (result.kind === "done") {
      store.set(finishExpand(store.state, result.snapshot, result.report.new_nodes));
      if (result.report.new_nodes.length === 0) {
        store.set(setNotice(store.state, result.report.no_path ? "no path found yet; grow more" : "no new minima"));
      }
      return;
    }
    await pollUntilIdle(api, state.session, pollInterval);
    const snapshot = await api.tree(state.session);
    store.set(finishExpand(store.state, snapshot, newNodeIds(before, snapshot)));
  } catch (err) {
    if (err instanceof ApiError) {
      if (err.status === 409) {
        store.set(failExpand(store.state, "busy: an expansion is already in flight"));
      } else if (err.code === "level_exhausted") {
        store.set(failExpand(store.state, "level exhausted: this node is at the top level"));
      } else {
        store.set(failExpand(store.state, err.message));
      }
    } else {
      store.set(failExpand(store.state, String(err)));
    }
  }
}
