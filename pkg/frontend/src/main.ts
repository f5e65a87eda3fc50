// Page wiring: DOM, canvas, animation timer and the polling loop.

import { ApiClient } from "./api.js";
import { actionExpand, Store } from "./actions.js";
import { paint, workspaceDisplayList } from "./canvas.js";
import * as state from "./state.js";
import { renderTreePanel, treeRows } from "./treeview.js";
import type { Budget, MinimumDoc, SceneDoc } from "./types.js";

const api = new ApiClient();

const el = {
  tree: document.getElementById("tree") as HTMLElement,
  canvas: document.getElementById("workspace") as HTMLCanvasElement,
  notice: document.getElementById("notice") as HTMLElement,
  breadcrumb: document.getElementById("breadcrumb") as HTMLElement,
  expand: document.getElementById("expand") as HTMLButtonElement,
  budgetValue: document.getElementById("budget-value") as HTMLInputElement,
  budgetKind: document.getElementById("budget-kind") as HTMLSelectElement,
  scene: document.getElementById("scene") as HTMLSelectElement,
  bundle: document.getElementById("bundle") as HTMLInputElement,
  newSession: document.getElementById("new-session") as HTMLButtonElement,
  time: document.getElementById("time") as HTMLInputElement,
  play: document.getElementById("play") as HTMLButtonElement,
};

let sceneDoc: SceneDoc | null = null;
let minimumDoc: MinimumDoc | null = null;
let playing = false;

const store: Store = {
  state: state.initialState(),
  set(next) {
    (this as { state: typeof next }).state = next;
    render();
  },
};

function currentBudget(): Budget {
  const value = Number(el.budgetValue.value) || 1;
  return el.budgetKind.value === "seconds" ? { seconds: value } : { samples: Math.round(value) };
}

async function refreshMinimum(): Promise<void> {
  const s = store.state;
  minimumDoc = null;
  if (!s.session || !s.snapshot) return;
  const node = s.snapshot.nodes.find((n) => n.id === s.selection);
  if (!node || node.path === null) return;
  try {
    minimumDoc = await api.minimum(s.session, s.selection);
  } catch {
    minimumDoc = null;
  }
  drawFrame();
}

function drawFrame(): void {
  if (!sceneDoc) return;
  const ctx = el.canvas.getContext("2d");
  if (!ctx) return;
  const t = Number(el.time.value) / 1000;
  const items = workspaceDisplayList(sceneDoc, minimumDoc, t);
  paint(ctx, sceneDoc, items, el.canvas.width, el.canvas.height);
}

function render(): void {
  const s = store.state;
  renderTreePanel(el.tree, treeRows(s.snapshot, s.selection, s.collapsed, s.flash), {
    onSelect: (id) => {
      store.set(state.select(store.state, id));
      void refreshMinimum();
    },
    onToggle: (id) => store.set(state.toggleCollapse(store.state, id)),
  });
  el.notice.textContent = s.notice ?? "";
  el.notice.style.display = s.notice ? "block" : "none";
  el.expand.disabled = s.pending || !s.session;
  el.expand.textContent = s.pending ? "expanding…" : "expand selected";
  const chain: string[] = [];
  if (s.snapshot) {
    const byId = new Map(s.snapshot.nodes.map((n) => [n.id, n]));
    let cur = byId.get(s.selection);
    while (cur) {
      chain.unshift(cur.parent === null ? "root" : `${cur.id} (L${cur.level})`);
      cur = cur.parent ? byId.get(cur.parent) : undefined;
    }
  }
  el.breadcrumb.textContent = chain.join(" / ");
  drawFrame();
}

async function newSession(): Promise<void> {
  const sceneName = el.scene.value;
  const bundleName = el.bundle.value || sceneName;
  try {
    const created = await api.createSession(sceneName, bundleName, 7);
    store.set(state.withSession(store.state, created.session, created.snapshot));
    sceneDoc = await api.scene(created.session);
    minimumDoc = null;
    render();
  } catch (err) {
    store.set(state.setNotice(store.state, String(err)));
  }
}

el.newSession.addEventListener("click", () => void newSession());
el.expand.addEventListener("click", () =>
  void actionExpand(api, store, currentBudget()).then(() => refreshMinimum()),
);
el.time.addEventListener("input", drawFrame);
el.play.addEventListener("click", () => {
  playing = !playing;
  el.play.textContent = playing ? "pause" : "play";
});

setInterval(() => {
  if (!playing) return;
  const t = (Number(el.time.value) + 5) % 1001;
  el.time.value = String(t);
  drawFrame();
}, 40);

el.scene.addEventListener("change", () => {
  el.bundle.value = el.scene.value;
});

void newSession();
