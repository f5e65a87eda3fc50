// Canned documents mirroring a crossing-disks session, used by the
// unit tests in place of a live server.

import type { MinimumDoc, SceneDoc, Snapshot, TreeNodeDoc } from "../src/types.js";

function node(partial: Partial<TreeNodeDoc> & { id: string; level: number }): TreeNodeDoc {
  return {
    parent: null,
    children: [],
    status: "fresh",
    cost: null,
    created_iteration: 0,
    path: null,
    ...partial,
  };
}

export function rootOnlySnapshot(): Snapshot {
  return {
    format: "minima-tree/1",
    root: "n0",
    nodes: [node({ id: "n0", level: 0 })],
  };
}

export function afterRootExpand(): Snapshot {
  return {
    format: "minima-tree/1",
    root: "n0",
    nodes: [
      node({ id: "n0", level: 0, children: ["n1"], status: "expanded" }),
      node({ id: "n1", level: 1, parent: "n0", cost: 1.0, path: [[0], [1]] }),
    ],
  };
}

export function finalSnapshot(): Snapshot {
  return {
    format: "minima-tree/1",
    root: "n0",
    nodes: [
      node({ id: "n0", level: 0, children: ["n1"], status: "expanded" }),
      node({
        id: "n1", level: 1, parent: "n0", cost: 1.0, path: [[0], [1]],
        children: ["n2", "n3"], status: "expanded",
      }),
      node({ id: "n2", level: 2, parent: "n1", cost: 1.556, path: [[0, 0], [0.1, 0.9], [1, 1]] }),
      node({ id: "n3", level: 2, parent: "n1", cost: 1.557, path: [[0, 0], [0.9, 0.1], [1, 1]] }),
    ],
  };
}

export function sceneDoc(): SceneDoc {
  return {
    name: "crossing_disks",
    levels: 2,
    workspace: { bounds: [0, 0, 1, 1], obstacles: [] },
    render_robots: [
      {
        name: "disk1",
        shape: { type: "disk", radius: 0.11 },
        start: [0.15, 0.5, 0],
        goal: [0.85, 0.5, 0],
        track: { from: [0.15, 0.5], to: [0.85, 0.5] },
      },
      {
        name: "disk2",
        shape: { type: "disk", radius: 0.11 },
        start: [0.5, 0.15, 0],
        goal: [0.5, 0.85, 0],
        track: { from: [0.5, 0.15], to: [0.5, 0.85] },
      },
    ],
  };
}

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** disk1 clears the crossing first (phase 0) or second (phase 1). */
export function minimumDoc(nodeId: string, disk1First: boolean, steps = 50): MinimumDoc {
  const d1: number[][] = [];
  const d2: number[][] = [];
  for (let i = 0; i < steps; i++) {
    const t = i / (steps - 1);
    const first = Math.min(1, 2 * t);
    const second = Math.max(0, 2 * t - 1);
    const t1 = disk1First ? first : second;
    const t2 = disk1First ? second : first;
    d1.push([lerp(0.15, 0.85, t1), 0.5, 0]);
    d2.push([0.5, lerp(0.15, 0.85, t2), 0]);
  }
  return { node: nodeId, level: 2, cost: 1.556, steps, robots: { disk1: d1, disk2: d2 } };
}
