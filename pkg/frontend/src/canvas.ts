// Workspace rendering: a pure display-list builder plus a small canvas
// painter. Keeping the geometry pure makes the animation testable
// without a browser.

import type { MinimumDoc, SceneDoc } from "./types.js";

export type Item =
  | { kind: "rect"; x0: number; y0: number; x1: number; y1: number; fill: string }
  | { kind: "circle"; x: number; y: number; r: number; fill: string; stroke?: string }
  | { kind: "poly"; points: number[][]; fill: string; stroke?: string }
  | { kind: "line"; points: number[][]; stroke: string; width: number; dashed?: boolean };

export const COLORS = {
  background: "#ffffff",
  obstacle: "#9a9a9a",
  track: "#d0d0d0",
  start: "#2e9e44",
  goal: "#c63b3b",
  robot: "#f5f5f5",
  robotEdge: "#333333",
  trace: "#4a6fb3",
};

/** Pose of one robot at animation time t in [0, 1]. */
export function poseAt(minimum: MinimumDoc, robot: string, t: number): number[] {
  const poses = minimum.robots[robot];
  const clamped = Math.min(1, Math.max(0, t));
  const idx = Math.round(clamped * (poses.length - 1));
  return poses[idx];
}

function robotShapeItems(scene: SceneDoc, name: string, pose: number[], fill: string, stroke?: string): Item[] {
  const spec = scene.render_robots.find((r) => r.name === name);
  if (!spec) return [];
  const [x, y, theta] = pose;
  if (spec.shape.type === "disk") {
    return [{ kind: "circle", x, y, r: spec.shape.radius, fill, stroke }];
  }
  const c = Math.cos(theta);
  const s = Math.sin(theta);
  const points = spec.shape.points.map(([px, py]) => [x + c * px - s * py, y + s * px + c * py]);
  return [{ kind: "poly", points, fill, stroke }];
}

/** Everything to draw for one frame: obstacles, rails, start (green) and
 * goal (red) poses, per-robot traces of the selected minimum, and the
 * robots at the animated poses (neutral fill). */
export function workspaceDisplayList(scene: SceneDoc, minimum: MinimumDoc | null, t: number): Item[] {
  const items: Item[] = [];
  const [x0, y0, x1, y1] = scene.workspace.bounds;
  items.push({ kind: "rect", x0, y0, x1, y1, fill: COLORS.background });
  for (const ob of scene.workspace.obstacles) {
    if (ob.type === "disk") {
      items.push({ kind: "circle", x: ob.center![0], y: ob.center![1], r: ob.radius!, fill: COLORS.obstacle });
    } else {
      items.push({ kind: "poly", points: ob.points!, fill: COLORS.obstacle });
    }
  }
  for (const robot of scene.render_robots) {
    if (robot.track) {
      items.push({ kind: "line", points: [robot.track.from, robot.track.to], stroke: COLORS.track, width: 0.01, dashed: true });
    }
  }
  for (const robot of scene.render_robots) {
    items.push(...robotShapeItems(scene, robot.name, robot.start, "none", COLORS.start));
    items.push(...robotShapeItems(scene, robot.name, robot.goal, "none", COLORS.goal));
  }
  if (minimum) {
    for (const [name, poses] of Object.entries(minimum.robots)) {
      items.push({ kind: "line", points: poses.map((p) => [p[0], p[1]]), stroke: COLORS.trace, width: 0.006 });
      items.push(...robotShapeItems(scene, name, poseAt(minimum, name, t), COLORS.robot, COLORS.robotEdge));
    }
  }
  return items;
}

export function paint(ctx: CanvasRenderingContext2D, scene: SceneDoc, items: Item[], width: number, height: number): void {
  const [x0, y0, x1, y1] = scene.workspace.bounds;
  const scale = Math.min(width / (x1 - x0), height / (y1 - y0));
  const tx = (x: number) => (x - x0) * scale;
  const ty = (y: number) => height - (y - y0) * scale; // y up

  ctx.clearRect(0, 0, width, height);
  for (const item of items) {
    switch (item.kind) {
      case "rect":
        ctx.fillStyle = item.fill;
        ctx.fillRect(tx(item.x0), ty(item.y1), (item.x1 - item.x0) * scale, (item.y1 - item.y0) * scale);
        break;
      case "circle":
        ctx.beginPath();
        ctx.arc(tx(item.x), ty(item.y), item.r * scale, 0, 2 * Math.PI);
        if (item.fill !== "none") {
          ctx.fillStyle = item.fill;
          ctx.fill();
        }
        if (item.stroke) {
          ctx.strokeStyle = item.stroke;
          ctx.lineWidth = 2;
          ctx.stroke();
        }
        break;
      case "poly":
        ctx.beginPath();
        item.points.forEach(([px, py], i) => (i ? ctx.lineTo(tx(px), ty(py)) : ctx.moveTo(tx(px), ty(py))));
        ctx.closePath();
        if (item.fill !== "none") {
          ctx.fillStyle = item.fill;
          ctx.fill();
        }
        if (item.stroke) {
          ctx.strokeStyle = item.stroke;
          ctx.lineWidth = 2;
          ctx.stroke();
        }
        break;
      case "line":
        ctx.beginPath();
        ctx.setLineDash(item.dashed ? [6, 4] : []);
        item.points.forEach(([px, py], i) => (i ? ctx.lineTo(tx(px), ty(py)) : ctx.moveTo(tx(px), ty(py))));
        ctx.strokeStyle = item.stroke;
        ctx.lineWidth = Math.max(1, item.width * scale);
        ctx.stroke();
        ctx.setLineDash([]);
        break;
    }
  }
}
