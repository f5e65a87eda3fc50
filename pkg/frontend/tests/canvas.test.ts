import { describe, expect, it } from "vitest";

import { COLORS, poseAt, workspaceDisplayList } from "../src/canvas.js";
import { minimumDoc, sceneDoc } from "./fixtures.js";

describe("workspace display list", () => {
  it("places robots exactly at start poses at t=0", () => {
    const minimum = minimumDoc("n2", true);
    expect(poseAt(minimum, "disk1", 0)).toEqual([0.15, 0.5, 0]);
    expect(poseAt(minimum, "disk2", 0)).toEqual([0.5, 0.15, 0]);
  });

  it("places robots exactly at goal poses at t=1", () => {
    const minimum = minimumDoc("n2", true);
    expect(poseAt(minimum, "disk1", 1)).toEqual([0.85, 0.5, 0]);
    expect(poseAt(minimum, "disk2", 1)).toEqual([0.5, 0.85, 0]);
  });

  it("draws start in green and goal in red for every robot", () => {
    const items = workspaceDisplayList(sceneDoc(), null, 0);
    const circles = items.filter((i) => i.kind === "circle");
    const strokes = circles.map((c) => (c as { stroke?: string }).stroke);
    expect(strokes.filter((s) => s === COLORS.start)).toHaveLength(2);
    expect(strokes.filter((s) => s === COLORS.goal)).toHaveLength(2);
  });

  it("draws animated robot bodies and one trace per robot", () => {
    const items = workspaceDisplayList(sceneDoc(), minimumDoc("n2", true), 0.5);
    const traces = items.filter((i) => i.kind === "line" && i.stroke === COLORS.trace);
    expect(traces).toHaveLength(2);
    const bodies = items.filter((i) => i.kind === "circle" && i.fill === COLORS.robot);
    expect(bodies).toHaveLength(2);
  });

  it("two distinct minima animate visibly differently", () => {
    const a = minimumDoc("n2", true);
    const b = minimumDoc("n3", false);
    const mid = 0.5;
    const da = poseAt(a, "disk1", mid);
    const db = poseAt(b, "disk1", mid);
    // disk1 has already crossed in one minimum and not started in the other
    expect(Math.abs(da[0] - db[0])).toBeGreaterThan(0.3);
    const itemsA = workspaceDisplayList(sceneDoc(), a, mid);
    const itemsB = workspaceDisplayList(sceneDoc(), b, mid);
    expect(JSON.stringify(itemsA)).not.toEqual(JSON.stringify(itemsB));
  });

  it("renders rails for segment-constrained robots", () => {
    const items = workspaceDisplayList(sceneDoc(), null, 0);
    const rails = items.filter((i) => i.kind === "line" && i.stroke === COLORS.track);
    expect(rails).toHaveLength(2);
  });
});
