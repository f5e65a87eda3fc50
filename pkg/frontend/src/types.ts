// Documents served by the explorer JSON API.

export interface TreeNodeDoc {
  id: string;
  level: number;
  parent: string | null;
  children: string[];
  status: "fresh" | "expanded";
  cost: number | null;
  created_iteration: number;
  path: number[][] | null;
}

export interface Snapshot {
  format: string;
  root: string;
  nodes: TreeNodeDoc[];
}

export interface ObstacleDoc {
  type: "disk" | "polygon";
  center?: number[];
  radius?: number;
  points?: number[][];
}

export interface RenderRobot {
  name: string;
  shape: { type: "disk"; radius: number } | { type: "polygon"; points: number[][] };
  start: number[]; // [x, y, theta]
  goal: number[];
  track: { from: number[]; to: number[] } | null;
}

export interface SceneDoc {
  name: string;
  workspace: { bounds: number[]; obstacles: ObstacleDoc[] };
  render_robots: RenderRobot[];
  levels: number;
}

export interface MinimumDoc {
  node: string;
  level: number;
  cost: number;
  steps: number;
  robots: Record<string, number[][]>; // per robot: steps x [x, y, theta]
}

export interface StatusDoc {
  state: "idle" | "expanding";
  iteration: number;
  samples: number;
  error: string | null;
}

export interface ExpansionReport {
  node_id: string;
  new_nodes: string[];
  samples: number;
  no_path: boolean;
}

export type Budget = { samples: number } | { seconds: number };
