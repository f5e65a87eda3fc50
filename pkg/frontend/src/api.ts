// Thin typed client for the explorer API. The fetch function is
// injectable so tests can run without a server.

import type { Budget, ExpansionReport, MinimumDoc, SceneDoc, Snapshot, StatusDoc } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type ExpandResult =
  | { kind: "done"; report: ExpansionReport; snapshot: Snapshot }
  | { kind: "accepted" };

async function parseError(resp: Response): Promise<ApiError> {
  let code = "error";
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? JSON.stringify(body);
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (u, i) => fetch(u, i),
    private readonly base: string = "",
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.base + path);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async createSession(scene: string, bundle: string, seed: number): Promise<{ session: string; snapshot: Snapshot }> {
    const resp = await this.fetchFn(this.base + "/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scene, bundle, seed }),
    });
    if (!resp.ok) throw await parseError(resp);
    return await resp.json();
  }

  async expand(session: string, nodeId: string, budget: Budget): Promise<ExpandResult> {
    const resp = await this.fetchFn(`${this.base}/api/sessions/${session}/expand`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ node_id: nodeId, ...budget }),
    });
    if (resp.status === 202) return { kind: "accepted" };
    if (!resp.ok) throw await parseError(resp);
    const body = await resp.json();
    return { kind: "done", report: body.report, snapshot: body.snapshot };
  }

  tree(session: string): Promise<Snapshot> {
    return this.getJson(`/api/sessions/${session}/tree`);
  }

  scene(session: string): Promise<SceneDoc> {
    return this.getJson(`/api/sessions/${session}/scene`);
  }

  status(session: string): Promise<StatusDoc> {
    return this.getJson(`/api/sessions/${session}/status`);
  }

  minimum(session: string, nodeId: string): Promise<MinimumDoc> {
    return this.getJson(`/api/sessions/${session}/minima/${nodeId}`);
  }
}
