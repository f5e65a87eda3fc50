// Poll the session status until an asynchronous expansion finishes.

import type { ApiClient } from "./api.js";
import type { StatusDoc } from "./types.js";

export const POLL_INTERVAL_MS = 250;

export async function pollUntilIdle(
  api: ApiClient,
  session: string,
  intervalMs: number = POLL_INTERVAL_MS,
  maxMs: number = 10 * 60 * 1000,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<StatusDoc> {
  const started = Date.now();
  for (;;) {
    const status = await api.status(session);
    if (status.state === "idle") return status;
    if (Date.now() - started > maxMs) {
      throw new Error(`expansion still running after ${maxMs} ms`);
    }
    await sleep(intervalMs);
  }
}
