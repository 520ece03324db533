import type { FetchLike, ServiceConfig, TimelineNode } from "../src/api.js";

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export interface ScriptedFetch {
  fetch: FetchLike;
  calls: RecordedCall[];
}

export type Step = { status: number; payload: unknown } | { error: Error };

/** Sequential fetch stub: each call consumes the next scripted response. */
export function scriptedFetch(steps: Step[]): ScriptedFetch {
  const calls: RecordedCall[] = [];
  const queue = [...steps];
  const fetchImpl: FetchLike = async (url, init) => {
    calls.push({
      method: init?.method ?? "GET",
      url,
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    const step = queue.shift();
    if (!step) throw new Error(`unexpected request: ${init?.method ?? "GET"} ${url}`);
    if ("error" in step) throw step.error;
    return new Response(JSON.stringify(step.payload), {
      status: step.status,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetch: fetchImpl, calls };
}

export function ok(payload: unknown): Step {
  return { status: 200, payload };
}

export function fail(status: number, detail: string): Step {
  return { status, payload: { detail } };
}

export const CONFIG: ServiceConfig = {
  alpha: 0.3,
  beta: 0.5,
  gamma: 0.2,
  decay_rate: 0.05,
  theta_decay: 0.35,
  n_max: 2,
  cadence_turns: 10,
  use_wall_clock: false,
  dimension: 256,
  task_mode: "last_user_message",
  task_charter: "Long-running project assistant tracking decisions, facts and follow-ups.",
};

export function node(overrides: Partial<TimelineNode> = {}): TimelineNode {
  return {
    entry_id: 0,
    turn: 1,
    kind: "observation",
    content_preview: "something happened",
    user_utility: 1,
    consolidation_flag: false,
    score: { recency: 0.9, relevance: 0.6, user_utility_norm: 0.5, total: 0.67 },
    status: "retained",
    ...overrides,
  };
}
