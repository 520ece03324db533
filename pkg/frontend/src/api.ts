/**
 * Typed client for the memory service HTTP API.
 *
 * Every UI action maps to exactly one endpoint call; the shapes here mirror
 * the server's JSON verbatim. The fetch implementation is injectable so
 * tests can script responses without a network.
 */

export type NodeStatus = "pinned" | "forget_marked" | "decay_flagged" | "retained";

export interface ScoreBreakdown {
  recency: number;
  relevance: number;
  user_utility_norm: number;
  total: number;
}

export interface TimelineNode {
  entry_id: number;
  turn: number;
  kind: string;
  content_preview: string;
  user_utility: number;
  consolidation_flag: boolean;
  score: ScoreBreakdown;
  status: NodeStatus;
}

export interface ServiceConfig {
  alpha: number;
  beta: number;
  gamma: number;
  decay_rate: number;
  theta_decay: number;
  n_max: number;
  cadence_turns: number;
  use_wall_clock: boolean;
  dimension: number;
  task_mode: string;
  task_charter: string;
}

export interface ConsolidateResult {
  entry_id: number;
  fact_id: number;
  text: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export class MemoryApi {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  timeline(): Promise<TimelineNode[]> {
    return this.request("GET", "/timeline");
  }

  entry(entryId: number): Promise<TimelineNode & { content: string }> {
    return this.request("GET", `/entries/${entryId}`);
  }

  config(): Promise<ServiceConfig> {
    return this.request("GET", "/config");
  }

  updateConfig(changes: Partial<ServiceConfig>): Promise<ServiceConfig> {
    return this.request("PUT", "/config", changes);
  }

  setUtility(entryId: number, value: number): Promise<TimelineNode> {
    return this.request("POST", `/entries/${entryId}/utility`, { value });
  }

  /** Pin: rate the entry at the top of the scale so decay never touches it. */
  retain(entryId: number, nMax: number): Promise<TimelineNode> {
    return this.setUtility(entryId, nMax);
  }

  /** Strike: rate the entry 0 so the next decay run removes it. */
  forget(entryId: number): Promise<TimelineNode> {
    return this.setUtility(entryId, 0);
  }

  consolidate(entryId: number): Promise<ConsolidateResult> {
    return this.request("POST", `/entries/${entryId}/consolidate`);
  }

  runDecay(): Promise<unknown> {
    return this.request("POST", "/decay/run");
  }

  advanceTurn(): Promise<{ turn: number }> {
    return this.request("POST", "/turns/advance", {});
  }

  metrics(): Promise<Record<string, number>> {
    return this.request("GET", "/metrics");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await describeFailure(response));
    }
    return (await response.json()) as T;
  }
}

async function describeFailure(response: Response): Promise<string> {
  try {
    const payload = await response.json();
    if (payload && typeof payload === "object" && "detail" in payload) {
      const detail = (payload as { detail: unknown }).detail;
      return typeof detail === "string" ? detail : JSON.stringify(detail);
    }
    return JSON.stringify(payload);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}
