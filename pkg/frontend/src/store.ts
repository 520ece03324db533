/**
 * Client-side state: the fetched timeline plus optimistic edits.
 *
 * Actions patch the local node immediately so the UI answers at once, then
 * confirm against the server. A failed call restores the exact pre-action
 * node (deep snapshot) and surfaces the error inline on that node; the view
 * list itself is bit-for-bit what it was before the optimistic patch.
 */

import { ApiError, type MemoryApi, type ServiceConfig, type TimelineNode } from "./api.js";
import { timelineView, type TimelineViewState } from "./model.js";

export type CurationAction = "retain" | "forget" | "consolidate";

export type Listener = () => void;

export class TimelineStore {
  nodes: TimelineNode[] = [];
  config: ServiceConfig | null = null;
  /** Global error banner (fetch/poll failures); null when healthy. */
  banner: string | null = null;
  /** True when the displayed data may be older than the server's. */
  stale = false;
  /** Per-node inline errors from failed actions, keyed by entry id. */
  nodeErrors = new Map<number, string>();
  /** Verbatim server message from a rejected config edit. */
  configError: string | null = null;

  private listeners: Listener[] = [];

  constructor(private readonly api: MemoryApi) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get theta(): number {
    return this.config?.theta_decay ?? 0;
  }

  get nMax(): number {
    return this.config?.n_max ?? 1;
  }

  views(): TimelineViewState {
    return timelineView(this.nodes, this.theta);
  }

  async init(): Promise<void> {
    this.config = await this.api.config();
    await this.refresh();
  }

  async refresh(): Promise<void> {
    try {
      this.nodes = await this.api.timeline();
      this.banner = null;
      this.stale = false;
    } catch (error) {
      // keep showing what we have, but say so
      this.banner = `Refresh failed: ${message(error)}`;
      this.stale = true;
    }
    this.notify();
  }

  async action(entryId: number, action: CurationAction): Promise<void> {
    const index = this.nodes.findIndex((n) => n.entry_id === entryId);
    if (index < 0) return;
    const snapshot = structuredClone(this.nodes[index]);
    this.nodeErrors.delete(entryId);

    // optimistic patch: show the post-action status before the wire answers
    const patched = this.nodes[index];
    if (action === "retain") {
      patched.user_utility = this.nMax;
      patched.status = "pinned";
    } else {
      // forget and consolidate both end with the entry marked forgotten
      patched.user_utility = 0;
      patched.status = "forget_marked";
    }
    this.notify();

    try {
      if (action === "retain") {
        this.nodes[index] = await this.api.retain(entryId, this.nMax);
      } else if (action === "forget") {
        this.nodes[index] = await this.api.forget(entryId);
      } else {
        await this.api.consolidate(entryId);
        await this.refresh();
        return;
      }
      this.notify();
    } catch (error) {
      this.nodes[index] = snapshot;
      this.nodeErrors.set(entryId, message(error));
      this.notify();
    }
  }

  async applyConfig(changes: Partial<ServiceConfig>): Promise<boolean> {
    try {
      this.config = await this.api.updateConfig(changes);
      this.configError = null;
      this.notify();
      return true;
    } catch (error) {
      // show the server's validation text verbatim; state is untouched server-side
      this.configError = message(error);
      this.notify();
      return false;
    }
  }
}

function message(error: unknown): string {
  if (error instanceof ApiError) return error.detail;
  if (error instanceof Error) return error.message;
  return String(error);
}
