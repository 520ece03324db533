/**
 * View-model derivation: server nodes in, display decisions out.
 *
 * The client never does score arithmetic — the bucket is a comparison of the
 * server-computed total against the server-configured threshold, and the
 * glyph is a straight read of the server's status field.
 */

import type { NodeStatus, TimelineNode } from "./api.js";

export type ScoreBucket = "high" | "medium" | "low";
export type StatusGlyph = "pin" | "strike" | "faded" | "normal";

/** A node at least this far above the threshold renders green. */
export const HIGH_MARGIN = 0.2;

export function scoreBucket(total: number, theta: number): ScoreBucket {
  if (total >= theta + HIGH_MARGIN) return "high";
  if (total < theta) return "low";
  return "medium";
}

const GLYPHS: Record<NodeStatus, StatusGlyph> = {
  pinned: "pin",
  forget_marked: "strike",
  decay_flagged: "faded",
  retained: "normal",
};

export function statusGlyph(status: NodeStatus): StatusGlyph {
  const glyph = GLYPHS[status];
  if (!glyph) throw new Error(`unknown node status: ${status}`);
  return glyph;
}

const KIND_BADGES: Record<string, string> = {
  user_message: "user",
  tool_call: "tool",
  agent_action: "agent",
  observation: "obs",
};

export interface NodeView {
  entryId: number;
  turn: number;
  kindBadge: string;
  contentPreview: string;
  bucket: ScoreBucket;
  glyph: StatusGlyph;
  status: NodeStatus;
  total: number;
}

export function toNodeView(node: TimelineNode, theta: number): NodeView {
  return {
    entryId: node.entry_id,
    turn: node.turn,
    kindBadge: KIND_BADGES[node.kind] ?? node.kind,
    contentPreview: node.content_preview,
    bucket: scoreBucket(node.score.total, theta),
    glyph: statusGlyph(node.status),
    status: node.status,
    total: node.score.total,
  };
}

export type TimelineViewState =
  | { kind: "empty"; message: string }
  | { kind: "list"; views: NodeView[] };

/** Server order is chronological already; preserve it verbatim. */
export function timelineView(nodes: TimelineNode[], theta: number): TimelineViewState {
  if (nodes.length === 0) {
    return { kind: "empty", message: "No memories yet — the timeline fills as turns pass." };
  }
  return { kind: "list", views: nodes.map((n) => toNodeView(n, theta)) };
}
