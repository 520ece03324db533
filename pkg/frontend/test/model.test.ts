import { describe, expect, it } from "vitest";

import { HIGH_MARGIN, scoreBucket, statusGlyph, timelineView, toNodeView } from "../src/model.js";
import type { NodeStatus } from "../src/api.js";
import { node } from "./helpers.js";

const THETA = 0.35;

describe("status glyphs", () => {
  it.each([
    ["pinned", "pin"],
    ["forget_marked", "strike"],
    ["decay_flagged", "faded"],
    ["retained", "normal"],
  ] as Array<[NodeStatus, string]>)("%s renders as %s", (status, glyph) => {
    expect(statusGlyph(status)).toBe(glyph);
  });

  it("rejects statuses the server never sends", () => {
    expect(() => statusGlyph("zombie" as NodeStatus)).toThrow(/unknown node status/);
  });
});

describe("score buckets", () => {
  it("is high at and above theta + margin", () => {
    expect(scoreBucket(THETA + HIGH_MARGIN, THETA)).toBe("high");
    expect(scoreBucket(0.99, THETA)).toBe("high");
  });

  it("is low strictly below theta", () => {
    expect(scoreBucket(THETA - 1e-9, THETA)).toBe("low");
    expect(scoreBucket(0, THETA)).toBe("low");
  });

  it("is medium from theta up to the margin", () => {
    expect(scoreBucket(THETA, THETA)).toBe("medium");
    expect(scoreBucket(THETA + HIGH_MARGIN - 1e-9, THETA)).toBe("medium");
  });
});

describe("node views", () => {
  it("maps kinds to short badges and keeps the preview verbatim", () => {
    const view = toNodeView(
      node({ kind: "user_message", content_preview: "hello there" }),
      THETA,
    );
    expect(view.kindBadge).toBe("user");
    expect(view.contentPreview).toBe("hello there");
    expect(view.bucket).toBe("high"); // fixture total 0.67 vs 0.35 + 0.2
  });

  it("buckets and glyphs come straight from the server payload", () => {
    const flagged = toNodeView(
      node({ status: "decay_flagged", score: { recency: 0.1, relevance: 0.2, user_utility_norm: 0.5, total: 0.22 } }),
      THETA,
    );
    expect(flagged.glyph).toBe("faded");
    expect(flagged.bucket).toBe("low");
  });
});

describe("timeline view state", () => {
  it("empty timeline yields the empty-state message", () => {
    const state = timelineView([], THETA);
    expect(state.kind).toBe("empty");
    if (state.kind === "empty") expect(state.message).toMatch(/No memories yet/);
  });

  it("the three curation statuses render pin / green / faded side by side", () => {
    const state = timelineView(
      [
        node({ entry_id: 1, status: "pinned" }),
        node({ entry_id: 2, status: "retained" }),
        node({ entry_id: 3, status: "decay_flagged", score: { recency: 0.1, relevance: 0.2, user_utility_norm: 0.5, total: 0.2 } }),
      ],
      THETA,
    );
    if (state.kind !== "list") throw new Error("expected a list");
    expect(state.views.map((v) => v.glyph)).toEqual(["pin", "normal", "faded"]);
    expect(state.views[0].bucket).toBe("high");
    expect(state.views[2].bucket).toBe("low");
  });

  it("preserves server order for hundreds of nodes", () => {
    const nodes = Array.from({ length: 500 }, (_, i) =>
      node({ entry_id: i, turn: Math.floor(i / 3) }),
    );
    const state = timelineView(nodes, THETA);
    if (state.kind !== "list") throw new Error("expected a list");
    expect(state.views.map((v) => v.entryId)).toEqual(nodes.map((n) => n.entry_id));
  });
});
