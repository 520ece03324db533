import { describe, expect, it } from "vitest";

import { MemoryApi } from "../src/api.js";
import { TimelineStore } from "../src/store.js";
import { CONFIG, fail, node, ok, scriptedFetch, type Step } from "./helpers.js";

const BASE = "http://127.0.0.1:8750";

function storeWith(steps: Step[]) {
  const scripted = scriptedFetch(steps);
  const store = new TimelineStore(new MemoryApi(BASE, scripted.fetch));
  return { store, calls: scripted.calls };
}

const THREE_NODES = [
  node({ entry_id: 0, turn: 1, status: "retained" }),
  node({ entry_id: 1, turn: 2, status: "retained", content_preview: "keep me" }),
  node({ entry_id: 2, turn: 3, status: "decay_flagged", score: { recency: 0.1, relevance: 0.2, user_utility_norm: 0.5, total: 0.2 } }),
];

describe("init and refresh", () => {
  it("loads config then timeline", async () => {
    const { store, calls } = storeWith([ok(CONFIG), ok(THREE_NODES)]);
    await store.init();
    expect(calls.map((c) => c.url)).toEqual([`${BASE}/config`, `${BASE}/timeline`]);
    expect(store.theta).toBe(0.35);
    expect(store.nMax).toBe(2);
    const state = store.views();
    expect(state.kind).toBe("list");
  });

  it("a failed refresh keeps old data, marks it stale, raises a banner", async () => {
    const { store } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      { error: new Error("connection refused") },
    ]);
    await store.init();
    await store.refresh();
    expect(store.stale).toBe(true);
    expect(store.banner).toMatch(/connection refused/);
    expect(store.nodes).toHaveLength(3); // stale but still shown
  });
});

describe("curation actions", () => {
  it("retain patches optimistically, then adopts the server node", async () => {
    const { store, calls } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      ok(node({ entry_id: 1, turn: 2, status: "pinned", user_utility: 2 })),
    ]);
    await store.init();

    const observed: string[] = [];
    store.subscribe(() => {
      const state = store.views();
      if (state.kind === "list") observed.push(state.views[1].glyph);
    });

    await store.action(1, "retain");
    // first notify is the optimistic patch, second the server confirmation
    expect(observed[0]).toBe("pin");
    expect(observed[observed.length - 1]).toBe("pin");
    expect(calls[2]).toEqual({
      method: "POST",
      url: `${BASE}/entries/1/utility`,
      body: { value: 2 },
    });
    expect(store.nodes[1].user_utility).toBe(2);
  });

  it("forget sends zero and strikes the node", async () => {
    const { store, calls } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      ok(node({ entry_id: 0, turn: 1, status: "forget_marked", user_utility: 0 })),
    ]);
    await store.init();
    await store.action(0, "forget");
    expect(calls[2].body).toEqual({ value: 0 });
    const state = store.views();
    if (state.kind !== "list") throw new Error("expected list");
    expect(state.views[0].glyph).toBe("strike");
  });

  it("consolidate posts then re-fetches the timeline", async () => {
    const afterConsolidate = [
      THREE_NODES[0],
      THREE_NODES[1],
      node({ entry_id: 2, turn: 3, status: "forget_marked", user_utility: 0 }),
    ];
    const { store, calls } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      ok({ entry_id: 2, fact_id: 0, text: "distilled fact" }),
      ok(afterConsolidate),
    ]);
    await store.init();
    await store.action(2, "consolidate");
    expect(calls.map((c) => `${c.method} ${c.url}`)).toEqual([
      `GET ${BASE}/config`,
      `GET ${BASE}/timeline`,
      `POST ${BASE}/entries/2/consolidate`,
      `GET ${BASE}/timeline`,
    ]);
    expect(store.nodes[2].status).toBe("forget_marked");
  });

  it("a 500 rolls the view back to exactly the pre-action state", async () => {
    const { store } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      fail(500, "summarizer offline"),
    ]);
    await store.init();
    const before = JSON.stringify(store.views());

    await store.action(1, "forget");

    expect(JSON.stringify(store.views())).toBe(before);
    expect(store.nodes[1].user_utility).toBe(1);
    expect(store.nodeErrors.get(1)).toBe("summarizer offline");
  });

  it("the optimistic state was visible before the rollback", async () => {
    const { store } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      fail(500, "nope"),
    ]);
    await store.init();

    const glyphTrail: string[] = [];
    store.subscribe(() => {
      const state = store.views();
      if (state.kind === "list") glyphTrail.push(state.views[1].glyph);
    });

    await store.action(1, "forget");
    expect(glyphTrail).toEqual(["strike", "normal"]); // optimistic, then rolled back
  });

  it("actions on unknown ids are ignored", async () => {
    const { store, calls } = storeWith([ok(CONFIG), ok(THREE_NODES)]);
    await store.init();
    await store.action(99, "retain");
    expect(calls).toHaveLength(2); // no request went out
  });
});

describe("config edits", () => {
  it("applies valid changes and clears old errors", async () => {
    const { store } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      ok({ ...CONFIG, theta_decay: 0.6 }),
    ]);
    await store.init();
    expect(await store.applyConfig({ theta_decay: 0.6 })).toBe(true);
    expect(store.theta).toBe(0.6);
    expect(store.configError).toBeNull();
  });

  it("shows a 422 message verbatim and keeps the old config", async () => {
    const { store } = storeWith([
      ok(CONFIG),
      ok(THREE_NODES),
      fail(422, "at least one of alpha/beta/gamma must be positive"),
    ]);
    await store.init();
    expect(await store.applyConfig({ alpha: 0, beta: 0, gamma: 0 })).toBe(false);
    expect(store.configError).toBe("at least one of alpha/beta/gamma must be positive");
    expect(store.theta).toBe(0.35);
  });
});

describe("re-bucketing on poll", () => {
  it("a node's bucket can drop after the server advances turns", async () => {
    const young = node({
      entry_id: 0,
      score: { recency: 1.0, relevance: 0.6, user_utility_norm: 0.5, total: 0.7 },
    });
    const aged = node({
      entry_id: 0,
      score: { recency: 0.2, relevance: 0.6, user_utility_norm: 0.5, total: 0.46 },
    });
    const { store } = storeWith([ok(CONFIG), ok([young]), ok([aged])]);
    await store.init();
    let state = store.views();
    if (state.kind !== "list") throw new Error("expected list");
    expect(state.views[0].bucket).toBe("high");

    await store.refresh(); // the poller calls exactly this
    state = store.views();
    if (state.kind !== "list") throw new Error("expected list");
    expect(state.views[0].bucket).toBe("medium");
  });
});
