/**
 * DOM layer: walks the store's view state and rebuilds the page.
 *
 * Deliberately framework-free — a few hundred nodes re-render in well under
 * a frame, so there is no diffing, just a rebuild on every store change.
 * The context menu appears on hover (CSS) and on focus; r/f/c work as
 * keyboard shortcuts on a focused node.
 */

import type { CurationAction, TimelineStore } from "./store.js";
import type { Poller } from "./poll.js";
import type { NodeView } from "./model.js";

const BUCKET_LABELS = { high: "high utility", medium: "medium utility", low: "below threshold" };

export function renderApp(root: HTMLElement, store: TimelineStore, poller: Poller): void {
  const rerender = () => render(root, store, poller);
  store.subscribe(rerender);
  rerender();
}

function render(root: HTMLElement, store: TimelineStore, poller: Poller): void {
  root.textContent = "";

  const header = el("header", "app-header");
  header.append(el("h1", "", "Memory timeline"));

  const refresh = el("button", "refresh-btn", poller.enabled ? "Refresh now" : "Refresh (polling off)") as HTMLButtonElement;
  refresh.addEventListener("click", () => void poller.trigger());
  header.append(refresh);
  root.append(header);

  if (store.banner) {
    const banner = el("div", "banner error", store.banner);
    if (store.stale) banner.append(el("span", "stale-tag", " — showing stale data"));
    root.append(banner);
  }

  root.append(configPanel(store));
  root.append(timeline(store));
}

function timeline(store: TimelineStore): HTMLElement {
  const state = store.views();
  if (state.kind === "empty") {
    return el("p", "empty-state", state.message);
  }
  const list = el("ol", "timeline");
  for (const view of state.views) {
    list.append(timelineNode(view, store));
  }
  return list;
}

function timelineNode(view: NodeView, store: TimelineStore): HTMLElement {
  const item = el("li", `node bucket-${view.bucket} glyph-${view.glyph}`);
  item.tabIndex = 0;
  item.dataset.entryId = String(view.entryId);
  item.title = `${BUCKET_LABELS[view.bucket]} (score ${view.total.toFixed(3)})`;

  const dot = el("span", `dot dot-${view.bucket}`);
  dot.setAttribute("aria-label", BUCKET_LABELS[view.bucket]);
  item.append(dot);

  if (view.glyph === "pin") item.append(el("span", "pin-glyph", "\u{1F4CC}"));
  item.append(el("span", "badge", view.kindBadge));
  item.append(el("span", "turn", `t${view.turn}`));

  const text = el("span", "preview", view.contentPreview);
  if (view.glyph === "strike") {
    const struck = document.createElement("s");
    struck.append(text);
    item.append(struck);
  } else {
    item.append(text);
  }

  const inlineError = store.nodeErrors.get(view.entryId);
  if (inlineError) {
    item.append(el("span", "node-error", ` ! ${inlineError}`));
  }

  item.append(contextMenu(view.entryId, store));
  item.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key.toLowerCase();
    const action = ({ r: "retain", f: "forget", c: "consolidate" } as const)[
      key as "r" | "f" | "c"
    ];
    if (action) void store.action(view.entryId, action);
  });
  return item;
}

function contextMenu(entryId: number, store: TimelineStore): HTMLElement {
  const menu = el("span", "context-menu");
  const actions: Array<[CurationAction, string]> = [
    ["retain", "Retain"],
    ["forget", "Forget"],
    ["consolidate", "Consolidate"],
  ];
  for (const [action, label] of actions) {
    const button = el("button", `action-${action}`, label) as HTMLButtonElement;
    button.addEventListener("click", () => void store.action(entryId, action));
    menu.append(button);
  }
  return menu;
}

function configPanel(store: TimelineStore): HTMLElement {
  const panel = el("details", "config-panel");
  panel.append(el("summary", "", "Scoring config"));
  if (!store.config) {
    panel.append(el("p", "", "config not loaded"));
    return panel;
  }

  const form = document.createElement("form");
  const fields: Array<[keyof typeof labels, number]> = [
    ["alpha", store.config.alpha],
    ["beta", store.config.beta],
    ["gamma", store.config.gamma],
    ["decay_rate", store.config.decay_rate],
    ["theta_decay", store.config.theta_decay],
  ];
  const labels = {
    alpha: "recency weight",
    beta: "relevance weight",
    gamma: "user-utility weight",
    decay_rate: "recency decay rate",
    theta_decay: "deletion threshold",
  };
  const inputs = new Map<string, HTMLInputElement>();
  for (const [name, value] of fields) {
    const row = el("label", "config-row", `${name} (${labels[name]}) `);
    const input = document.createElement("input");
    input.name = name;
    input.value = String(value);
    input.inputMode = "decimal";
    inputs.set(name, input);
    row.append(input);
    form.append(row);
  }

  const apply = el("button", "config-apply", "Apply") as HTMLButtonElement;
  apply.type = "submit";
  form.append(apply);
  if (store.configError) {
    form.append(el("div", "config-error", store.configError));
  }
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const changes: Record<string, number> = {};
    for (const [name, input] of inputs) {
      changes[name] = Number(input.value);
    }
    void store.applyConfig(changes);
  });
  panel.append(form);
  return panel;
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}
