// Browser entry point: wire api -> store -> poller -> DOM.
// API base and poll interval are runtime-configurable:
//   ?api=http://host:port   (or set window.MNEMEX_API_BASE before loading)
//   ?poll=5000              (milliseconds; 0 disables polling)

import { MemoryApi } from "./api.js";
import { Poller } from "./poll.js";
import { renderApp } from "./render.js";
import { TimelineStore } from "./store.js";

declare global {
  interface Window {
    MNEMEX_API_BASE?: string;
  }
}

const params = new URLSearchParams(window.location.search);
const base =
  params.get("api") ?? window.MNEMEX_API_BASE ?? "http://127.0.0.1:8750";
const pollMs = Number(params.get("poll") ?? "2000");

const api = new MemoryApi(base);
const store = new TimelineStore(api);
const poller = new Poller(() => store.refresh(), Number.isFinite(pollMs) ? pollMs : 2000);

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

store
  .init()
  .catch((error) => {
    store.banner = `Cannot reach the memory service at ${base}: ${String(error)}`;
    store.stale = true;
  })
  .finally(() => {
    renderApp(root, store, poller);
    poller.start();
  });
