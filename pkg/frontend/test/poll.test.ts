import { describe, expect, it } from "vitest";

import { Poller } from "../src/poll.js";

/** Timer stub: collects scheduled (fn, delay) pairs; fire() runs the next one. */
function fakeTimers() {
  const scheduled: Array<{ fn: () => void; ms: number }> = [];
  return {
    scheduled,
    setTimer: (fn: () => void, ms: number) => {
      scheduled.push({ fn, ms });
      return scheduled.length - 1;
    },
    clearTimer: () => {},
    async fire() {
      const next = scheduled.shift();
      if (!next) throw new Error("nothing scheduled");
      await next.fn();
      // let the trigger's promise chain settle
      await Promise.resolve();
      await Promise.resolve();
    },
  };
}

describe("coalescing", () => {
  it("drops triggers that land while a refresh is in flight", async () => {
    let running = 0;
    let calls = 0;
    let release: () => void = () => {};
    const task = () =>
      new Promise<void>((resolve) => {
        calls += 1;
        running += 1;
        release = () => {
          running -= 1;
          resolve();
        };
      });

    const poller = new Poller(task, 1000, fakeTimers());
    const first = poller.trigger();
    const second = poller.trigger(); // in flight -> dropped
    expect(calls).toBe(1);
    expect(running).toBe(1);
    release();
    await first;
    await second;

    const third = poller.trigger(); // not in flight any more -> runs
    expect(calls).toBe(2);
    release();
    await third;
  });
});

describe("disabled polling", () => {
  it("interval 0 never schedules anything", () => {
    const timers = fakeTimers();
    const poller = new Poller(async () => {}, 0, timers);
    expect(poller.enabled).toBe(false);
    poller.start();
    expect(timers.scheduled).toHaveLength(0);
  });

  it("manual trigger still works when the loop is off", async () => {
    let calls = 0;
    const poller = new Poller(async () => {
      calls += 1;
    }, 0, fakeTimers());
    await poller.trigger();
    expect(calls).toBe(1);
  });
});

describe("failure backoff", () => {
  it("stretches the delay geometrically and snaps back on success", async () => {
    const timers = fakeTimers();
    let shouldFail = true;
    const poller = new Poller(
      async () => {
        if (shouldFail) throw new Error("down");
      },
      1000,
      { ...timers, backoffFactor: 2, maxIntervalMs: 3000 },
    );

    poller.start();
    expect(timers.scheduled[0].ms).toBe(1000);

    await timers.fire(); // fails -> 2000
    expect(timers.scheduled[0].ms).toBe(2000);

    await timers.fire(); // fails -> capped at 3000
    expect(timers.scheduled[0].ms).toBe(3000);

    await timers.fire(); // fails again -> stays at the cap
    expect(timers.scheduled[0].ms).toBe(3000);

    shouldFail = false;
    await timers.fire(); // succeeds -> back to the base interval
    expect(timers.scheduled[0].ms).toBe(1000);
  });

  it("stop() clears the loop", () => {
    const timers = fakeTimers();
    const poller = new Poller(async () => {}, 500, timers);
    poller.start();
    expect(timers.scheduled).toHaveLength(1);
    poller.stop();
    poller.start(); // running flag was reset, a new schedule appears
    expect(timers.scheduled).toHaveLength(2);
  });
});
