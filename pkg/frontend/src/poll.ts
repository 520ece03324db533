/**
 * Polling loop with coalescing and failure backoff.
 *
 * At most one refresh is ever in flight: a tick (or manual trigger) that
 * lands while one is running is dropped, not queued. Failures stretch the
 * delay geometrically up to a cap; the first success snaps it back.
 * An interval of 0 disables the loop entirely — manual refresh only.
 */

export interface PollerOptions {
  backoffFactor?: number;
  maxIntervalMs?: number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

export class Poller {
  private readonly backoffFactor: number;
  private readonly maxIntervalMs: number;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;

  private handle: unknown = null;
  private inFlight = false;
  private currentDelay: number;
  private running = false;

  constructor(
    private readonly task: () => Promise<void>,
    readonly intervalMs: number,
    options: PollerOptions = {},
  ) {
    this.backoffFactor = options.backoffFactor ?? 2;
    this.maxIntervalMs = options.maxIntervalMs ?? 30_000;
    this.setTimer = options.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = options.clearTimer ?? ((h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]));
    this.currentDelay = intervalMs;
  }

  get enabled(): boolean {
    return this.intervalMs > 0;
  }

  start(): void {
    if (!this.enabled || this.running) return;
    this.running = true;
    this.schedule();
  }

  stop(): void {
    this.running = false;
    if (this.handle !== null) {
      this.clearTimer(this.handle);
      this.handle = null;
    }
  }

  /** Manual refresh; shares the single-flight guard with the loop. */
  async trigger(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      await this.task();
      this.currentDelay = this.intervalMs;
    } catch {
      this.currentDelay = Math.min(
        Math.max(this.currentDelay, 1) * this.backoffFactor,
        this.maxIntervalMs,
      );
    } finally {
      this.inFlight = false;
    }
  }

  private schedule(): void {
    if (!this.running) return;
    this.handle = this.setTimer(async () => {
      await this.trigger();
      this.schedule();
    }, this.currentDelay);
  }
}
