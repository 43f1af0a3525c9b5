/** Trace playback: a clock that advances replay state over buffered events.
 *
 * The ticker and the network are decoupled. `elapse()` is driven by the UI's
 * animation loop and only consumes events already buffered; when the next
 * tick's window is missing it kicks off a fetch and stalls without blocking.
 * Jumps seed state from the snapshot endpoint instead of replaying from the
 * start. Events are fetched in fixed windows aligned to multiples of
 * WINDOW_TICKS, one request in flight per window at most.
 */

import type { SimEvent, Snapshot } from "./types";
import type { ReplayState } from "./replay";
import { applyEvent, snapshotOf, stateFromSnapshot } from "./replay";

export const SPEEDS = [0.5, 1, 2, 4, 8] as const;
export type Speed = (typeof SPEEDS)[number];

export const WINDOW_TICKS = 500;
export const BASE_TICKS_PER_SECOND = 4;

/** Ticks the clock may owe after a stall before it starts dropping time;
 * keeps a long fetch or a backgrounded tab from bursting on resume. */
const MAX_PENDING_TICKS = 64;

export interface EventSource {
  traceSnapshot(traceId: string, tick: number): Promise<{ snapshot: Snapshot }>;
  traceEvents(
    traceId: string,
    fromTick: number,
    toTick: number,
  ): Promise<{ events: SimEvent[] }>;
}

export class Player {
  playing = false;
  speed: Speed = 1;
  lastError: string | null = null;

  private state: ReplayState | null = null;
  private windows = new Map<number, Map<number, SimEvent[]>>();
  private inFlight = new Map<number, Promise<void>>();
  private fractionalTicks = 0;
  private jumpToken = 0;
  private listeners = new Set<() => void>();

  constructor(
    private readonly api: EventSource,
    readonly traceId: string,
    readonly finalTick: number,
  ) {}

  get tick(): number | null {
    return this.state?.tick ?? null;
  }

  snapshot(): Snapshot | null {
    return this.state === null ? null : snapshotOf(this.state);
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  play(): void {
    this.playing = true;
  }

  pause(): void {
    this.playing = false;
  }

  setSpeed(speed: number): void {
    if (!(SPEEDS as readonly number[]).includes(speed)) {
      throw new RangeError(`speed ${speed} not one of ${SPEEDS.join(", ")}`);
    }
    this.speed = speed as Speed;
  }

  /** Seed state at a tick (clamped to the trace range) from the snapshot
   * endpoint and prefetch the events that follow. Returns the clamped tick.
   * A jump started while another is pending wins; the stale one is dropped. */
  async jump(tick: number): Promise<number> {
    const target = Math.max(0, Math.min(this.finalTick, Math.floor(tick)));
    const token = ++this.jumpToken;
    const { snapshot } = await this.api.traceSnapshot(this.traceId, target);
    if (token !== this.jumpToken) return target;
    this.state = stateFromSnapshot(snapshot);
    this.fractionalTicks = 0;
    this.lastError = null;
    if (target < this.finalTick) void this.ensureWindow(this.windowOf(target + 1));
    this.notify();
    return target;
  }

  /** Advance the clock by wall time. Consumes only buffered events; returns
   * the number of ticks actually advanced. */
  elapse(dtSeconds: number): number {
    if (!this.playing || this.state === null) return 0;
    this.fractionalTicks = Math.min(
      this.fractionalTicks + dtSeconds * BASE_TICKS_PER_SECOND * this.speed,
      MAX_PENDING_TICKS,
    );
    let advanced = 0;
    while (this.fractionalTicks >= 1) {
      if (!this.advanceOne()) break;
      this.fractionalTicks -= 1;
      advanced += 1;
    }
    if (advanced > 0) this.notify();
    return advanced;
  }

  /** Advance state to a later tick by streaming events, awaiting window
   * fetches as needed. Used for precise stepping; playback uses elapse(). */
  async seekForward(target: number): Promise<void> {
    if (this.state === null) throw new Error("seekForward before jump()");
    const to = Math.min(this.finalTick, Math.floor(target));
    while (this.state.tick < to) {
      const windowIndex = this.windowOf(this.state.tick + 1);
      await this.ensureWindow(windowIndex);
      const window = this.windows.get(windowIndex);
      if (window === undefined) {
        throw new Error(this.lastError ?? `window ${windowIndex} failed to load`);
      }
      const windowEnd = (windowIndex + 1) * WINDOW_TICKS - 1;
      const stopAt = Math.min(to, windowEnd);
      while (this.state.tick < stopAt) {
        const next = this.state.tick + 1;
        for (const event of window.get(next) ?? []) applyEvent(this.state, event);
        this.state.tick = next;
      }
    }
    this.notify();
  }

  private advanceOne(): boolean {
    if (this.state === null) return false;
    const next = this.state.tick + 1;
    if (next > this.finalTick) {
      this.playing = false;
      return false;
    }
    const windowIndex = this.windowOf(next);
    const window = this.windows.get(windowIndex);
    if (window === undefined) {
      void this.ensureWindow(windowIndex);
      return false;
    }
    for (const event of window.get(next) ?? []) applyEvent(this.state, event);
    this.state.tick = next;
    // Prefetch the next window while still playing through this one.
    if (next % WINDOW_TICKS >= WINDOW_TICKS - BASE_TICKS_PER_SECOND * 8 * 2) {
      const following = windowIndex + 1;
      if (following * WINDOW_TICKS <= this.finalTick) void this.ensureWindow(following);
    }
    return true;
  }

  private windowOf(tick: number): number {
    return Math.floor(tick / WINDOW_TICKS);
  }

  /** Fetch one aligned event window unless buffered or already in flight. */
  ensureWindow(windowIndex: number): Promise<void> {
    if (this.windows.has(windowIndex)) return Promise.resolve();
    const pending = this.inFlight.get(windowIndex);
    if (pending !== undefined) return pending;
    const from = windowIndex * WINDOW_TICKS;
    const to = Math.min(from + WINDOW_TICKS - 1, this.finalTick);
    if (from > this.finalTick) return Promise.resolve();
    const request = this.api
      .traceEvents(this.traceId, from, to)
      .then(({ events }) => {
        const byTick = new Map<number, SimEvent[]>();
        for (const event of events) {
          const bucket = byTick.get(event.tick) ?? [];
          bucket.push(event);
          byTick.set(event.tick, bucket);
        }
        this.windows.set(windowIndex, byTick);
        this.inFlight.delete(windowIndex);
        this.notify();
      })
      .catch((err: unknown) => {
        this.inFlight.delete(windowIndex);
        this.lastError = err instanceof Error ? err.message : String(err);
        this.notify();
      });
    this.inFlight.set(windowIndex, request);
    return request;
  }

  bufferedWindows(): number[] {
    return [...this.windows.keys()].sort((a, b) => a - b);
  }
}
