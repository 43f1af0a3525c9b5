/** Shared test utilities: fixture loading and a deterministic RNG. */

import { readFileSync } from "node:fs";
import type { SimEvent, Snapshot } from "../src/types";

export function fixturePath(name: string): string {
  return new URL(`./fixtures/${name}`, import.meta.url).pathname;
}

export function loadJsonFixture<T>(name: string): T {
  return JSON.parse(readFileSync(fixturePath(name), "utf-8")) as T;
}

/** Events of a trace fixture in file order (the header line is skipped). */
export function loadTraceEvents(name: string): SimEvent[] {
  const lines = readFileSync(fixturePath(name), "utf-8").trimEnd().split("\n");
  return lines
    .slice(1)
    .filter((line) => line.trim() !== "")
    .map((line) => JSON.parse(line) as SimEvent);
}

export interface SnapshotFixture {
  final_tick: number;
  snapshots: Record<string, Snapshot>;
}

/** Small deterministic PRNG so random picks are reproducible across runs. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
