/** End-to-end acceptance: the UI store drives the real review server. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { buildTabs } from "../src/results.js";
import { SessionStore } from "../src/store.js";
import { startServer, syntheticEcgText, type LiveServer } from "./live_server.js";

const FS = 128;

let server: LiveServer;
let api: ApiClient;

beforeAll(async () => {
  server = await startServer();
  api = new ApiClient(server.baseUrl);
  await api.upload({
    filename: "e2e.txt",
    content: syntheticEcgText(60, FS, 72),
    kind: "ecg",
    fs: FS,
  });
}, 30_000);

afterAll(() => {
  server?.stop();
});

async function freshSession(): Promise<SessionStore> {
  const store = new SessionStore(api);
  await store.open("e2e.txt");
  return store;
}

describe("peak editing end to end", () => {
  it("stage-and-commit of one removal changes rmssd in the results panel", async () => {
    const store = await freshSession();
    const detection = await api.detect("e2e.txt", { baseline_remove: true });
    store.adoptDetection(detection.peaks, detection.version);
    expect(detection.peak_count).toBeGreaterThan(50);

    const before = await store.analyze();
    const rmssdBefore = buildTabs(before)[0].rows.find((r) => r.name === "rmssd_ms")!;
    expect(rmssdBefore.display).not.toBe("NA");

    store.stageRemove(store.peaks[10]);
    expect(store.peaks).toEqual(detection.peaks); // staged only, not committed
    const outcome = await store.commit();
    expect(outcome.committed).toBe(true);
    expect(store.version).toBe(detection.version + 1);
    expect(store.peaks).toHaveLength(detection.peaks.length - 1);

    const after = await store.analyze();
    const rmssdAfter = buildTabs(after)[0].rows.find((r) => r.name === "rmssd_ms")!;
    expect(rmssdAfter.display).not.toBe(rmssdBefore.display);
  }, 30_000);

  it("stage remove + add keeps the count and bumps the version once", async () => {
    const store = await freshSession();
    const victim = store.peaks[5];
    const versionBefore = store.version;
    store.stageRemove(victim);
    store.stageAdd(victim + 3);
    const outcome = await store.commit();
    expect(outcome.committed).toBe(true);
    expect(store.peaks).toHaveLength((await api.getPeaks("e2e.txt")).peaks.length);
    expect(store.version).toBe(versionBefore + 1);
    expect(store.peaks).toContain(victim + 3);
    expect(store.peaks).not.toContain(victim);
  }, 30_000);

  it("version conflict reloads peaks and keeps replayable edits for confirmation", async () => {
    const alice = await freshSession();
    const bob = await freshSession();

    const aliceTarget = alice.peaks[2];
    alice.stageRemove(aliceTarget);
    expect((await alice.commit()).committed).toBe(true);

    // bob still holds the old version; one edit conflicts, one replays
    const bobKeep = bob.peaks[7];
    bob.stageRemove(aliceTarget); // already gone server-side
    bob.stageRemove(bobKeep);
    const outcome = await bob.commit();
    expect(outcome.committed).toBe(false);
    const conflict = outcome.conflict!;
    expect(conflict.serverVersion).toBe(alice.version);
    expect(conflict.droppedRemoves).toEqual([aliceTarget]);
    expect(conflict.keptRemoves).toEqual([bobKeep]);
    expect(bob.peaks).toEqual(alice.peaks);
    expect(bob.lastConflict).not.toBeNull();

    // user confirms: the replayed buffer commits at the new version
    expect((await bob.commit()).committed).toBe(true);
    expect(bob.peaks).not.toContain(bobKeep);
  }, 30_000);
});

describe("waveform decimation end to end", () => {
  const ranges: Array<[number, number, number]> = [
    [0, 7680, 1000],
    [0, 7680, 64],
    [512, 1024, 2000], // below max_points: raw passthrough
    [3000, 3500, 100],
    [0, 256, 8],
  ];

  it("decimated extremes equal the raw extremes on every tested range", async () => {
    const raw = await api.getSignal("e2e.txt", 0, 7680, 10_000_000);
    expect(raw.decimated).toBe(false);
    for (const [start, end, maxPoints] of ranges) {
      const chunk = await api.getSignal("e2e.txt", start, end, maxPoints);
      const window = raw.values.slice(start, end);
      expect(Math.max(...chunk.values)).toBeCloseTo(Math.max(...window), 10);
      expect(Math.min(...chunk.values)).toBeCloseTo(Math.min(...window), 10);
      expect(chunk.values.length).toBeLessThanOrEqual(2 * maxPoints);
      if (end - start <= maxPoints) {
        expect(chunk.decimated).toBe(false);
        expect(chunk.values).toEqual(window);
      }
    }
  }, 30_000);

  it("zooming below max_points yields exact raw samples", async () => {
    const chunk = await api.getSignal("e2e.txt", 1000, 1000 + 2 * FS, 1000);
    expect(chunk.decimated).toBe(false);
    expect(chunk.indices[0]).toBe(1000);
    expect(chunk.indices).toHaveLength(2 * FS);
  }, 30_000);
});

describe("analysis settings end to end", () => {
  it("runs the all-mode plan set and shows three tabs", async () => {
    const store = await freshSession();
    store.settings = { ...store.settings, mode: "all", n: 2 };
    const reports = await store.analyze();
    const tabs = buildTabs(reports);
    expect(tabs.map((t) => t.label)).toEqual(["HR1V1", "HR2V1", "HR2V2"]);
    expect(tabs[0].ibiLines.some((line) => line.startsWith("original"))).toBe(true);
    expect(tabs[1].ibiLines).toHaveLength(1);
  }, 30_000);
});
