// @vitest-environment jsdom
//
// End-to-end: a scripted browser session against the real screening
// service on a 200-document fixture. Requires the Python package to be
// installed (the test starts `litscreen serve` itself).
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/store.js";
import { ReviewView } from "../src/view.js";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const BATCHES = 8;
const BATCH_SIZE = 25;

let dataDir: string;
let server: ChildProcess | null = null;
let gold: Record<string, 0 | 1>;
let offline = false;

// the store sees a fetch that we can unplug to simulate an outage
const flakyFetch = (input: string, init?: RequestInit): Promise<Response> => {
  if (offline && input.includes("/labels")) {
    return Promise.reject(new TypeError("fetch failed (simulated outage)"));
  }
  return fetch(input, init);
};

async function waitFor(predicate: () => boolean, timeoutMs = 30_000): Promise<void> {
  const start = Date.now();
  while (!predicate()) {
    if (Date.now() - start > timeoutMs) throw new Error("timed out waiting for condition");
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "litscreen-e2e-"));
  const poolPath = join(dataDir, "pool.jsonl");
  const fixture = spawnSync(
    PYTHON,
    [
      "-c",
      `
import json
from litscreen.corpus import Corpus, Document, save_corpus
from litscreen.synthetic import two_cluster_corpus
corpus, _ = two_cluster_corpus(n=${BATCHES * BATCH_SIZE}, relevant_fraction=0.08, seed=41)
save_corpus(
    Corpus([Document(id=d.id, title="study " + d.id, abstract=d.abstract) for d in corpus]),
    ${JSON.stringify(poolPath)},
)
print(json.dumps({d.id: d.label for d in corpus}))
`,
    ],
    { encoding: "utf-8" },
  );
  if (fixture.status !== 0) throw new Error(`fixture generation failed: ${fixture.stderr}`);
  gold = JSON.parse(fixture.stdout.trim()) as Record<string, 0 | 1>;

  server = spawn(
    PYTHON,
    ["-m", "litscreen.cli", "serve", "--data-dir", dataDir, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      await fetch(`${BASE}/docs`);
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("service did not come up");
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
}, 90_000);

afterAll(() => {
  server?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

describe("scripted review session", () => {
  it("completes 8 batches of 25 with a faithful chart and export", async () => {
    const api = new ApiClient(BASE, flakyFetch);
    const sessionId = await api.createSession("pool.jsonl", "bow", "naive", {
      batch_size: BATCH_SIZE,
      seed: 3,
    });

    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    const store = new SessionStore(api, sessionId, { retryDelayMs: 50 });
    new ReviewView(root, store);
    await store.start();

    let outageExercised = false;
    for (let batch = 0; batch < BATCHES; batch += 1) {
      const expectedIteration = batch + 1;
      // wait until the view shows this round's batch, not a stale one
      await waitFor(
        () =>
          store.getState().batch?.iteration === expectedIteration &&
          root.querySelectorAll(".card").length === BATCH_SIZE,
      );
      const cards = [...root.querySelectorAll(".card")] as HTMLElement[];
      expect(cards).toHaveLength(BATCH_SIZE);

      if (batch === 3) {
        // simulated outage for the first half of this batch's decisions
        offline = true;
      }
      for (const [index, card] of cards.entries()) {
        const docId = card.dataset.docId!;
        const label = gold[docId]!;
        const button = card.querySelector<HTMLButtonElement>(label === 1 ? ".include" : ".exclude")!;
        button.click();
        if (batch === 3 && index === 11) {
          await waitFor(() => store.pendingDeliveries >= 1);
          expect(store.getState().offline || store.pendingDeliveries > 0).toBe(true);
          offline = false;
          outageExercised = true;
        }
      }
      // all decisions of this batch delivered and the server committed it
      await waitFor(
        () => store.pendingDeliveries === 0 && (store.getState().progress?.iteration ?? 0) >= expectedIteration,
      );
      const progress = store.getState().progress!;
      expect(progress.screened).toBe(expectedIteration * BATCH_SIZE);
    }
    expect(outageExercised).toBe(true);

    await waitFor(() => store.getState().complete);
    expect(root.querySelector("#completion")).not.toBeNull();

    // chart point count equals completed batches (observable via the canvas data attribute)
    const canvas = root.querySelector("#chart") as HTMLCanvasElement;
    expect(canvas.dataset.points).toBe(String(BATCHES));
    expect(store.getState().chart).toHaveLength(BATCHES);

    // the outage delivered every decision exactly once: 200 unique docs screened
    const progress = store.getState().progress!;
    expect(progress.screened).toBe(BATCHES * BATCH_SIZE);

    // exported CSV equals the server's trace byte for byte
    const viaStore = await store.exportTrace();
    const direct = await (await fetch(`${BASE}/sessions/${sessionId}/export`)).text();
    expect(viaStore).toBe(direct);
    const rows = viaStore.trim().split("\n").slice(1);
    expect(rows).toHaveLength(BATCHES * BATCH_SIZE);
    const ids = new Set(rows.map((r) => r.split(",")[1]));
    expect(ids.size).toBe(BATCHES * BATCH_SIZE);
    const relevantInTrace = rows.filter((r) => r.split(",")[5] === "1").length;
    expect(relevantInTrace).toBe(Object.values(gold).filter((v) => v === 1).length);
  }, 120_000);
});
