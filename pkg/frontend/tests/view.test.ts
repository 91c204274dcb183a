// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { bindKeyboard } from "../src/keyboard.js";
import { SessionStore } from "../src/store.js";
import { ReviewView } from "../src/view.js";
import type { BatchDoc } from "../src/types.js";

function doc(id: string, relevance: number | null, novelty: number | null): BatchDoc {
  return { id, title: `Title ${id}`, abstract: `Abstract ${id}`, relevance, novelty };
}

function stubApi(options: {
  docs: BatchDoc[];
  complete?: boolean;
  screened?: number;
  phase?: "novelty" | "relevance_only";
}): ApiClient {
  return new ApiClient("", async (input) => {
    const url = new URL(input, "http://test");
    if (url.pathname.endsWith("/batch")) {
      return new Response(
        JSON.stringify({ iteration: 1, docs: options.docs, complete: options.complete ?? false }),
        { status: 200 },
      );
    }
    if (url.pathname.endsWith("/progress")) {
      return new Response(
        JSON.stringify({
          screened: options.screened ?? 0,
          total: 50,
          relevant_found: 3,
          phase: options.phase ?? "novelty",
          topics_found: 2,
          iteration: 0,
        }),
        { status: 200 },
      );
    }
    if (url.pathname.endsWith("/export")) {
      return new Response("iteration,doc_id\n", { status: 200 });
    }
    return new Response(JSON.stringify({ detail: "nope" }), { status: 404 });
  });
}

function mount(api: ApiClient, blind = false) {
  document.body.innerHTML = '<main id="app"></main>';
  const root = document.getElementById("app")!;
  const store = new SessionStore(api, "s1", { blind });
  const view = new ReviewView(root, store);
  return { root, store, view };
}

describe("ReviewView", () => {
  it("renders one card per batch document in server order", async () => {
    const docs = Array.from({ length: 25 }, (_, i) => doc(`d${String(i).padStart(2, "0")}`, 0.9 - i * 0.01, 0.5));
    const { root, store } = mount(stubApi({ docs }));
    await store.start();
    const cards = root.querySelectorAll(".card");
    expect(cards).toHaveLength(25);
    expect([...cards].map((c) => (c as HTMLElement).dataset.docId)).toEqual(docs.map((d) => d.id));
  });

  it("shows the novelty badge only when the server sent a novelty score", async () => {
    const { root, store } = mount(stubApi({ docs: [doc("a", 0.8, 0.7), doc("b", 0.6, null)] }));
    await store.start();
    const cards = root.querySelectorAll(".card");
    expect(cards[0]!.querySelector(".badge-novelty")).not.toBeNull();
    expect(cards[1]!.querySelector(".badge-novelty")).toBeNull();
  });

  it("hides score badges in blinded mode", async () => {
    const { root, store } = mount(stubApi({ docs: [doc("a", 0.8, 0.7)] }), true);
    await store.start();
    expect(root.querySelector(".badge")).toBeNull();
  });

  it("shows the completion screen with an export control on an empty pool", async () => {
    const { root, store } = mount(stubApi({ docs: [], complete: true, screened: 50 }));
    await store.start();
    expect(root.querySelector("#completion")).not.toBeNull();
    expect(root.querySelector("#export")).not.toBeNull();
    expect(root.querySelector("#queue")).toBeNull();
  });

  it("shows a reconnect prompt when the session is gone", async () => {
    const api = new ApiClient("", async () =>
      new Response(JSON.stringify({ detail: "unknown session" }), { status: 404 }),
    );
    const { root, store } = mount(api);
    await store.start();
    expect(root.querySelector("#reconnect")).not.toBeNull();
  });

  it("routes keyboard shortcuts through to decisions", async () => {
    const received: string[] = [];
    const api = new ApiClient("", async (input, init) => {
      const url = new URL(input, "http://test");
      if (url.pathname.endsWith("/labels")) {
        const body = JSON.parse(String(init?.body)) as { labels: { id: string; label: number }[] };
        received.push(`${body.labels[0]!.id}:${body.labels[0]!.label}`);
        return new Response(JSON.stringify({ accepted: 1, remaining_in_batch: 1 }), { status: 200 });
      }
      if (url.pathname.endsWith("/batch")) {
        return new Response(
          JSON.stringify({ iteration: 1, docs: [doc("a", 0.5, null), doc("b", 0.4, null)] }),
          { status: 200 },
        );
      }
      return new Response(
        JSON.stringify({ screened: 0, total: 2, relevant_found: 0, phase: "novelty", topics_found: 0, iteration: 0 }),
        { status: 200 },
      );
    });
    const { store, view } = mount(api);
    bindKeyboard(document, {
      onInclude: () => store.decideSelected("include"),
      onExclude: () => store.decideSelected("exclude"),
      onMoveUp: () => store.moveSelection(-1),
      onMoveDown: () => store.moveSelection(1),
      onExport: () => void view,
    });
    await store.start();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "i", bubbles: true }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowDown", bubbles: true }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "e", bubbles: true }));
    await new Promise((resolve) => setTimeout(resolve, 10));
    expect(received).toEqual(["a:1", "b:0"]);
  });

  it("keeps the chart point count observable without a canvas context", async () => {
    const { root, store } = mount(stubApi({ docs: [doc("a", 0.5, null)] }));
    await store.start();
    const canvas = root.querySelector("#chart") as HTMLCanvasElement;
    expect(canvas.dataset.points).toBe("0");
  });
});
