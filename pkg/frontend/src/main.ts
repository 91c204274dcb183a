/**
 * Bootstrap: read ?session= (and optional ?api=, ?blind=1) from the URL,
 * or show a small create-session form, then mount the review view.
 */

import { ApiClient } from "./api.js";
import { bindKeyboard } from "./keyboard.js";
import { SessionStore } from "./store.js";
import { ReviewView } from "./view.js";

function mount(root: HTMLElement, api: ApiClient, sessionId: string, blind: boolean): SessionStore {
  const store = new SessionStore(api, sessionId, { blind });
  const view = new ReviewView(root, store);
  bindKeyboard(document, {
    onInclude: () => store.decideSelected("include"),
    onExclude: () => store.decideSelected("exclude"),
    onMoveUp: () => store.moveSelection(-1),
    onMoveDown: () => store.moveSelection(1),
    onExport: () => void view.downloadTrace(),
  });
  void store.start();
  return store;
}

function createSessionForm(root: HTMLElement, api: ApiClient, blind: boolean): void {
  const form = document.createElement("form");
  form.innerHTML = `
    <h2>Start a screening session</h2>
    <label>Corpus path <input name="corpus" placeholder="pool.jsonl" required></label>
    <label>Features
      <select name="model">
        <option>bow</option><option>lda</option><option>pv</option>
        <option>pv_tm</option><option>bow_tm</option>
      </select>
    </label>
    <label>Strategy
      <select name="strategy">
        <option>ig</option><option>naive</option><option>lc</option>
      </select>
    </label>
    <label>Batch size <input name="batch" type="number" value="25"></label>
    <button type="submit">Create</button>
  `;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void api
      .createSession(
        String(data.get("corpus")),
        String(data.get("model")),
        String(data.get("strategy")),
        { batch_size: Number(data.get("batch")) },
      )
      .then((sessionId) => {
        const url = new URL(window.location.href);
        url.searchParams.set("session", sessionId);
        window.history.replaceState(null, "", url);
        root.textContent = "";
        mount(root, api, sessionId, blind);
      })
      .catch((error) => {
        const message = document.createElement("div");
        message.className = "notice";
        message.textContent = String(error);
        form.append(message);
      });
  });
  root.append(form);
}

export function boot(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const blind = params.get("blind") === "1";
  const sessionId = params.get("session");
  if (sessionId) mount(root, api, sessionId, blind);
  else createSessionForm(root, api, blind);
}

const root = document.getElementById("app");
if (root) boot(root);
