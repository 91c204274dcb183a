/**
 * DOM rendering: a progress header, the live chart, and the review queue
 * in server rank order. Every number shown comes from a server response
 * carried in the store state.
 */

import { renderChart } from "./chart.js";
import type { SessionStore, StoreState } from "./store.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function scoreBadge(kind: string, value: number | null): HTMLElement | null {
  if (value === null) return null;
  return el("span", `badge badge-${kind}`, `${kind} ${value.toFixed(3)}`);
}

export class ReviewView {
  private readonly root: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly store: SessionStore,
  ) {
    this.root = root;
    store.subscribe((state) => this.render(state));
  }

  render(state: StoreState): void {
    this.root.textContent = "";
    this.root.append(this.header(state));

    if (state.sessionExpired) {
      const prompt = el("div", "reconnect", "Session not found.");
      const button = el("button", "", "Reconnect");
      button.id = "reconnect";
      button.addEventListener("click", () => void this.store.start());
      prompt.append(button);
      this.root.append(prompt);
      return;
    }

    this.root.append(this.chartSection(state));

    if (state.complete) {
      this.root.append(this.completionScreen());
      return;
    }
    this.root.append(this.queue(state));
  }

  private header(state: StoreState): HTMLElement {
    const header = el("header");
    const progress = state.progress;
    const summary = progress
      ? `${progress.screened} / ${progress.total} screened, ` +
        `${progress.relevant_found} relevant found, phase ${progress.phase}` +
        (progress.phase === "novelty" ? ` (${progress.topics_found} topics)` : "")
      : "loading session";
    const line = el("div", "progress-line", summary);
    line.id = "progress-line";
    header.append(line);
    if (state.offline) {
      const banner = el("div", "offline-banner", "offline: decisions are queued and will be retried");
      banner.id = "offline-banner";
      header.append(banner);
    }
    if (state.notice) {
      const notice = el("div", "notice", state.notice);
      notice.id = "notice";
      header.append(notice);
    }
    return header;
  }

  private chartSection(state: StoreState): HTMLElement {
    const section = el("section", "chart");
    const canvas = el("canvas");
    canvas.id = "chart";
    canvas.width = 560;
    canvas.height = 220;
    renderChart(canvas, state.chart, state.progress?.total ?? 0);
    section.append(canvas);
    return section;
  }

  private completionScreen(): HTMLElement {
    const done = el("section", "complete");
    done.id = "completion";
    done.append(el("h2", "", "Screening complete"));
    const exportLink = el("button", "", "Export trace CSV");
    exportLink.id = "export";
    exportLink.addEventListener("click", () => void this.downloadTrace());
    done.append(exportLink);
    return done;
  }

  private queue(state: StoreState): HTMLElement {
    const list = el("section", "queue");
    list.id = "queue";
    const docs = state.batch?.docs ?? [];
    docs.forEach((doc, index) => {
      const card = el("article", "card");
      card.dataset.docId = doc.id;
      card.dataset.status = state.cardStatus.get(doc.id) ?? "pending";
      if (index === state.selected) card.classList.add("selected");

      const title = el("h3", "", doc.title || "(untitled)");
      const badges = el("div", "badges");
      if (!state.blind) {
        const relevance = scoreBadge("relevance", doc.relevance);
        const novelty = scoreBadge("novelty", doc.novelty);
        if (relevance) badges.append(relevance);
        if (novelty) badges.append(novelty);
      }
      const abstract = el("p", "abstract", doc.abstract);
      const decision = state.decisions.get(doc.id);
      const status = el(
        "div",
        "status",
        decision ? `${decision.decision} (${card.dataset.status})` : "awaiting decision",
      );

      const actions = el("div", "actions");
      const include = el("button", "include", "Include (i)");
      include.addEventListener("click", () => this.store.decide(doc.id, "include"));
      const exclude = el("button", "exclude", "Exclude (e)");
      exclude.addEventListener("click", () => this.store.decide(doc.id, "exclude"));
      actions.append(include, exclude);

      card.append(title, badges, abstract, status, actions);
      list.append(card);
    });
    return list;
  }

  async downloadTrace(): Promise<void> {
    const csv = await this.store.exportTrace();
    const blob = new Blob([csv], { type: "text/csv" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "screening-trace.csv";
    link.click();
    URL.revokeObjectURL(link.href);
  }
}
