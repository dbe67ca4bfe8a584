// App bootstrap: annotator identity, tab routing, queue paging, verdict
// submission with optimistic updates and the offline retry loop.

import { ApiClient, ApiError } from "./api.js";
import { renderDashboards } from "./dashboards.js";
import { renderQueue } from "./queue.js";
import type { CandidateFilters, CandidateView, VerdictKind } from "./types.js";
import {
  AnnotatorIdentity,
  PendingStore,
  flushPending,
  validateVerdict,
} from "./verdict.js";

const identity = new AnnotatorIdentity(window.localStorage);
const pending = new PendingStore(window.localStorage);
const api = new ApiClient(() => identity.get());

const app = document.getElementById("app")!;
const banner = document.getElementById("banner")!;
const annotatorInput = document.getElementById("annotator") as HTMLInputElement;
const pendingBadge = document.getElementById("pending-badge")!;
const tabs = Array.from(document.querySelectorAll<HTMLButtonElement>("nav button"));

const filters: CandidateFilters = { page: 1, page_size: 10 };
let activeTab = "queue";

function showBanner(message: string, retry?: () => void): void {
  banner.replaceChildren();
  banner.hidden = false;
  const span = document.createElement("span");
  span.textContent = message;
  banner.appendChild(span);
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "retry";
    button.addEventListener("click", () => {
      banner.hidden = true;
      retry();
    });
    banner.appendChild(button);
  }
}

function updatePendingBadge(): void {
  const count = pending.size;
  pendingBadge.textContent = count ? `${count} unsent` : "";
}

async function submitVerdict(
  candidate: CandidateView,
  verdict: VerdictKind,
  type: string | undefined,
  proposedPattern: string | undefined,
): Promise<void> {
  const problem = validateVerdict(verdict, type);
  if (problem) {
    showBanner(problem);
    return;
  }
  const payload = {
    comment_id: candidate.comment_id,
    verdict,
    ...(type ? { type } : {}),
    ...(proposedPattern ? { proposed_pattern: proposedPattern } : {}),
  };
  // persist before sending: a crash or network failure must not lose it
  pending.enqueue(payload);
  updatePendingBadge();
  // optimistic update: drop the card, advance focus
  const card = app.querySelector<HTMLElement>(
    `[data-comment-id="${candidate.comment_id}"]`,
  );
  const next = card?.nextElementSibling as HTMLElement | null;
  card?.remove();
  next?.focus?.();
  try {
    await api.submitAnnotation(payload);
    pending.acknowledge(candidate.comment_id);
    updatePendingBadge();
  } catch (err) {
    const status = err instanceof ApiError ? err.status : 0;
    if (status >= 400 && status < 500) {
      // rejected by validation: do not retry it forever
      pending.acknowledge(candidate.comment_id);
      updatePendingBadge();
      showBanner(`verdict rejected: ${String(err)}`);
    } else {
      showBanner("verdict queued locally; the server is unreachable", () => {
        void retryPending();
      });
    }
    await loadQueue(); // card reverts into the queue on failure
  }
}

async function retryPending(): Promise<void> {
  const result = await flushPending(pending, api);
  updatePendingBadge();
  if (result.sent.length && activeTab === "queue") {
    await loadQueue();
  }
}

async function loadQueue(): Promise<void> {
  try {
    const page = await api.candidates(filters);
    renderQueue(app, page, { onSubmit: submitVerdict });
    banner.hidden = true;
  } catch (err) {
    showBanner(`could not load candidates: ${String(err)}`, () => {
      void loadQueue();
    });
  }
}

async function showTab(name: string): Promise<void> {
  activeTab = name;
  for (const tab of tabs) {
    tab.classList.toggle("active", tab.dataset.tab === name);
  }
  if (name === "queue") {
    await loadQueue();
  } else {
    await renderDashboards(app, api);
  }
}

function focusedCard(): HTMLElement | null {
  const focused = document.activeElement as HTMLElement | null;
  return focused?.closest?.("[data-comment-id]") ?? app.querySelector("[data-comment-id]");
}

document.addEventListener("keydown", (event) => {
  if (activeTab !== "queue") return;
  const target = event.target as HTMLElement;
  if (target.tagName === "INPUT" || target.tagName === "SELECT" || target.tagName === "TEXTAREA") {
    return;
  }
  const card = focusedCard() as (HTMLElement & { submitVerdict?: (v: VerdictKind) => void }) | null;
  if (!card) return;
  if (event.key === "s") {
    card.submitVerdict?.("SAAD");
  } else if (event.key === "n") {
    card.submitVerdict?.("NON_SAAD");
  } else if (event.key === "j" || event.key === "ArrowDown") {
    (card.nextElementSibling as HTMLElement | null)?.focus?.();
  } else if (event.key === "k" || event.key === "ArrowUp") {
    (card.previousElementSibling as HTMLElement | null)?.focus?.();
  }
});

annotatorInput.value = identity.get();
annotatorInput.addEventListener("change", () => {
  identity.set(annotatorInput.value.trim());
  void loadQueue();
});

for (const tab of tabs) {
  tab.addEventListener("click", () => void showTab(tab.dataset.tab ?? "queue"));
}

document.getElementById("prev-page")?.addEventListener("click", () => {
  filters.page = Math.max(1, (filters.page ?? 1) - 1);
  void loadQueue();
});
document.getElementById("next-page")?.addEventListener("click", () => {
  filters.page = (filters.page ?? 1) + 1;
  void loadQueue();
});
const patternFilter = document.getElementById("pattern-filter") as HTMLInputElement | null;
patternFilter?.addEventListener("change", () => {
  filters.pattern = patternFilter.value.trim() || undefined;
  filters.page = 1;
  void loadQueue();
});

updatePendingBadge();
window.setInterval(() => void retryPending(), 15000);
void showTab("queue");
