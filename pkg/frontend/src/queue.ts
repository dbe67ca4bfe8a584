// Candidate queue rendering: one card per detection with code context,
// highlighted pattern spans, verdict controls and the pattern-proposal
// input. Submission behaviour (optimistic removal, revert on failure) is
// driven by the callbacks the app passes in.

import { segmentText } from "./highlight.js";
import type { CandidatePage, CandidateView, VerdictKind } from "./types.js";
import { TAXONOMY_TYPES } from "./types.js";
import { validateVerdict } from "./verdict.js";

export interface QueueCallbacks {
  onSubmit(
    candidate: CandidateView,
    verdict: VerdictKind,
    type: string | undefined,
    proposedPattern: string | undefined,
  ): Promise<void>;
}

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

function renderContext(lines: string[], cls: string): HTMLElement {
  const pre = el("pre", `context ${cls}`);
  pre.textContent = lines.join("\n");
  return pre;
}

function renderHighlightedText(candidate: CandidateView): HTMLElement {
  const holder = el("p", "comment-text");
  for (const segment of segmentText(candidate.text, candidate.pattern_spans)) {
    if (segment.highlighted) {
      const mark = el("mark", "pattern-hit", segment.text);
      mark.title = segment.patterns.join(", ");
      holder.appendChild(mark);
    } else {
      holder.appendChild(document.createTextNode(segment.text));
    }
  }
  return holder;
}

export function renderCard(
  candidate: CandidateView,
  callbacks: QueueCallbacks,
): HTMLElement {
  const card = el("article", "card");
  card.dataset.commentId = candidate.comment_id;
  card.tabIndex = 0;

  const location = el(
    "header",
    "card-location",
    `${candidate.project_id} · ${candidate.file_path}:${candidate.start_line} · ${candidate.kind}`,
  );
  card.appendChild(location);
  if (candidate.context_before.length) {
    card.appendChild(renderContext(candidate.context_before, "before"));
  }
  card.appendChild(renderHighlightedText(candidate));
  if (candidate.context_after.length) {
    card.appendChild(renderContext(candidate.context_after, "after"));
  }

  const meta = el("div", "card-meta");
  for (const t of candidate.types) {
    meta.appendChild(el("span", "chip type-chip", t));
  }
  if (candidate.existing_aging) {
    meta.appendChild(el("span", "chip tag-chip", "@deprecated"));
  }
  card.appendChild(meta);

  const controls = el("div", "controls");
  const typeSelect = el("select", "type-select");
  typeSelect.appendChild(new Option("debt type…", ""));
  for (const t of TAXONOMY_TYPES) {
    typeSelect.appendChild(new Option(t.label, t.value));
  }
  if (candidate.types.length === 1) {
    typeSelect.value = candidate.types[0];
  }
  const proposal = el("input", "proposal");
  proposal.placeholder = "propose a new pattern (optional)";
  const error = el("p", "inline-error");
  error.hidden = true;

  const submit = async (verdict: VerdictKind) => {
    const type = verdict === "SAAD" ? typeSelect.value || undefined : undefined;
    const problem = validateVerdict(verdict, type);
    if (problem) {
      error.textContent = problem;
      error.hidden = false;
      return;
    }
    error.hidden = true;
    await callbacks.onSubmit(
      candidate,
      verdict,
      type,
      proposal.value.trim() || undefined,
    );
  };

  const saadButton = el("button", "verdict saad", "SAAD");
  saadButton.addEventListener("click", () => void submit("SAAD"));
  const nonSaadButton = el("button", "verdict non-saad", "NON-SAAD");
  nonSaadButton.addEventListener("click", () => void submit("NON_SAAD"));

  controls.append(typeSelect, saadButton, nonSaadButton, proposal);
  card.appendChild(controls);
  card.appendChild(error);
  (card as HTMLElement & { submitVerdict?: (v: VerdictKind) => void }).submitVerdict =
    (verdict) => void submit(verdict);
  return card;
}

export function renderQueue(
  container: HTMLElement,
  page: CandidatePage,
  callbacks: QueueCallbacks,
): void {
  container.replaceChildren();
  if (page.items.length === 0) {
    const done = el("div", "queue-complete");
    done.append(
      el("h2", undefined, "Queue complete"),
      el("p", undefined, "No candidates left for this filter and annotator."),
    );
    container.appendChild(done);
    return;
  }
  for (const candidate of page.items) {
    container.appendChild(renderCard(candidate, callbacks));
  }
  const status = el(
    "p",
    "page-status",
    `page ${page.page} of ${page.total_pages} (${page.total} candidates)`,
  );
  container.appendChild(status);
}
