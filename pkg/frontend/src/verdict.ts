// Verdict validation and the offline-safe pending queue: every verdict is
// written to local storage before the POST and removed only after the
// server acknowledges it, so nothing is lost on failure or reload.

import type { AnnotationPayload, VerdictKind } from "./types.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export function validateVerdict(
  verdict: VerdictKind,
  type: string | undefined,
): string | null {
  if (verdict === "SAAD" && !type) {
    return "pick a debt type before submitting a SAAD verdict";
  }
  if (verdict !== "SAAD" && verdict !== "NON_SAAD") {
    return `unknown verdict ${String(verdict)}`;
  }
  return null;
}

export interface PendingVerdict extends AnnotationPayload {
  queued_at: string;
}

const PENDING_KEY = "saad.pending";
const ANNOTATOR_KEY = "saad.annotator";

export class PendingStore {
  constructor(
    private readonly storage: StorageLike,
    private readonly key: string = PENDING_KEY,
  ) {}

  all(): PendingVerdict[] {
    const raw = this.storage.getItem(this.key);
    if (!raw) return [];
    try {
      const parsed = JSON.parse(raw) as PendingVerdict[];
      return Array.isArray(parsed) ? parsed : [];
    } catch {
      return [];
    }
  }

  enqueue(payload: AnnotationPayload, queuedAt: string = new Date().toISOString()): void {
    const rest = this.all().filter((p) => p.comment_id !== payload.comment_id);
    rest.push({ ...payload, queued_at: queuedAt });
    this.storage.setItem(this.key, JSON.stringify(rest));
  }

  acknowledge(commentId: string): void {
    const rest = this.all().filter((p) => p.comment_id !== commentId);
    if (rest.length === 0) {
      this.storage.removeItem(this.key);
    } else {
      this.storage.setItem(this.key, JSON.stringify(rest));
    }
  }

  get size(): number {
    return this.all().length;
  }
}

export class AnnotatorIdentity {
  constructor(private readonly storage: StorageLike) {}

  get(): string {
    return this.storage.getItem(ANNOTATOR_KEY) ?? "";
  }

  set(id: string): void {
    if (id) {
      this.storage.setItem(ANNOTATOR_KEY, id);
    } else {
      this.storage.removeItem(ANNOTATOR_KEY);
    }
  }
}

export interface Submitter {
  submitAnnotation(payload: AnnotationPayload): Promise<{ ok: boolean; revision: number }>;
}

export interface FlushResult {
  sent: string[];
  failed: string[];
}

// Replay queued verdicts; acknowledged ones leave the store, failures stay
// for the next attempt.
export async function flushPending(
  store: PendingStore,
  api: Submitter,
): Promise<FlushResult> {
  const result: FlushResult = { sent: [], failed: [] };
  for (const pending of store.all()) {
    const { queued_at: _queuedAt, ...payload } = pending;
    try {
      await api.submitAnnotation(payload);
      store.acknowledge(pending.comment_id);
      result.sent.push(pending.comment_id);
    } catch {
      result.failed.push(pending.comment_id);
    }
  }
  return result;
}
