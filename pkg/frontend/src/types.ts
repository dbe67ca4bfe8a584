// Payload shapes of the triage service JSON API. Field names mirror the
// server responses exactly.

export type PatternSpan = [pattern: string, start: number, end: number];

export interface CandidateView {
  comment_id: string;
  text: string;
  kind: string;
  project_id: string;
  file_path: string;
  start_line: number;
  end_line: number;
  context_before: string[];
  context_after: string[];
  patterns: string[];
  features: string[];
  existing_aging: boolean;
  types: string[];
  pattern_spans: PatternSpan[];
  annotated: boolean;
}

export interface CandidatePage {
  items: CandidateView[];
  page: number;
  page_size: number;
  total: number;
  total_pages: number;
}

export interface CandidateFilters {
  pattern?: string;
  type?: string;
  project?: string;
  page?: number;
  page_size?: number;
}

export type VerdictKind = "SAAD" | "NON_SAAD";

export interface AnnotationPayload {
  comment_id: string;
  verdict: VerdictKind;
  type?: string;
  note?: string;
  proposed_pattern?: string;
}

export interface SubmitAck {
  ok: boolean;
  revision: number;
}

export interface AgreementReport {
  a: string;
  b: string;
  n_joint: number;
  kappa: number;
  contingency: Record<string, number>;
  comment_ids: string[];
}

export interface FpRow {
  pattern: string;
  type: string | null;
  status: string;
  annotated_matches: number;
  fp_rate: number | null;
  flagged: boolean;
}

export interface FpDashboard {
  fp_threshold: number;
  patterns: FpRow[];
}

export interface IterationRow {
  iteration_no: number;
  active_pattern_count: number;
  total_saad_detected: number;
  sample_size: number;
  precision: number;
  recall: number;
  f1: number;
  excluded_patterns: string[];
  stopped: boolean;
  proposed_pattern_fraction: number;
}

export const TAXONOMY_TYPES: { value: string; label: string }[] = [
  { value: "aging_maintenance", label: "Aging Maintenance" },
  { value: "legacy_backwards_compat", label: "Legacy & Backwards Compat" },
  { value: "updates_upgrades", label: "Updates & Upgrades" },
  { value: "current_deprecation", label: "Current Deprecation" },
  { value: "future_deprecation", label: "Future Deprecation" },
  { value: "non_maintenance", label: "Non-Maintenance" },
  { value: "current_obsolescence", label: "Current Obsolescence" },
  { value: "future_obsolescence", label: "Future Obsolescence" },
];
