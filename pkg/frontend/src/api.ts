// Thin typed client for the triage service. The annotator id travels in the
// X-Annotator header; the fetch implementation is injectable for tests.

import type {
  AgreementReport,
  AnnotationPayload,
  CandidateFilters,
  CandidatePage,
  FpDashboard,
  IterationRow,
  SubmitAck,
} from "./types.js";

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly annotator: () => string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = "",
  ) {}

  candidatesUrl(filters: CandidateFilters): string {
    const params = new URLSearchParams();
    if (filters.pattern) params.set("pattern", filters.pattern);
    if (filters.type) params.set("type", filters.type);
    if (filters.project) params.set("project", filters.project);
    if (filters.page) params.set("page", String(filters.page));
    if (filters.page_size) params.set("page_size", String(filters.page_size));
    const query = params.toString();
    return `${this.base}/api/candidates${query ? "?" + query : ""}`;
  }

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    const id = this.annotator();
    if (id) headers["X-Annotator"] = id;
    if (json) headers["Content-Type"] = "application/json";
    return headers;
  }

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(url, init);
    } catch (err) {
      throw new ApiError(0, `network failure: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  candidates(filters: CandidateFilters = {}): Promise<CandidatePage> {
    return this.request<CandidatePage>(this.candidatesUrl(filters), {
      headers: this.headers(false),
    });
  }

  submitAnnotation(payload: AnnotationPayload): Promise<SubmitAck> {
    return this.request<SubmitAck>(`${this.base}/api/annotations`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(payload),
    });
  }

  agreement(a: string, b: string): Promise<AgreementReport> {
    const params = new URLSearchParams({ a, b });
    return this.request<AgreementReport>(
      `${this.base}/api/agreement?${params.toString()}`,
      { headers: this.headers(false) },
    );
  }

  fpDashboard(): Promise<FpDashboard> {
    return this.request<FpDashboard>(`${this.base}/api/patterns/fp`, {
      headers: this.headers(false),
    });
  }

  iterations(): Promise<{ iterations: IterationRow[] }> {
    return this.request<{ iterations: IterationRow[] }>(
      `${this.base}/api/iterations`,
      { headers: this.headers(false) },
    );
  }
}
