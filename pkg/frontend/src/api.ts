/** Thin typed client for the review server. Every displayed number comes
 * back from these calls verbatim; the UI never recomputes analysis results. */

import type {
  AnalyzeRequest,
  DetectRequest,
  DetectResult,
  PeaksPayload,
  RecordSummary,
  ReportDto,
  SignalChunk,
  UploadRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

/** 409 from a stale PATCH; carries the server's current version. */
export class ConflictError extends ApiError {
  constructor(detail: string, readonly currentVersion: number) {
    super(409, detail);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      let payload: { detail?: unknown; current_version?: number } = {};
      try {
        payload = await response.json();
        if (payload.detail !== undefined) detail = JSON.stringify(payload.detail);
      } catch {
        /* non-JSON error body */
      }
      if (response.status === 409 && typeof payload.current_version === "number") {
        throw new ConflictError(detail, payload.current_version);
      }
      throw new ApiError(response.status, detail);
    }
    return response.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown, method = "POST"): Promise<T> {
    return this.request<T>(path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async listRecords(): Promise<RecordSummary[]> {
    const body = await this.request<{ records: RecordSummary[] }>("/api/records");
    return body.records;
  }

  upload(body: UploadRequest): Promise<RecordSummary> {
    return this.post("/api/records", body);
  }

  getRecord(id: string): Promise<RecordSummary> {
    return this.request(`/api/records/${encodeURIComponent(id)}`);
  }

  getSignal(id: string, start: number, end: number, maxPoints: number): Promise<SignalChunk> {
    const query = new URLSearchParams({
      start: String(start),
      end: String(end),
      max_points: String(maxPoints),
    });
    return this.request(`/api/records/${encodeURIComponent(id)}/signal?${query}`);
  }

  detect(id: string, body: DetectRequest): Promise<DetectResult> {
    return this.post(`/api/records/${encodeURIComponent(id)}/detect`, body);
  }

  getPeaks(id: string): Promise<PeaksPayload> {
    return this.request(`/api/records/${encodeURIComponent(id)}/peaks`);
  }

  patchPeaks(
    id: string,
    edits: { add: number[]; remove: number[]; expected_version: number },
  ): Promise<PeaksPayload & { peak_count: number }> {
    return this.post(`/api/records/${encodeURIComponent(id)}/peaks`, edits, "PATCH");
  }

  async analyze(id: string, body: AnalyzeRequest): Promise<ReportDto[]> {
    const out = await this.post<{ reports: ReportDto[] }>(
      `/api/records/${encodeURIComponent(id)}/analyze`,
      body,
    );
    return out.reports;
  }

  exportPeaksUrl(id: string): string {
    return `${this.baseUrl}/api/records/${encodeURIComponent(id)}/export/peaks`;
  }
}
