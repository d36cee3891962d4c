/** Session state for one record under review.
 *
 * The pending edit buffer is atomic: commit sends a single PATCH carrying the
 * version it was computed against, cancel discards everything. Navigation
 * (pan/zoom) never touches staged edits. On a version conflict the store
 * reloads the server's peaks and keeps only the staged edits that still make
 * sense, handing the dropped ones back for user confirmation.
 */

import { ConflictError } from "./api.js";
import type {
  AnalyzeRequest,
  OutlierAction,
  PeaksPayload,
  PlanMode,
  PsdMethod,
  RecordSummary,
  ReportDto,
} from "./types.js";

/** The slice of the API client the store needs (ApiClient satisfies it). */
export interface SessionApi {
  getRecord(id: string): Promise<RecordSummary>;
  getPeaks(id: string): Promise<PeaksPayload>;
  patchPeaks(
    id: string,
    edits: { add: number[]; remove: number[]; expected_version: number },
  ): Promise<PeaksPayload & { peak_count: number }>;
  analyze(id: string, body: AnalyzeRequest): Promise<ReportDto[]>;
}

export interface AnalysisSettings {
  mode: PlanMode;
  n: number;
  m: number;
  outlierThreshold: number;
  outlierAction: OutlierAction;
  psdMethod: PsdMethod;
}

export const DEFAULT_SETTINGS: AnalysisSettings = {
  mode: "single",
  n: 1,
  m: 1,
  outlierThreshold: 0.2,
  outlierAction: "remove",
  psdMethod: "lomb",
};

export interface ConflictResolution {
  keptAdds: number[];
  keptRemoves: number[];
  droppedAdds: number[];
  droppedRemoves: number[];
  serverVersion: number;
}

export interface CommitOutcome {
  committed: boolean;
  conflict?: ConflictResolution;
}

export class SessionStore {
  recordId = "";
  readOnly = false;
  totalSamples = 0;
  fs = 0;

  peaks: number[] = [];
  version = -1;

  stagedAdds: number[] = [];
  stagedRemoves: number[] = [];

  visibleStart = 0;
  visibleEnd = 0;

  settings: AnalysisSettings = { ...DEFAULT_SETTINGS };
  lastReports: ReportDto[] = [];
  lastConflict: ConflictResolution | null = null;

  private listeners: Array<() => void> = [];

  constructor(private readonly api: SessionApi) {}

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async open(recordId: string): Promise<void> {
    const info = await this.api.getRecord(recordId);
    this.recordId = recordId;
    this.readOnly = info.kind === "rri";
    this.totalSamples = info.n_samples ?? 0;
    this.fs = info.fs ?? 0;
    this.visibleStart = 0;
    this.visibleEnd = this.totalSamples;
    this.stagedAdds = [];
    this.stagedRemoves = [];
    this.lastReports = [];
    this.lastConflict = null;
    if (!this.readOnly) {
      await this.refreshPeaks();
    }
    this.notify();
  }

  async refreshPeaks(): Promise<void> {
    const payload = await this.api.getPeaks(this.recordId);
    this.peaks = payload.peaks;
    this.version = payload.version;
    this.notify();
  }

  adoptDetection(peaks: number[], version: number): void {
    this.peaks = peaks;
    this.version = version;
    this.stagedAdds = [];
    this.stagedRemoves = [];
    this.lastConflict = null;
    this.notify();
  }

  // -- navigation (never touches the edit buffer) --

  setVisibleRange(start: number, end: number): void {
    const span = Math.max(2, Math.min(end - start, this.totalSamples));
    const clampedStart = Math.max(0, Math.min(start, this.totalSamples - span));
    this.visibleStart = Math.round(clampedStart);
    this.visibleEnd = Math.round(clampedStart + span);
    this.notify();
  }

  zoom(factor: number, centerSample: number): void {
    const span = (this.visibleEnd - this.visibleStart) * factor;
    const ratio =
      (centerSample - this.visibleStart) / (this.visibleEnd - this.visibleStart);
    this.setVisibleRange(centerSample - span * ratio, centerSample - span * ratio + span);
  }

  pan(deltaSamples: number): void {
    this.setVisibleRange(this.visibleStart + deltaSamples, this.visibleEnd + deltaSamples);
  }

  // -- staged edits --

  stageAdd(sample: number): void {
    if (this.readOnly) throw new Error("record is read-only (RRI input)");
    sample = Math.round(sample);
    if (sample < 0 || sample >= this.totalSamples) {
      throw new Error(`sample ${sample} outside the record`);
    }
    const removeIdx = this.stagedRemoves.indexOf(sample);
    if (removeIdx >= 0) {
      // re-adding a staged removal just un-stages it
      this.stagedRemoves.splice(removeIdx, 1);
      this.notify();
      return;
    }
    if (this.peaks.includes(sample) || this.stagedAdds.includes(sample)) return;
    this.stagedAdds.push(sample);
    this.stagedAdds.sort((a, b) => a - b);
    this.notify();
  }

  stageRemove(peak: number): void {
    if (this.readOnly) throw new Error("record is read-only (RRI input)");
    const addIdx = this.stagedAdds.indexOf(peak);
    if (addIdx >= 0) {
      // removing a staged addition undoes the stage
      this.stagedAdds.splice(addIdx, 1);
      this.notify();
      return;
    }
    if (!this.peaks.includes(peak) || this.stagedRemoves.includes(peak)) return;
    this.stagedRemoves.push(peak);
    this.stagedRemoves.sort((a, b) => a - b);
    this.notify();
  }

  cancelEdits(): void {
    this.stagedAdds = [];
    this.stagedRemoves = [];
    this.notify();
  }

  hasPendingEdits(): boolean {
    return this.stagedAdds.length > 0 || this.stagedRemoves.length > 0;
  }

  /** Committed peaks with staged edits applied — what the plot shows. */
  effectivePeaks(): number[] {
    const removed = new Set(this.stagedRemoves);
    return [...this.peaks.filter((p) => !removed.has(p)), ...this.stagedAdds].sort(
      (a, b) => a - b,
    );
  }

  /** Send the whole buffer as one PATCH. On a version conflict, reload the
   * server's peaks, keep the still-applicable staged edits, and surface the
   * dropped ones for confirmation. */
  async commit(): Promise<CommitOutcome> {
    if (!this.hasPendingEdits()) return { committed: false };
    try {
      const result = await this.api.patchPeaks(this.recordId, {
        add: this.stagedAdds,
        remove: this.stagedRemoves,
        expected_version: this.version,
      });
      this.peaks = result.peaks;
      this.version = result.version;
      this.stagedAdds = [];
      this.stagedRemoves = [];
      this.lastConflict = null;
      this.notify();
      return { committed: true };
    } catch (error) {
      if (!(error instanceof ConflictError)) throw error;
      const payload = await this.api.getPeaks(this.recordId);
      const current = new Set(payload.peaks);
      const resolution: ConflictResolution = {
        keptAdds: this.stagedAdds.filter((s) => !current.has(s)),
        keptRemoves: this.stagedRemoves.filter((s) => current.has(s)),
        droppedAdds: this.stagedAdds.filter((s) => current.has(s)),
        droppedRemoves: this.stagedRemoves.filter((s) => !current.has(s)),
        serverVersion: payload.version,
      };
      this.peaks = payload.peaks;
      this.version = payload.version;
      this.stagedAdds = resolution.keptAdds;
      this.stagedRemoves = resolution.keptRemoves;
      this.lastConflict = resolution;
      this.notify();
      return { committed: false, conflict: resolution };
    }
  }

  // -- analysis --

  analyzeRequest(): AnalyzeRequest {
    return {
      mode: this.settings.mode,
      n: this.settings.n,
      m: this.settings.m,
      outlier_threshold: this.settings.outlierThreshold,
      outlier_action: this.settings.outlierAction,
      psd_method: this.settings.psdMethod,
    };
  }

  async analyze(): Promise<ReportDto[]> {
    const reports = await this.api.analyze(this.recordId, this.analyzeRequest());
    this.lastReports = reports;
    this.notify();
    return reports;
  }
}
