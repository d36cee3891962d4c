/** Payload shapes of the review server's JSON API. */

export interface RecordSummary {
  record_id: string;
  kind: "ecg" | "rri";
  fs: number | null;
  n_samples: number | null;
  n_intervals: number | null;
  peak_count: number | null;
  version: number | null;
}

export interface SignalChunk {
  record_id: string;
  start: number;
  end: number;
  total_samples: number;
  fs: number;
  decimated: boolean;
  indices: number[];
  values: number[];
}

export interface PeaksPayload {
  record_id: string;
  fs: number;
  version: number;
  peaks: number[];
}

export interface DetectRequest {
  baseline_remove?: boolean;
  segment?: [number, number] | null;
  threshold_fraction?: number;
  refractory_ms?: number;
  snap_window_ms?: number;
  snap_mode?: "none" | "local_max" | "local_min" | "auto";
}

export interface DetectResult {
  record_id: string;
  peak_count: number;
  version: number;
  peaks: number[];
}

export type PlanMode = "single" | "m_equals_n" | "all";
export type OutlierAction = "remove" | "spline" | "pchip" | "linear";
export type PsdMethod = "lomb" | "welch" | "fft" | "burg";

export interface AnalyzeRequest {
  mode: PlanMode;
  n: number;
  m: number;
  outlier_threshold: number;
  outlier_action: OutlierAction;
  psd_method: PsdMethod;
}

export interface IbiStatsDto {
  beat_count: number;
  original_total: number | null;
  abnormal: number | null;
  clean: number | null;
  clean_pct: number | null;
}

export interface ReportDto {
  record_id: string;
  n: number;
  m: number;
  metrics: Record<string, number | null>;
  ibi_stats: IbiStatsDto;
  not_computable: Record<string, string>;
  psd_method?: string;
  bands_hz?: Record<string, [number, number]>;
}

export interface UploadRequest {
  filename: string;
  content: string;
  kind: "ecg" | "rri";
  fs?: number;
  unit?: "s" | "ms";
  prefix?: string;
  postfix?: string;
}
