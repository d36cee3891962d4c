/** Results panel model: one tab per (n, m) plan, a metric table per tab,
 * and the IBI statistics block for the conventional (1, 1) analysis.
 * Values are rendered exactly as the server sent them. */

import type { ReportDto } from "./types.js";

export interface MetricRow {
  name: string;
  display: string;
}

export interface ResultsTab {
  label: string;
  n: number;
  m: number;
  rows: MetricRow[];
  ibiLines: string[];
}

export function formatMetric(value: number | null): string {
  if (value === null) return "NA";
  if (Number.isInteger(value)) return String(value);
  return value.toPrecision(6);
}

export function buildTabs(reports: ReportDto[]): ResultsTab[] {
  return reports.map((report) => ({
    label: `HR${report.n}V${report.m}`,
    n: report.n,
    m: report.m,
    rows: Object.entries(report.metrics).map(([name, value]) => ({
      name,
      display: formatMetric(value),
    })),
    ibiLines: ibiStatLines(report),
  }));
}

function ibiStatLines(report: ReportDto): string[] {
  const stats = report.ibi_stats;
  if (stats.original_total === null) {
    return [`beats: ${stats.beat_count}`];
  }
  return [
    `beats: ${stats.beat_count}`,
    `original intervals: ${stats.original_total}`,
    `abnormal intervals: ${stats.abnormal}`,
    `clean: ${stats.clean} (${(stats.clean_pct ?? 0).toFixed(1)}%)`,
  ];
}
