// Dashboard view helpers: pure functions the DOM layer renders from.

import { MetricPair, MetricsResponse, TaskStatus, TaskSummary } from "./api.js";

export interface ProgressSegments {
  yesFraction: number;
  noFraction: number;
  unlabeledFraction: number;
}

export function progressSegments(task: TaskSummary): ProgressSegments {
  const total = Math.max(task.total_documents, 1);
  const yes = task.yes_count / total;
  const no = task.no_count / total;
  return {
    yesFraction: yes,
    noFraction: no,
    unlabeledFraction: Math.max(0, 1 - yes - no),
  };
}

/** One-line textual summary for a task row. */
export function taskLine(task: TaskSummary): string {
  const s = task.status;
  const training = s.training_in_progress ? ", training" : "";
  return (
    `${task.task_name}: ${s.labels_total}/${task.total_documents} labeled ` +
    `(${task.yes_count} yes, ${task.no_count} no), cycle ${s.cycle_index}${training}`
  );
}

/** "0.83 ± 0.04" or "–" when the metric is unavailable. */
export function formatMetric(pair: MetricPair | null | undefined): string {
  if (!pair) return "–";
  return `${pair.mean.toFixed(2)} ± ${pair.half_width.toFixed(2)}`;
}

export function metricRows(metrics: MetricsResponse): [string, string][] {
  const r = metrics.report;
  if (r === null) return [["model", "not trained yet"]];
  const rows: [string, string][] = [
    ["accuracy", formatMetric(r.accuracy)],
    ["precision", formatMetric(r.precision)],
    ["recall", formatMetric(r.recall)],
    ["AUC-ROC", formatMetric(r.auc_roc)],
  ];
  if (r.degenerate_auc) rows.push(["note", "single-class validation split"]);
  return rows;
}

/** Retrain is offered only when the engine is idle and has enough labels. */
export function retrainEnabled(status: TaskStatus, minLabels: number): boolean {
  return !status.training_in_progress && status.labels_total >= minLabels;
}
