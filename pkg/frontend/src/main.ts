// DOM wiring for the labeling UI. Served from the same origin as the API.

import { ApiClient, TaskSummary } from "./api.js";
import { renderChart } from "./chart.js";
import { metricRows, progressSegments, retrainEnabled, taskLine } from "./dashboard.js";
import { LabelSession } from "./session.js";

const POLL_MS = 2000;
const MIN_LABELS = 10;

const api = new ApiClient("");
let session: LabelSession | null = null;
let activeTask: string | null = null;
let pollTimer: number | undefined;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setError(message: string | null): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

function renderDoc(): void {
  const card = el<HTMLDivElement>("doc-card");
  const textBox = el<HTMLPreElement>("doc-text");
  const meta = el<HTMLSpanElement>("doc-meta");
  const doc = session?.current ?? null;
  if (doc === null) {
    card.classList.add("empty");
    textBox.textContent = activeTask ? "Queue drained — nothing left to label." : "";
    meta.textContent = "";
    return;
  }
  card.classList.remove("empty");
  textBox.textContent = doc.text;
  meta.textContent = `${doc.docId} · cycle ${doc.cycleIndex}${doc.skipped ? " · skipped earlier" : ""}`;
}

function renderProgress(): void {
  if (session === null) return;
  const counts = session.progress();
  el<HTMLSpanElement>("session-counts").textContent =
    `${counts.labeled} labeled, ${counts.skipped} skipped this session`;
}

async function refreshTasks(): Promise<void> {
  let tasks: TaskSummary[];
  try {
    tasks = await api.listTasks();
  } catch (err) {
    setError(err instanceof Error ? err.message : String(err));
    return;
  }
  const list = el<HTMLUListElement>("task-list");
  list.innerHTML = "";
  for (const task of tasks) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = taskLine(task);
    button.addEventListener("click", () => selectTask(task.task_name));
    if (task.task_name === activeTask) item.classList.add("active");
    item.appendChild(button);
    item.appendChild(progressBar(task));
    list.appendChild(item);
  }
}

function progressBar(task: TaskSummary): HTMLDivElement {
  const seg = progressSegments(task);
  const bar = document.createElement("div");
  bar.className = "progress";
  for (const [cls, frac] of [
    ["yes", seg.yesFraction],
    ["no", seg.noFraction],
    ["rest", seg.unlabeledFraction],
  ] as const) {
    const piece = document.createElement("span");
    piece.className = cls;
    piece.style.width = `${(frac * 100).toFixed(1)}%`;
    bar.appendChild(piece);
  }
  return bar;
}

async function refreshStatus(): Promise<void> {
  if (activeTask === null) return;
  try {
    const status = await api.status(activeTask);
    el<HTMLSpanElement>("training-badge").hidden = !status.training_in_progress;
    const retrain = el<HTMLButtonElement>("retrain-btn");
    retrain.disabled = !retrainEnabled(status, MIN_LABELS);
    setError(null);
  } catch (err) {
    setError(err instanceof Error ? err.message : String(err));
  }
}

async function refreshMetrics(): Promise<void> {
  if (activeTask === null) return;
  const metrics = await api.metrics(activeTask);
  const table = el<HTMLTableElement>("metrics-table");
  table.innerHTML = "";
  for (const [name, value] of metricRows(metrics)) {
    const row = table.insertRow();
    row.insertCell().textContent = name;
    row.insertCell().textContent = value;
  }
  const svg = el<HTMLElement>("chart") as unknown as SVGSVGElement;
  renderChart(svg, metrics.convergence.map((p) => ({ labels: p.labels, auc: p.auc })));
}

async function selectTask(name: string): Promise<void> {
  activeTask = name;
  session = new LabelSession(api, name);
  el<HTMLHeadingElement>("active-task").textContent = name;
  el<HTMLAnchorElement>("export-link").href = api.exportUrl(name);
  await session.advance();
  renderDoc();
  renderProgress();
  await Promise.all([refreshStatus(), refreshMetrics(), refreshTasks()]);
}

async function judge(cls: "yes" | "no"): Promise<void> {
  if (session === null || session.current === null) return;
  const ack = await session.label(cls);
  setError(session.lastError);
  renderDoc();
  renderProgress();
  if (ack !== null) void refreshStatus();
}

async function skip(): Promise<void> {
  if (session === null || session.current === null) return;
  await session.skip();
  setError(session.lastError);
  renderDoc();
  renderProgress();
}

function bind(): void {
  el<HTMLButtonElement>("yes-btn").addEventListener("click", () => void judge("yes"));
  el<HTMLButtonElement>("no-btn").addEventListener("click", () => void judge("no"));
  el<HTMLButtonElement>("skip-btn").addEventListener("click", () => void skip());
  el<HTMLButtonElement>("retrain-btn").addEventListener("click", async () => {
    if (activeTask === null) return;
    try {
      await api.retrain(activeTask);
    } catch (err) {
      setError(err instanceof Error ? err.message : String(err));
    }
    void refreshStatus();
  });
  document.addEventListener("keydown", (ev) => {
    if (ev.target instanceof HTMLInputElement) return;
    if (ev.key === "y") void judge("yes");
    else if (ev.key === "n") void judge("no");
    else if (ev.key === "s") void skip();
  });
  pollTimer = window.setInterval(() => {
    void refreshStatus();
    void refreshMetrics();
    void refreshTasks();
  }, POLL_MS);
}

export function start(): void {
  bind();
  void refreshTasks();
}

if (typeof document !== "undefined" && document.getElementById("task-list")) {
  start();
}

export { pollTimer };
