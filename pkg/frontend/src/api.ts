// Typed client for the labeling service HTTP API.

export interface TaskStatus {
  cycle_index: number;
  labels_total: number;
  training_in_progress: boolean;
  queue_depth: number;
}

export interface TaskSummary {
  task_name: string;
  yes_count: number;
  no_count: number;
  total_documents: number;
  status: TaskStatus;
}

export interface QueueItem {
  done: boolean;
  doc_id?: string;
  text?: string;
  cycle_index?: number;
}

export interface MetricPair {
  mean: number;
  half_width: number;
}

export interface MetricsResponse {
  report: {
    accuracy: MetricPair;
    precision: MetricPair;
    recall: MetricPair;
    auc_roc: MetricPair;
    yes_count: number;
    no_count: number;
    degenerate_auc: boolean;
  } | null;
  convergence: { cycle: number; labels: number; auc: number }[];
}

export interface LabelAck {
  labels_total: number;
  cycle_index: number;
  training_in_progress: boolean;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let message = `HTTP ${resp.status}`;
      try {
        const body = await resp.json();
        if (body && body.message) message = body.message;
      } catch {
        // non-JSON error body
      }
      throw new Error(message);
    }
    return (await resp.json()) as T;
  }

  listTasks(): Promise<TaskSummary[]> {
    return this.request("/tasks");
  }

  createTask(taskName: string): Promise<unknown> {
    return this.request("/tasks", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ task_name: taskName }),
    });
  }

  deleteTask(taskName: string): Promise<unknown> {
    return this.request(`/tasks/${encodeURIComponent(taskName)}`, {
      method: "DELETE",
    });
  }

  nextDocument(taskName: string): Promise<QueueItem> {
    return this.request(`/tasks/${encodeURIComponent(taskName)}/queue/next`);
  }

  submitLabel(
    taskName: string,
    docId: string,
    cls: "yes" | "no",
    annotator: string,
  ): Promise<LabelAck> {
    return this.request(`/tasks/${encodeURIComponent(taskName)}/annotations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ doc_id: docId, cls, annotator }),
    });
  }

  status(taskName: string): Promise<TaskStatus> {
    return this.request(`/tasks/${encodeURIComponent(taskName)}/status`);
  }

  metrics(taskName: string): Promise<MetricsResponse> {
    return this.request(`/tasks/${encodeURIComponent(taskName)}/metrics`);
  }

  retrain(taskName: string): Promise<TaskStatus> {
    return this.request(`/tasks/${encodeURIComponent(taskName)}/retrain`, {
      method: "POST",
    });
  }

  exportUrl(taskName: string): string {
    return `${this.base}/tasks/${encodeURIComponent(taskName)}/export.csv`;
  }
}
