"""Command line interface: ingest, serve, simulate, export, bootstrap-keywords.

Commands share a workspace directory holding the canonical dataset, the
append-only annotation log and per-task bootstrap settings, so the service can
be stopped and restarted without losing labels.
"""

import json
import pathlib
import socket
import sys

import click

from .corpus import AnnotationStore, Annotation, CorpusError, ingest_dataset, dataset_from_state, dataset_to_state
from .engine import Engine, EngineConfig, load_config
from .sim import (
    CorpusSpec,
    ExperimentConfig,
    make_synthetic_corpus,
    run_experiment,
    run_random_baseline,
)

DATASET_FILE = "dataset.json"
ANNOTATIONS_FILE = "annotations.jsonl"
TASKS_FILE = "tasks.json"


def _workspace(path):
    ws = pathlib.Path(path)
    ws.mkdir(parents=True, exist_ok=True)
    return ws


def _load_dataset(ws):
    path = ws / DATASET_FILE
    if not path.exists():
        raise click.ClickException(f"no ingested dataset in {ws}; run `ingest` first")
    return dataset_from_state(json.loads(path.read_text()))


def _load_tasks(ws):
    path = ws / TASKS_FILE
    return json.loads(path.read_text()) if path.exists() else {}


def _save_tasks(ws, tasks):
    (ws / TASKS_FILE).write_text(json.dumps(tasks, indent=2))


def _replay_annotations(ws, store):
    path = ws / ANNOTATIONS_FILE
    if not path.exists():
        return
    for line in path.read_text().splitlines():
        if line.strip():
            rec = json.loads(line)
            if rec["task_name"] not in store.tasks:
                store.create_task(rec["task_name"])
            ann = Annotation(**rec)
            store.log.append(ann)
            store.active[(ann.doc_id, ann.task_name)] = ann


@click.group()
def main():
    """Conformal active-learning engine."""


@main.command()
@click.argument("file", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv")
@click.option("--text-col", default="text", show_default=True)
@click.option("--id-col", default=None)
@click.option(
    "--truth-col",
    "truth_cols",
    multiple=True,
    help="task=column pairs mapping ground-truth columns (simulation only)",
)
@click.option("--workspace", default="./cal-workspace", show_default=True)
def ingest(file, fmt, text_col, id_col, truth_cols, workspace):
    """Ingest a CSV or JSONL file into the workspace."""
    truth_columns = {}
    for pair in truth_cols:
        if "=" not in pair:
            raise click.UsageError(f"--truth-col expects task=column, got {pair!r}")
        task, col = pair.split("=", 1)
        truth_columns[task] = col
    try:
        dataset = ingest_dataset(
            file, fmt, text_col, id_column=id_col, truth_columns=truth_columns or None
        )
    except CorpusError as exc:
        raise click.ClickException(str(exc))
    ws = _workspace(workspace)
    (ws / DATASET_FILE).write_text(json.dumps(dataset_to_state(dataset)))
    click.echo(f"ingested {len(dataset)} documents into {ws / DATASET_FILE}")


@main.command()
@click.argument("task")
@click.option("--terms", required=True, help="comma-separated keyword terms")
@click.option("--workspace", default="./cal-workspace", show_default=True)
def bootstrap_keywords(task, terms, workspace):
    """Mark a task to bootstrap from keyword matches on next serve."""
    ws = _workspace(workspace)
    tasks = _load_tasks(ws)
    tasks[task] = {
        "bootstrap": "keyword",
        "keywords": [t.strip() for t in terms.split(",") if t.strip()],
    }
    _save_tasks(ws, tasks)
    click.echo(f"task {task!r} will bootstrap from keywords {tasks[task]['keywords']}")


@main.command()
@click.option("--workspace", default="./cal-workspace", show_default=True)
@click.option("--config", "config_path", default=None, help="engine config (TOML/JSON)")
@click.option("--port", default=8000, show_default=True, envvar="CONFORMAL_AL_PORT")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, help="directory of built UI assets to serve at /ui")
def serve(workspace, config_path, port, host, ui_dir):
    """Serve the HTTP API (and optionally the labeling UI)."""
    import uvicorn

    from .api import ServiceState, create_app

    ws = _workspace(workspace)
    dataset = _load_dataset(ws)
    config = load_config(config_path) if config_path else EngineConfig()

    log_path = ws / ANNOTATIONS_FILE

    def on_label(task, doc_id, cls, annotator):
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc_id,
                        "task_name": task,
                        "cls": cls,
                        "origin": "manual",
                        "annotator": annotator,
                        "timestamp": __import__("time").time(),
                    }
                )
                + "\n"
            )

    state = ServiceState(config=config, threaded=True, on_label=on_label)
    state.add_dataset(dataset)
    _replay_annotations(ws, state.store)
    for task, settings in _load_tasks(ws).items():
        if task not in state.store.tasks:
            state.store.create_task(task)
        engine = Engine(dataset, task, config, store=state.store, threaded=True)
        engine.bootstrap(
            mode=settings.get("bootstrap", "random"),
            keywords=settings.get("keywords", []),
        )
        state.engines[task] = engine
    app = create_app(state, static_dir=ui_dir)

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    bound_host, bound_port = sock.getsockname()
    click.echo(f"serving on http://{bound_host}:{bound_port}")
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])


@main.command()
@click.option("--config", "config_path", required=True, help="experiment config (TOML/JSON)")
@click.option("--out", required=True, type=click.Path())
def simulate(config_path, out):
    """Run an oracle-driven experiment and write a JSON report."""
    path = pathlib.Path(config_path)
    if not path.exists():
        raise click.ClickException(f"config file not found: {config_path}")
    if str(path).endswith(".json"):
        raw = json.loads(path.read_text())
    else:
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib

        raw = tomllib.loads(path.read_text())
    corpus_spec = CorpusSpec(**raw.get("corpus", {}))
    exp_raw = dict(raw.get("experiment", {}))
    if "seeds" in exp_raw:
        exp_raw["seeds"] = tuple(exp_raw["seeds"])
    if "keywords" in exp_raw:
        exp_raw["keywords"] = tuple(exp_raw["keywords"])
    exp_cfg = ExperimentConfig(**exp_raw)
    dataset = make_synthetic_corpus(corpus_spec)
    if raw.get("baseline", False):
        report = run_random_baseline(exp_cfg, dataset)
    else:
        report = run_experiment(exp_cfg, dataset)
    pathlib.Path(out).write_text(report.to_json())
    click.echo(report.render_table())
    click.echo(f"report written to {out}")


@main.command()
@click.argument("task")
@click.option("--workspace", default="./cal-workspace", show_default=True)
@click.option("--out", required=True, type=click.Path())
def export(task, workspace, out):
    """Export a task's active annotations as CSV."""
    ws = _workspace(workspace)
    store = AnnotationStore()
    _replay_annotations(ws, store)
    if task not in store.tasks:
        raise click.ClickException(f"unknown task {task!r}")
    pathlib.Path(out).write_bytes(store.export_csv(task))
    click.echo(f"exported {task} annotations to {out}")


if __name__ == "__main__":
    sys.exit(main())
