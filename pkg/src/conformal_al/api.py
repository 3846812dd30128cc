"""HTTP service exposing the engine: a thin adapter over corpus/engine/metrics."""

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .classifier import NO, YES
from .corpus import AnnotationStore, CorpusError, NotFoundError, ingest_dataset
from .engine import Engine, EngineConfig, EngineError


class ApiError(Exception):
    STATUS = {"not_found": 404, "conflict": 409, "bad_request": 400, "busy": 409}

    def __init__(self, code, message):
        self.code = code
        self.message = message
        super().__init__(message)


class IngestRequest(BaseModel):
    path: str
    format: str = "jsonl"
    text_column: str = "text"
    id_column: str | None = None
    truth_columns: dict | None = None


class TaskRequest(BaseModel):
    task_name: str
    dataset_id: str | None = None
    bootstrap: str = "random"
    keywords: list[str] = []


class AnnotationRequest(BaseModel):
    doc_id: str
    cls: str
    annotator: str = "anonymous"


class ServiceState:
    """Datasets and one engine per task; engines run training in background."""

    def __init__(self, config=None, threaded=True, on_label=None):
        self.config = config or EngineConfig()
        self.threaded = threaded
        self.datasets = {}
        self.engines = {}
        self.store = AnnotationStore()
        self.on_label = on_label  # hook for append-only persistence

    def add_dataset(self, dataset):
        self.datasets[dataset.dataset_id] = dataset
        return dataset.dataset_id

    def get_engine(self, task_name):
        if task_name not in self.engines:
            raise ApiError("not_found", f"unknown task {task_name!r}")
        return self.engines[task_name]

    def create_task(self, task_name, dataset_id=None, bootstrap="random", keywords=()):
        if task_name in self.engines:
            raise ApiError("conflict", f"task {task_name!r} already exists")
        if not self.datasets:
            raise ApiError("bad_request", "no dataset ingested")
        if dataset_id is None:
            dataset_id = next(reversed(self.datasets))
        if dataset_id not in self.datasets:
            raise ApiError("not_found", f"unknown dataset {dataset_id!r}")
        engine = Engine(
            self.datasets[dataset_id],
            task_name,
            self.config,
            store=self.store,
            threaded=self.threaded,
        )
        engine.bootstrap(mode=bootstrap, keywords=list(keywords))
        self.engines[task_name] = engine
        return engine


def create_app(state=None, static_dir=None):
    state = state or ServiceState()
    app = FastAPI(title="conformal-al")
    app.state.service = state
    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=ApiError.STATUS[exc.code],
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(404)
    async def not_found_handler(request: Request, exc):
        return JSONResponse(
            status_code=404, content={"code": "not_found", "message": "unknown route"}
        )

    @app.post("/datasets")
    def post_dataset(req: IngestRequest):
        try:
            dataset = ingest_dataset(
                req.path,
                req.format,
                req.text_column,
                id_column=req.id_column,
                truth_columns=req.truth_columns,
            )
        except CorpusError as exc:
            raise ApiError("bad_request", str(exc))
        return {"dataset_id": state.add_dataset(dataset), "documents": len(dataset)}

    @app.post("/tasks")
    def post_task(req: TaskRequest):
        engine = state.create_task(
            req.task_name, req.dataset_id, bootstrap=req.bootstrap, keywords=req.keywords
        )
        return {"task_name": req.task_name, "status": engine.status()}

    @app.get("/tasks")
    def list_tasks():
        out = []
        for name, engine in state.engines.items():
            counts = state.store.counts(name)
            out.append(
                {
                    "task_name": name,
                    "yes_count": counts[YES],
                    "no_count": counts[NO],
                    "total_documents": len(engine.dataset),
                    "status": engine.status(),
                }
            )
        return out

    @app.delete("/tasks/{task}")
    def delete_task(task: str):
        state.get_engine(task)
        del state.engines[task]
        state.store.delete_task(task)
        return {"deleted": task}

    @app.get("/tasks/{task}/queue/next")
    def queue_next(task: str):
        engine = state.get_engine(task)
        doc_id = engine.next_to_label()
        if doc_id is None:
            return {"done": True}
        return {
            "done": False,
            "doc_id": doc_id,
            "text": engine.dataset.by_id[doc_id].text,
            "cycle_index": engine.cycle_index,
        }

    @app.post("/tasks/{task}/annotations")
    def post_annotation(task: str, req: AnnotationRequest):
        engine = state.get_engine(task)
        if req.cls not in (YES, NO):
            raise ApiError("bad_request", f"class must be yes or no, got {req.cls!r}")
        try:
            ack = engine.submit_label(req.doc_id, req.cls, req.annotator)
        except NotFoundError as exc:
            raise ApiError("not_found", str(exc))
        if state.on_label is not None:
            state.on_label(task, req.doc_id, req.cls, req.annotator)
        return ack

    @app.get("/tasks/{task}/metrics")
    def task_metrics(task: str):
        engine = state.get_engine(task)
        report = engine.metric_report()
        return {
            "report": None if report is None else report.to_dict(),
            "convergence": [
                {"cycle": c, "labels": n, "auc": a} for c, n, a in engine.convergence()
            ],
        }

    @app.get("/tasks/{task}/export.csv")
    def export_csv(task: str):
        state.get_engine(task)
        try:
            body = state.store.export_csv(task)
        except NotFoundError as exc:
            raise ApiError("not_found", str(exc))
        return Response(
            content=body,
            media_type="text/csv",
            headers={"Content-Disposition": f'attachment; filename="{task}.csv"'},
        )

    @app.post("/tasks/{task}/retrain")
    def retrain(task: str):
        engine = state.get_engine(task)
        try:
            engine.trigger_retrain()
        except EngineError as exc:
            msg = str(exc)
            if "in progress" in msg:
                raise ApiError("busy", msg)
            raise ApiError("conflict", msg)
        return engine.status()

    @app.get("/tasks/{task}/status")
    def task_status(task: str):
        return state.get_engine(task).status()

    return app
