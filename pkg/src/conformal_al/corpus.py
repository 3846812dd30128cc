"""Document and annotation storage: ingest, append-only labels, CSV export."""

import csv
import io
import json
import time
from dataclasses import dataclass, field

from .classifier import NO, YES

VALID_CLASSES = (YES, NO)
_TRUTHY = {"yes", "true", "1", "y"}
_FALSY = {"no", "false", "0", "n"}


class CorpusError(Exception):
    pass


class NotFoundError(CorpusError):
    pass


@dataclass
class Document:
    doc_id: str
    text: str
    ground_truth: dict | None = None  # task_name -> class, simulation only


@dataclass
class Dataset:
    dataset_id: str
    documents: list
    source_uri: str = ""

    def __post_init__(self):
        self.by_id = {}
        for doc in self.documents:
            if doc.doc_id in self.by_id:
                raise CorpusError(f"duplicate doc_id {doc.doc_id!r}")
            self.by_id[doc.doc_id] = doc

    def __len__(self):
        return len(self.documents)

    def doc_ids(self):
        return [d.doc_id for d in self.documents]


@dataclass
class LabelTask:
    task_name: str
    created_at: float = field(default_factory=time.time)
    classes: tuple = VALID_CLASSES


@dataclass
class Annotation:
    doc_id: str
    task_name: str
    cls: str
    origin: str  # manual | pre_labeled | oracle
    annotator: str
    timestamp: float = field(default_factory=time.time)


def _parse_truth(value):
    v = str(value).strip().lower()
    if v in _TRUTHY:
        return YES
    if v in _FALSY:
        return NO
    raise CorpusError(f"cannot parse {value!r} as a yes/no truth value")


def ingest_dataset(path, format, text_column, id_column=None, truth_columns=None):
    """Load a CSV or JSONL file into a Dataset.

    Missing ``id_column`` synthesizes ids "doc-<row_index>". ``truth_columns``
    maps task_name -> column holding yes/no ground truth. A malformed row or a
    duplicate explicit id rejects the whole ingest.
    """
    truth_columns = truth_columns or {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CorpusError(f"cannot open {path}: {exc}") from exc
    documents = []
    seen = set()
    with fh:
        if format == "csv":
            rows = csv.DictReader(fh)
        elif format == "jsonl":
            rows = (json.loads(line) for line in fh if line.strip())
        else:
            raise CorpusError(f"unknown ingest format {format!r}")
        for i, row in enumerate(rows):
            try:
                text = row[text_column]
            except (KeyError, TypeError):
                raise CorpusError(f"row {i}: missing text column {text_column!r}")
            if text is None or not str(text).strip():
                raise CorpusError(f"row {i}: empty text")
            if id_column:
                if id_column not in row:
                    raise CorpusError(f"row {i}: missing id column {id_column!r}")
                doc_id = str(row[id_column])
            else:
                doc_id = f"doc-{i}"
            if doc_id in seen:
                raise CorpusError(f"row {i}: duplicate doc_id {doc_id!r}")
            seen.add(doc_id)
            truth = None
            if truth_columns:
                truth = {}
                for task, col in truth_columns.items():
                    if col not in row:
                        raise CorpusError(f"row {i}: missing truth column {col!r}")
                    truth[task] = _parse_truth(row[col])
            documents.append(Document(doc_id=doc_id, text=str(text), ground_truth=truth))
    return Dataset(dataset_id=path.rsplit("/", 1)[-1], documents=documents, source_uri=str(path))


class AnnotationStore:
    """Append-only annotation log with latest-wins active view.

    Replaying the log reconstructs the active state exactly; prior rows are
    never mutated.
    """

    def __init__(self):
        self.tasks = {}
        self.log = []
        self.active = {}  # (doc_id, task_name) -> Annotation

    def create_task(self, task_name):
        if task_name in self.tasks:
            raise CorpusError(f"task {task_name!r} already exists")
        task = LabelTask(task_name=task_name)
        self.tasks[task_name] = task
        return task

    def delete_task(self, task_name):
        if task_name not in self.tasks:
            raise NotFoundError(f"unknown task {task_name!r}")
        del self.tasks[task_name]
        self.log = [a for a in self.log if a.task_name != task_name]
        self.active = {k: v for k, v in self.active.items() if k[1] != task_name}

    def record(self, annotation, dataset):
        if annotation.doc_id not in dataset.by_id:
            raise NotFoundError(f"unknown doc {annotation.doc_id!r}")
        if annotation.task_name not in self.tasks:
            raise NotFoundError(f"unknown task {annotation.task_name!r}")
        if annotation.cls not in VALID_CLASSES:
            raise CorpusError(f"invalid class {annotation.cls!r}")
        self.log.append(annotation)
        self.active[(annotation.doc_id, annotation.task_name)] = annotation

    def active_for_task(self, task_name):
        if task_name not in self.tasks:
            raise NotFoundError(f"unknown task {task_name!r}")
        return {
            doc_id: ann
            for (doc_id, task), ann in self.active.items()
            if task == task_name
        }

    def counts(self, task_name):
        anns = self.active_for_task(task_name).values()
        return {
            YES: sum(1 for a in anns if a.cls == YES),
            NO: sum(1 for a in anns if a.cls == NO),
        }

    def export_csv(self, task_name):
        """Active annotations as RFC-4180 CSV bytes."""
        anns = self.active_for_task(task_name)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["doc_id", "class", "origin", "annotator", "timestamp"])
        for doc_id in sorted(anns):
            a = anns[doc_id]
            writer.writerow([a.doc_id, a.cls, a.origin, a.annotator, a.timestamp])
        return buf.getvalue().encode("utf-8")

    def to_state(self):
        return {
            "tasks": [
                {"task_name": t.task_name, "created_at": t.created_at}
                for t in self.tasks.values()
            ],
            "log": [
                {
                    "doc_id": a.doc_id,
                    "task_name": a.task_name,
                    "cls": a.cls,
                    "origin": a.origin,
                    "annotator": a.annotator,
                    "timestamp": a.timestamp,
                }
                for a in self.log
            ],
        }

    @classmethod
    def from_state(cls, state):
        store = cls()
        for t in state["tasks"]:
            store.tasks[t["task_name"]] = LabelTask(
                task_name=t["task_name"], created_at=t["created_at"]
            )
        for rec in state["log"]:
            ann = Annotation(**rec)
            store.log.append(ann)
            store.active[(ann.doc_id, ann.task_name)] = ann
        return store


def dataset_to_state(dataset):
    return {
        "dataset_id": dataset.dataset_id,
        "source_uri": dataset.source_uri,
        "documents": [
            {"doc_id": d.doc_id, "text": d.text, "ground_truth": d.ground_truth}
            for d in dataset.documents
        ],
    }


def dataset_from_state(state):
    return Dataset(
        dataset_id=state["dataset_id"],
        source_uri=state["source_uri"],
        documents=[Document(**d) for d in state["documents"]],
    )
