import json

import pytest

from conformal_al.corpus import (
    Annotation,
    AnnotationStore,
    CorpusError,
    Dataset,
    Document,
    NotFoundError,
    ingest_dataset,
)


@pytest.fixture
def jsonl_file(tmp_path):
    path = tmp_path / "docs.jsonl"
    rows = [
        {"id": "a", "text": "dog food"},
        {"id": "b", "text": "cat toy"},
        {"id": "c", "text": "fish tank"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    return str(path)


def test_ingest_jsonl(jsonl_file):
    ds = ingest_dataset(jsonl_file, "jsonl", "text", id_column="id")
    assert len(ds) == 3
    assert ds.doc_ids() == ["a", "b", "c"]


def test_ingest_csv_synthesized_ids(tmp_path):
    path = tmp_path / "docs.csv"
    path.write_text("text\ndog food\ncat toy\n")
    ds = ingest_dataset(str(path), "csv", "text")
    assert ds.doc_ids() == ["doc-0", "doc-1"]


def test_ingest_empty_text_names_row(tmp_path):
    path = tmp_path / "docs.csv"
    path.write_text("text\ndog food\n   \n")
    with pytest.raises(CorpusError, match="row 1"):
        ingest_dataset(str(path), "csv", "text")


def test_ingest_duplicate_id_rejected(tmp_path):
    path = tmp_path / "docs.jsonl"
    path.write_text('{"id":"a","text":"x y"}\n{"id":"a","text":"z w"}\n')
    with pytest.raises(CorpusError, match="duplicate"):
        ingest_dataset(str(path), "jsonl", "text", id_column="id")


def test_ingest_truth_columns(tmp_path):
    path = tmp_path / "docs.csv"
    path.write_text("text,pet\ndog food,yes\nsoda can,no\n")
    ds = ingest_dataset(str(path), "csv", "text", truth_columns={"Pet": "pet"})
    assert ds.documents[0].ground_truth == {"Pet": "yes"}
    assert ds.documents[1].ground_truth == {"Pet": "no"}


def test_ingest_missing_file():
    with pytest.raises(CorpusError, match="cannot open"):
        ingest_dataset("/nonexistent.csv", "csv", "text")


def test_ingest_deterministic(jsonl_file):
    a = ingest_dataset(jsonl_file, "jsonl", "text", id_column="id")
    b = ingest_dataset(jsonl_file, "jsonl", "text", id_column="id")
    assert a.doc_ids() == b.doc_ids()
    assert [d.text for d in a.documents] == [d.text for d in b.documents]


@pytest.fixture
def store_and_dataset():
    ds = Dataset("d", [Document("a", "dog food"), Document("b", "cat toy")])
    store = AnnotationStore()
    store.create_task("Pet")
    return store, ds


def test_record_and_count(store_and_dataset):
    store, ds = store_and_dataset
    store.record(Annotation("a", "Pet", "yes", "manual", "ann"), ds)
    assert store.counts("Pet") == {"yes": 1, "no": 0}


def test_latest_wins_log_retains_both(store_and_dataset):
    store, ds = store_and_dataset
    store.record(Annotation("a", "Pet", "yes", "manual", "ann"), ds)
    store.record(Annotation("a", "Pet", "no", "manual", "ann"), ds)
    assert store.active[("a", "Pet")].cls == "no"
    assert len(store.log) == 2


def test_unknown_doc_and_task(store_and_dataset):
    store, ds = store_and_dataset
    with pytest.raises(NotFoundError):
        store.record(Annotation("zzz", "Pet", "yes", "manual", "ann"), ds)
    with pytest.raises(NotFoundError):
        store.record(Annotation("a", "Nope", "yes", "manual", "ann"), ds)
    with pytest.raises(NotFoundError):
        store.export_csv("Nope")


def test_export_csv(store_and_dataset):
    store, ds = store_and_dataset
    store.record(Annotation("a", "Pet", "yes", "manual", "alice", timestamp=1.0), ds)
    store.record(Annotation("b", "Pet", "no", "oracle", "bob", timestamp=2.0), ds)
    lines = store.export_csv("Pet").decode("utf-8").split("\r\n")
    assert lines[0] == "doc_id,class,origin,annotator,timestamp"
    assert len([l for l in lines if l]) == 3


def test_export_csv_empty_task():
    store = AnnotationStore()
    store.create_task("Pet")
    lines = [l for l in store.export_csv("Pet").decode().split("\r\n") if l]
    assert lines == ["doc_id,class,origin,annotator,timestamp"]


def test_export_csv_quotes_comma(store_and_dataset):
    store, ds = store_and_dataset
    store.record(Annotation("a", "Pet", "yes", "manual", 'smith, "doc"'), ds)
    body = store.export_csv("Pet").decode("utf-8")
    assert '"smith, ""doc"""' in body


def test_log_replay_reconstructs_state(store_and_dataset):
    store, ds = store_and_dataset
    store.record(Annotation("a", "Pet", "yes", "manual", "ann"), ds)
    store.record(Annotation("a", "Pet", "no", "manual", "ann"), ds)
    store.record(Annotation("b", "Pet", "yes", "manual", "ann"), ds)
    replayed = AnnotationStore.from_state(store.to_state())
    assert replayed.active.keys() == store.active.keys()
    assert all(replayed.active[k].cls == store.active[k].cls for k in store.active)


def test_duplicate_doc_id_in_dataset():
    with pytest.raises(CorpusError):
        Dataset("d", [Document("a", "x"), Document("a", "y")])
