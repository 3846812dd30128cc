import numpy as np
import pytest

from conformal_al.classifier import YES, SparseLogisticClassifier
from conformal_al.embed import TfidfEncoder
from conformal_al.metrics import auc_roc
from conformal_al.sim import (
    CorpusSpec,
    ExperimentConfig,
    make_synthetic_corpus,
    run_experiment,
    run_random_baseline,
)


def full_data_auc(dataset):
    enc = TfidfEncoder()
    X = enc.fit_transform([d.text for d in dataset.documents])
    truth = [d.ground_truth["label"] for d in dataset.documents]
    y = np.array([1.0 if t == YES else 0.0 for t in truth])
    clf = SparseLogisticClassifier().fit(X, y)
    auc, _ = auc_roc(clf.predict_p_yes(X), truth)
    return auc


def test_corpus_prevalence():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=2000, prevalence=0.03, seed=0))
    pos = sum(1 for d in ds.documents if d.ground_truth["label"] == YES)
    assert 0.015 <= pos / 2000 <= 0.05


def test_corpus_deterministic():
    a = make_synthetic_corpus(CorpusSpec(n_docs=50, seed=4))
    b = make_synthetic_corpus(CorpusSpec(n_docs=50, seed=4))
    assert [d.text for d in a.documents] == [d.text for d in b.documents]
    assert [d.ground_truth for d in a.documents] == [d.ground_truth for d in b.documents]


def test_strong_signal_separable():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=600, prevalence=0.5, signal=0.5, seed=1))
    assert full_data_auc(ds) >= 0.95


def test_zero_signal_auc_half():
    # training-set AUC overfits slightly above 0.5 on noise; the
    # generalization check uses a held-out half
    ds = make_synthetic_corpus(CorpusSpec(n_docs=800, prevalence=0.5, signal=0.0, seed=9))
    enc = TfidfEncoder()
    X = enc.fit_transform([d.text for d in ds.documents])
    truth = [d.ground_truth["label"] for d in ds.documents]
    y = np.array([1.0 if t == YES else 0.0 for t in truth])
    clf = SparseLogisticClassifier().fit(X[:400], y[:400])
    auc, _ = auc_roc(clf.predict_p_yes(X[400:]), truth[400:])
    assert abs(auc - 0.5) <= 0.1


def test_budget_accounting_exact():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=300, prevalence=0.25, signal=0.5, seed=2))
    cfg = ExperimentConfig(label_budget=40, seeds=(1,), k_top=60, k_cluster=5, probe_size=100)
    rep = run_experiment(cfg, ds)
    assert rep.per_seed[0].oracle_labels == 40
    assert rep.config["label_budget"] == 40


def test_prelabeled_not_counting_toward_budget():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=300, prevalence=0.25, signal=0.5, seed=2))
    cfg = ExperimentConfig(
        label_budget=30, prelabeled=10, seeds=(1,), k_top=60, k_cluster=5, probe_size=100
    )
    rep = run_experiment(cfg, ds)
    assert rep.per_seed[0].oracle_labels == 30


def test_prelabeled_counting_toward_budget():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=300, prevalence=0.25, signal=0.5, seed=2))
    cfg = ExperimentConfig(
        label_budget=30,
        prelabeled=10,
        prelabeled_counts_toward_budget=True,
        seeds=(1,),
        k_top=60,
        k_cluster=5,
        probe_size=100,
    )
    rep = run_experiment(cfg, ds)
    assert rep.per_seed[0].oracle_labels == 20


def test_baseline_deterministic_and_binomial():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=1000, prevalence=0.2, signal=0.5, seed=3))
    cfg = ExperimentConfig(label_budget=100, seeds=(1, 2, 3, 4, 5), probe_size=200)
    a = run_random_baseline(cfg, ds)
    b = run_random_baseline(cfg, ds)
    assert a.to_dict() == b.to_dict()
    # ~20 positives expected among 100 random draws at 20% prevalence
    assert 10 <= a.positives_found <= 30


def test_report_json_and_table():
    ds = make_synthetic_corpus(CorpusSpec(n_docs=200, prevalence=0.3, signal=0.5, seed=5))
    cfg = ExperimentConfig(label_budget=20, seeds=(1, 2), k_top=40, k_cluster=4, probe_size=80)
    rep = run_experiment(cfg, ds)
    d = rep.to_dict()
    assert len(d["per_seed"]) == 2
    assert "aggregate" in d
    table = rep.render_table()
    assert "AUC-ROC" in table
    assert len(table.splitlines()) == 4  # header + 2 seeds + aggregate


def test_invalid_specs():
    with pytest.raises(ValueError):
        CorpusSpec(prevalence=0.0)
    with pytest.raises(ValueError):
        ExperimentConfig(label_budget=10, prelabeled=10, prelabeled_counts_toward_budget=True)
