"""Oracle-driven experiment harness: synthetic corpora, active runs, random baseline."""

import json
import statistics
from dataclasses import dataclass, field, asdict

import numpy as np

from .classifier import NO, YES, SparseLogisticClassifier, TrainConfig
from .corpus import Annotation, Dataset, Document
from .embed import TfidfEncoder
from .engine import Engine, EngineConfig
from .metrics import MetricReport, bootstrap_report, uncertainty
from .select import SelectionConfig

DEFAULT_TASK = "label"


class SimError(Exception):
    pass


@dataclass(frozen=True)
class CorpusSpec:
    n_docs: int = 2000
    prevalence: float = 0.25
    signal: float = 0.5  # probability a token comes from the class topic
    seed: int = 0
    n_background: int = 150
    n_topic: int = 40

    def __post_init__(self):
        if not 0.0 < self.prevalence < 1.0:
            raise ValueError("prevalence must lie in (0, 1)")
        if not 0.0 <= self.signal <= 1.0:
            raise ValueError("signal must lie in [0, 1]")


def make_synthetic_corpus(spec, task_name=DEFAULT_TASK):
    """Bag-of-words corpus from two overlapping topic distributions.

    Positive and negative documents share a background vocabulary; each token
    is drawn from the class topic with probability ``signal``, so a linear
    TF-IDF classifier separates the classes in proportion to the signal
    strength (zero signal gives identical distributions).
    """
    rng = np.random.default_rng(spec.seed)
    background = [f"w{i:03d}" for i in range(spec.n_background)]
    yes_topic = [f"py{i:02d}" for i in range(spec.n_topic)]
    no_topic = [f"pn{i:02d}" for i in range(spec.n_topic)]
    documents = []
    for i in range(spec.n_docs):
        is_yes = rng.random() < spec.prevalence
        topic = yes_topic if is_yes else no_topic
        length = int(rng.integers(20, 60))
        words = []
        for _ in range(length):
            if rng.random() < spec.signal:
                words.append(topic[int(rng.integers(len(topic)))])
            else:
                words.append(background[int(rng.integers(len(background)))])
        documents.append(
            Document(
                doc_id=f"doc-{i:05d}",
                text=" ".join(words),
                ground_truth={task_name: YES if is_yes else NO},
            )
        )
    return Dataset(dataset_id=f"synthetic-{spec.seed}", documents=documents, source_uri="synthetic")


@dataclass(frozen=True)
class ExperimentConfig:
    label_budget: int = 100
    high_fraction: float = 1.0
    prelabeled: int = 0
    prelabeled_counts_toward_budget: bool = False
    bootstrap_mode: str = "random"  # random | keyword (with keywords)
    keywords: tuple = ()
    seeds: tuple = (1, 2, 3, 4, 5)
    alpha: float = 0.1
    k_top: int = 500
    k_cluster: int = 6
    min_labels_before_training: int = 10
    eval_scope: str = "probe"  # probe | labeled
    probe_size: int = 500

    def __post_init__(self):
        if self.prelabeled_counts_toward_budget and self.label_budget <= self.prelabeled:
            raise ValueError("budget must exceed prelabeled when it counts toward it")


@dataclass
class SeedResult:
    seed: int
    report: MetricReport
    positives_found: int
    oracle_labels: int
    convergence: list = field(default_factory=list)


@dataclass
class ExperimentReport:
    config: dict
    per_seed: list
    aggregate: MetricReport
    positives_found: int  # median over seeds

    def to_dict(self):
        return {
            "config": self.config,
            "per_seed": [
                {
                    "seed": r.seed,
                    "report": r.report.to_dict(),
                    "positives_found": r.positives_found,
                    "oracle_labels": r.oracle_labels,
                    "convergence": r.convergence,
                }
                for r in self.per_seed
            ],
            "aggregate": self.aggregate.to_dict(),
            "positives_found": self.positives_found,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def render_table(self):
        """Human-readable results table (accuracy/precision/recall/AUC/yes-no)."""
        lines = [
            f"{'Seed':>6}  {'Accuracy':>16}  {'Precision':>16}  {'Recall':>16}  "
            f"{'AUC-ROC':>16}  {'Yes/No':>9}"
        ]

        def fmt(pair):
            return f"{pair[0]:.2f} +/- {pair[1]:.2f}"

        for r in self.per_seed:
            rep = r.report
            lines.append(
                f"{r.seed:>6}  {fmt(rep.accuracy):>16}  {fmt(rep.precision):>16}  "
                f"{fmt(rep.recall):>16}  {fmt(rep.auc_roc):>16}  "
                f"{rep.yes_count:>4}/{rep.no_count:<4}"
            )
        rep = self.aggregate
        lines.append(
            f"{'all':>6}  {fmt(rep.accuracy):>16}  {fmt(rep.precision):>16}  "
            f"{fmt(rep.recall):>16}  {fmt(rep.auc_roc):>16}  "
            f"{rep.yes_count:>4}/{rep.no_count:<4}"
        )
        return "\n".join(lines)


def _truth(dataset, doc_id, task_name):
    doc = dataset.by_id[doc_id]
    if not doc.ground_truth or task_name not in doc.ground_truth:
        raise SimError(f"document {doc_id!r} has no ground truth for {task_name!r}")
    return doc.ground_truth[task_name]


def _probe_ids(dataset, task_name, size, seed):
    rng = np.random.default_rng([seed, 0x9B0])
    ids = dataset.doc_ids()
    n = min(size, len(ids))
    idx = rng.choice(len(ids), size=n, replace=False)
    return [ids[i] for i in sorted(idx)]


def _evaluate(engine, dataset, task_name, cfg, seed):
    if cfg.eval_scope == "probe":
        ids = _probe_ids(dataset, task_name, cfg.probe_size, seed)
    else:
        ids = sorted(engine.labeled())
    rows = [engine.row_of[d] for d in ids]
    p_yes = engine.model.predict_p_yes(engine.X[rows])
    truth = [_truth(dataset, d, task_name) for d in ids]
    return bootstrap_report(p_yes, truth, seed=seed)


def _prelabeled_annotations(dataset, task_name, n, seed):
    """Half positives, half negatives, drawn from ground truth (the simulated
    analog of keyword-found positives plus a random negative list)."""
    rng = np.random.default_rng([seed, 0xA11])
    pos = [d.doc_id for d in dataset.documents if _truth(dataset, d.doc_id, task_name) == YES]
    neg = [d.doc_id for d in dataset.documents if _truth(dataset, d.doc_id, task_name) == NO]
    n_pos = min(n // 2, len(pos))
    n_neg = min(n - n_pos, len(neg))
    picked_pos = [pos[i] for i in sorted(rng.choice(len(pos), size=n_pos, replace=False))]
    picked_neg = [neg[i] for i in sorted(rng.choice(len(neg), size=n_neg, replace=False))]
    return [
        Annotation(doc_id=d, task_name=task_name, cls=_truth(dataset, d, task_name),
                   origin="pre_labeled", annotator="bootstrap")
        for d in picked_pos + picked_neg
    ]


def _aggregate(per_seed):
    def agg(getter):
        vals = [getter(r.report) for r in per_seed]
        if len(vals) == 1:
            return vals[0], 0.0
        return uncertainty([v for v in vals])

    yes = int(statistics.median([r.report.yes_count for r in per_seed]))
    no = int(statistics.median([r.report.no_count for r in per_seed]))
    return MetricReport(
        accuracy=agg(lambda m: m.accuracy[0]),
        precision=agg(lambda m: m.precision[0]),
        recall=agg(lambda m: m.recall[0]),
        auc_roc=agg(lambda m: m.auc_roc[0]),
        yes_count=yes,
        no_count=no,
        degenerate_auc=all(r.report.degenerate_auc for r in per_seed),
    )


def run_experiment(cfg, dataset, task_name=DEFAULT_TASK):
    """Drive the engine with an oracle labeler over the experiment grid."""
    per_seed = []
    for seed in cfg.seeds:
        engine_cfg = EngineConfig(
            alpha=cfg.alpha,
            min_labels_before_training=cfg.min_labels_before_training,
            selection=SelectionConfig(
                k_top=cfg.k_top,
                k_cluster=cfg.k_cluster,
                high_fraction=cfg.high_fraction,
                seed=seed,
            ),
            seed=seed,
        )
        engine = Engine(dataset, task_name, engine_cfg)
        if cfg.prelabeled > 0:
            anns = _prelabeled_annotations(dataset, task_name, cfg.prelabeled, seed)
            engine.bootstrap(mode="pre_labeled", annotations=anns)
        elif cfg.bootstrap_mode == "keyword":
            engine.bootstrap(mode="keyword", keywords=list(cfg.keywords))
        else:
            engine.bootstrap(mode="random")
        budget = cfg.label_budget
        if cfg.prelabeled_counts_toward_budget:
            budget -= cfg.prelabeled
        oracle_labels = 0
        while oracle_labels < budget:
            doc_id = engine.next_to_label()
            if doc_id is None:
                break
            engine.submit_label(
                doc_id, _truth(dataset, doc_id, task_name), "oracle", origin="oracle"
            )
            oracle_labels += 1
        if engine.model is None:
            engine.trigger_retrain()
        report = _evaluate(engine, dataset, task_name, cfg, seed)
        positives = sum(
            1 for d in engine.labeled() if _truth(dataset, d, task_name) == YES
        )
        per_seed.append(
            SeedResult(
                seed=seed,
                report=report,
                positives_found=positives,
                oracle_labels=oracle_labels,
                convergence=engine.convergence(),
            )
        )
    return ExperimentReport(
        config=asdict(cfg) | {"baseline": False},
        per_seed=per_seed,
        aggregate=_aggregate(per_seed),
        positives_found=int(statistics.median([r.positives_found for r in per_seed])),
    )


def run_random_baseline(cfg, dataset, task_name=DEFAULT_TASK):
    """Label a uniform random sample of ``label_budget`` docs and train once."""
    encoder = TfidfEncoder()
    X = encoder.fit_transform([d.text for d in dataset.documents])
    row_of = {d.doc_id: i for i, d in enumerate(dataset.documents)}
    per_seed = []
    for seed in cfg.seeds:
        rng = np.random.default_rng([seed, 0xBA5E])
        ids = dataset.doc_ids()
        idx = rng.choice(len(ids), size=min(cfg.label_budget, len(ids)), replace=False)
        sample = [ids[i] for i in sorted(idx)]
        truth = [_truth(dataset, d, task_name) for d in sample]
        y = np.array([1.0 if t == YES else 0.0 for t in truth])
        clf = SparseLogisticClassifier(**TrainConfig(seed=seed).__dict__)
        clf.fit(X[[row_of[d] for d in sample]], y)
        if cfg.eval_scope == "probe":
            eval_ids = _probe_ids(dataset, task_name, cfg.probe_size, seed)
        else:
            eval_ids = sample
        p_yes = clf.predict_p_yes(X[[row_of[d] for d in eval_ids]])
        eval_truth = [_truth(dataset, d, task_name) for d in eval_ids]
        report = bootstrap_report(p_yes, eval_truth, seed=seed)
        per_seed.append(
            SeedResult(
                seed=seed,
                report=report,
                positives_found=sum(1 for t in truth if t == YES),
                oracle_labels=len(sample),
            )
        )
    return ExperimentReport(
        config=asdict(cfg) | {"baseline": True},
        per_seed=per_seed,
        aggregate=_aggregate(per_seed),
        positives_found=int(statistics.median([r.positives_found for r in per_seed])),
    )
