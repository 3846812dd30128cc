"""Evaluation metrics: accuracy/precision/recall, AUC-ROC, bootstrap error bars."""

import io
import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .classifier import NO, YES


@dataclass
class BinaryMetrics:
    accuracy: float
    precision: float
    recall: float
    precision_flagged: bool = False  # zero predicted positives
    recall_flagged: bool = False  # zero true positives


@dataclass
class MetricReport:
    accuracy: tuple  # (mean, half_width)
    precision: tuple
    recall: tuple
    auc_roc: tuple
    yes_count: int
    no_count: int
    degenerate_auc: bool

    def to_dict(self):
        return {
            "accuracy": {"mean": self.accuracy[0], "half_width": self.accuracy[1]},
            "precision": {"mean": self.precision[0], "half_width": self.precision[1]},
            "recall": {"mean": self.recall[0], "half_width": self.recall[1]},
            "auc_roc": {"mean": self.auc_roc[0], "half_width": self.auc_roc[1]},
            "yes_count": self.yes_count,
            "no_count": self.no_count,
            "degenerate_auc": self.degenerate_auc,
        }


def binary_metrics(predicted, truth):
    """Accuracy, precision and recall with positive class = yes.

    Zero predicted positives yields precision 0 (flagged); zero true positives
    yields recall 0 (flagged).
    """
    if len(predicted) != len(truth):
        raise ValueError("predicted and truth lengths differ")
    if len(truth) == 0:
        raise ValueError("empty evaluation set")
    pred = np.asarray([p == YES for p in predicted])
    true = np.asarray([t == YES for t in truth])
    tp = int((pred & true).sum())
    accuracy = float((pred == true).mean())
    pred_pos = int(pred.sum())
    true_pos = int(true.sum())
    precision = tp / pred_pos if pred_pos else 0.0
    recall = tp / true_pos if true_pos else 0.0
    return BinaryMetrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        precision_flagged=pred_pos == 0,
        recall_flagged=true_pos == 0,
    )


def auc_roc(scores, truth):
    """Mann-Whitney AUC: P(score_pos > score_neg) with ties counted 0.5.

    Computed via midranks; equals pairwise enumeration exactly. With either
    class absent the value is degenerate: (0.5, True).
    """
    scores = np.asarray(scores, dtype=np.float64)
    true = np.asarray([t == YES for t in truth])
    n_pos = int(true.sum())
    n_neg = len(true) - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.5, True
    ranks = rankdata(scores)
    auc = (ranks[true].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    return float(auc), False


def uncertainty(values):
    """Mean and one population standard deviation over resampled metric values."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("no resample values")
    if values.size == 1:
        return float(values[0]), 0.5
    return float(values.mean()), float(values.std())


def bootstrap_report(p_yes, truth, n_resamples=200, seed=0):
    """MetricReport with +/- one bootstrap standard deviation error bars.

    Predicted class per document is argmax probability; AUC uses p_yes as the
    ranking score. A degenerate AUC (single-class truth) is reported as
    0.5 +/- 0.5, mirroring single-class evaluation sets.
    """
    p_yes = np.asarray(p_yes, dtype=np.float64)
    truth = list(truth)
    n = len(truth)
    if n == 0:
        raise ValueError("empty evaluation set")
    pred = [YES if p >= 0.5 else NO for p in p_yes]
    yes_count = sum(1 for t in truth if t == YES)
    no_count = n - yes_count
    _, degenerate = auc_roc(p_yes, truth)
    rng = np.random.default_rng(seed)
    accs, precs, recs, aucs = [], [], [], []
    for _ in range(n_resamples):
        idx = rng.integers(0, n, size=n)
        t = [truth[i] for i in idx]
        p = [pred[i] for i in idx]
        m = binary_metrics(p, t)
        accs.append(m.accuracy)
        precs.append(m.precision)
        recs.append(m.recall)
        a, d = auc_roc(p_yes[idx], t)
        if not d:
            aucs.append(a)
    if degenerate or not aucs:
        auc_stat = (0.5, 0.5)
        degenerate = True
    else:
        auc_stat = uncertainty(aucs)
    return MetricReport(
        accuracy=uncertainty(accs),
        precision=uncertainty(precs),
        recall=uncertainty(recs),
        auc_roc=auc_stat,
        yes_count=yes_count,
        no_count=no_count,
        degenerate_auc=degenerate,
    )


def convergence_series(metrics_history):
    """Ordered (cycle_index, labels_used, auc) points from engine history."""
    return [
        (h["cycle_index"], h["labels_total"], h["report"].auc_roc[0])
        for h in metrics_history
    ]


def convergence_csv(series):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cycle", "labels", "auc"])
    for cycle, labels, auc in series:
        writer.writerow([cycle, labels, auc])
    return buf.getvalue()
