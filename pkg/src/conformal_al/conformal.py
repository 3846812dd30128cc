"""Label-conditional conformal calibration, set prediction and uncertainty scoring."""

import math
from dataclasses import dataclass, field

import numpy as np

from .classifier import NO, YES

CLASSES = (YES, NO)


@dataclass
class CalibrationSet:
    """Conformity scores of validation points, grouped by their true class."""

    scores: dict = field(default_factory=lambda: {YES: [], NO: []})

    def add(self, cls, score):
        self.scores[cls].append(float(score))

    def counts(self):
        return {c: len(v) for c, v in self.scores.items()}


@dataclass(frozen=True)
class Thresholds:
    alpha: float
    t: dict  # class -> threshold in [0, 1] or +inf

    def to_state(self):
        return {"alpha": self.alpha, "t": {c: v for c, v in self.t.items()}}

    @classmethod
    def from_state(cls, state):
        return cls(alpha=state["alpha"], t=dict(state["t"]))


def conformity_score(p_label):
    """s(x, y) = 1 - p(y | x) for the probability the model assigns to y."""
    return 1.0 - float(p_label)


def scores_for(p_yes):
    """Conformity scores of both classes given p(yes | x)."""
    return {YES: 1.0 - float(p_yes), NO: float(p_yes)}


def conformal_quantile(scores, alpha):
    """Empirical (1-alpha)-quantile of ``scores`` augmented with {+inf}.

    Equals the k-th smallest of the n scores with k = ceil((n+1)(1-alpha)),
    or +inf when k exceeds n (always the case for n = 0).
    """
    n = len(scores)
    k = math.ceil((n + 1) * (1.0 - alpha))
    if k > n:
        return math.inf
    return float(np.partition(np.asarray(scores, dtype=np.float64), k - 1)[k - 1])


def calibrate(cal, alpha):
    """Per-class conformal thresholds from a calibration set."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return Thresholds(
        alpha=alpha,
        t={c: conformal_quantile(cal.scores[c], alpha) for c in CLASSES},
    )


def prediction_set(p_yes, thresholds):
    """C(x): classes whose conformity score falls at or below their threshold."""
    s = scores_for(p_yes)
    return frozenset(c for c in CLASSES if s[c] <= thresholds.t[c])


def uncertainty_score(p_yes, pred_set):
    """Mean conformity score over the predicted classes.

    An empty set means no class is conformal; it is scored 1.0 (maximal
    uncertainty) so it ranks first for labeling.
    """
    if not pred_set:
        return 1.0
    s = scores_for(p_yes)
    return sum(s[c] for c in pred_set) / len(pred_set)


def predict_batch(p_yes, thresholds):
    """Vectorized sets and uncertainty scores for an array of p(yes | x).

    Returns (sets, s_x) with ``sets`` a list of frozensets and ``s_x`` a float
    array.
    """
    p_yes = np.asarray(p_yes, dtype=np.float64)
    s_yes = 1.0 - p_yes
    s_no = p_yes
    in_yes = s_yes <= thresholds.t[YES]
    in_no = s_no <= thresholds.t[NO]
    sets = []
    for iy, ino in zip(in_yes, in_no):
        members = []
        if iy:
            members.append(YES)
        if ino:
            members.append(NO)
        sets.append(frozenset(members))
    size = in_yes.astype(np.float64) + in_no.astype(np.float64)
    total = np.where(in_yes, s_yes, 0.0) + np.where(in_no, s_no, 0.0)
    s_x = np.where(size > 0, total / np.maximum(size, 1.0), 1.0)
    return sets, s_x


def empirical_coverage(records):
    """Per-class fraction of (pred_set, truth) pairs whose set contains truth.

    Classes with zero truths are absent from the result.
    """
    hits = {c: 0 for c in CLASSES}
    totals = {c: 0 for c in CLASSES}
    for pred_set, truth in records:
        totals[truth] += 1
        if truth in pred_set:
            hits[truth] += 1
    return {c: hits[c] / totals[c] for c in CLASSES if totals[c] > 0}
