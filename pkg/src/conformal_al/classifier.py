"""L2-regularized logistic regression over sparse features.

Deterministic full-batch gradient descent with backtracking step control, so
that the same examples, config and seed always produce a bit-identical model.
The estimator doubles as the embedding provider for clustering: with a linear
model the embedding of a document is its TF-IDF vector itself.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

YES, NO = "yes", "no"


@dataclass(frozen=True)
class TrainConfig:
    l2: float = 1e-4
    max_epochs: int = 300
    class_weighting: bool = True
    seed: int = 0


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1pexp(z):
    # log(1 + e^z) without overflow
    return np.where(z > 30, z, np.log1p(np.exp(np.minimum(z, 30))))


def loss_and_grad(w, b, X, y, sample_weight, l2):
    """Weighted regularized log-loss and its analytic gradient.

    L = (1/W) sum_i s_i * [log(1+e^{z_i}) - y_i z_i] + (l2/2) ||w||^2
    with z = Xw + b; the bias is unregularized.
    """
    z = X @ w + b
    wsum = sample_weight.sum()
    loss = float(
        np.dot(sample_weight, _log1pexp(z) - y * z) / wsum + 0.5 * l2 * np.dot(w, w)
    )
    resid = sample_weight * (_sigmoid(z) - y) / wsum
    grad_w = X.T @ resid + l2 * w
    grad_b = float(resid.sum())
    return loss, grad_w, grad_b


class SparseLogisticClassifier:
    """Binary probabilistic classifier with a fit/predict_proba interface.

    ``fit`` starts from zero weights and takes ``max_epochs`` full-batch
    gradient steps, halving the step size whenever it would increase the loss;
    the training loss is therefore non-increasing over epochs. A single-class
    training set yields a degenerate constant model emitting the clipped class
    prior (``degenerate_`` is set).
    """

    def __init__(self, l2=1e-4, max_epochs=300, class_weighting=True, seed=0):
        self.l2 = l2
        self.max_epochs = max_epochs
        self.class_weighting = class_weighting
        self.seed = seed
        self.coef_ = None
        self.intercept_ = 0.0
        self.degenerate_ = False
        self.constant_p_yes_ = None
        self.n_features_ = None

    def get_params(self):
        return {
            "l2": self.l2,
            "max_epochs": self.max_epochs,
            "class_weighting": self.class_weighting,
            "seed": self.seed,
        }

    def fit(self, X, y):
        """Fit on CSR features X and 0/1 labels y (1 = yes)."""
        X = sp.csr_matrix(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y lengths differ")
        if X.shape[0] == 0:
            raise ValueError("empty training set")
        self.n_features_ = X.shape[1]
        n_yes = int(y.sum())
        n = len(y)
        if n_yes == 0 or n_yes == n:
            self.degenerate_ = True
            self.constant_p_yes_ = float(np.clip(n_yes / n, 0.01, 0.99))
            self.coef_ = np.zeros(X.shape[1])
            self.intercept_ = 0.0
            return self
        self.degenerate_ = False
        self.constant_p_yes_ = None
        if self.class_weighting:
            w_yes = n / (2.0 * n_yes)
            w_no = n / (2.0 * (n - n_yes))
            sample_weight = np.where(y == 1.0, w_yes, w_no)
        else:
            sample_weight = np.ones(n)
        w = np.zeros(X.shape[1])
        b = 0.0
        loss, gw, gb = loss_and_grad(w, b, X, y, sample_weight, self.l2)
        lr = 1.0
        for _ in range(self.max_epochs):
            while True:
                w_new = w - lr * gw
                b_new = b - lr * gb
                new_loss, gw_new, gb_new = loss_and_grad(
                    w_new, b_new, X, y, sample_weight, self.l2
                )
                if new_loss <= loss:
                    w, b, loss, gw, gb = w_new, b_new, new_loss, gw_new, gb_new
                    lr *= 1.2
                    break
                lr *= 0.5
                if lr < 1e-14:
                    break
            if lr < 1e-14:
                break
        self.coef_ = w
        self.intercept_ = b
        return self

    def decision_function(self, X):
        if self.coef_ is None:
            raise ValueError("classifier is not fitted")
        if X.shape[1] != self.n_features_:
            raise ValueError(
                f"feature dimension {X.shape[1]} != model dimension {self.n_features_}"
            )
        return np.asarray(X @ self.coef_).ravel() + self.intercept_

    def predict_proba(self, X):
        """Return an (n, 2) array of [p_no, p_yes] rows."""
        if self.degenerate_:
            if X.shape[1] != self.n_features_:
                raise ValueError(
                    f"feature dimension {X.shape[1]} != model dimension {self.n_features_}"
                )
            p_yes = np.full(X.shape[0], self.constant_p_yes_)
        else:
            p_yes = _sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p_yes, p_yes])

    def predict_p_yes(self, X):
        return self.predict_proba(X)[:, 1]

    def embedding(self, X):
        """Embedding view for clustering: the input representation itself."""
        return X

    def to_state(self):
        return {
            "params": self.get_params(),
            "coef": None if self.coef_ is None else self.coef_.tolist(),
            "intercept": self.intercept_,
            "degenerate": self.degenerate_,
            "constant_p_yes": self.constant_p_yes_,
            "n_features": self.n_features_,
        }

    @classmethod
    def from_state(cls, state):
        clf = cls(**state["params"])
        clf.coef_ = None if state["coef"] is None else np.array(state["coef"])
        clf.intercept_ = state["intercept"]
        clf.degenerate_ = state["degenerate"]
        clf.constant_p_yes_ = state["constant_p_yes"]
        clf.n_features_ = state["n_features"]
        return clf
