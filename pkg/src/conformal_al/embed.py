"""TF-IDF vectorization used both as classifier features and clustering embeddings."""

import re

import numpy as np
import scipy.sparse as sp

_TOKEN_RE = re.compile(r"[^\W_]{2,}", re.UNICODE)


def tokenize(text, lowercase=True):
    """Maximal runs of Unicode letters/digits of length >= 2, lowercased."""
    if lowercase:
        text = text.lower()
    return _TOKEN_RE.findall(text)


class TfidfEncoder:
    """Unigram TF-IDF encoder with smoothed idf and L2-normalized rows.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, with N the corpus size. Terms with
    document frequency below ``min_df`` are dropped; the ``max_features`` most
    frequent terms (by document frequency, ties broken lexicographically) are
    retained. Fitted state is immutable; ``transform`` is pure.
    """

    def __init__(self, min_df=2, max_features=50000, lowercase=True):
        self.min_df = min_df
        self.max_features = max_features
        self.lowercase = lowercase
        self.vocabulary_ = None
        self.idf_ = None

    def get_params(self):
        return {
            "min_df": self.min_df,
            "max_features": self.max_features,
            "lowercase": self.lowercase,
        }

    @property
    def dimension(self):
        return len(self.vocabulary_) if self.vocabulary_ is not None else 0

    def fit(self, texts):
        texts = list(texts)
        if not texts:
            raise ValueError("cannot fit a vocabulary on an empty corpus")
        df = {}
        for text in texts:
            for term in set(tokenize(text, self.lowercase)):
                df[term] = df.get(term, 0) + 1
        terms = [t for t in df if df[t] >= self.min_df]
        # Highest document frequency first; lexicographic tie-break keeps the
        # retained set deterministic when max_features truncates.
        terms.sort(key=lambda t: (-df[t], t))
        terms = terms[: self.max_features]
        terms.sort()
        n = len(texts)
        self.vocabulary_ = {t: i for i, t in enumerate(terms)}
        self.idf_ = np.array(
            [np.log((1.0 + n) / (1.0 + df[t])) + 1.0 for t in terms], dtype=np.float64
        )
        return self

    def transform(self, texts):
        """Encode ``texts`` as an L2-normalized CSR matrix of shape (n, V).

        Out-of-vocabulary terms are ignored; an all-OOV document yields a zero
        row (norm 0 is permitted).
        """
        if self.vocabulary_ is None:
            raise ValueError("encoder is not fitted")
        indptr = [0]
        indices = []
        data = []
        for text in texts:
            counts = {}
            for term in tokenize(text, self.lowercase):
                idx = self.vocabulary_.get(term)
                if idx is not None:
                    counts[idx] = counts.get(idx, 0) + 1
            for idx in sorted(counts):
                indices.append(idx)
                data.append(counts[idx] * self.idf_[idx])
            indptr.append(len(indices))
        mat = sp.csr_matrix(
            (np.array(data, dtype=np.float64), indices, indptr),
            shape=(len(indptr) - 1, self.dimension),
        )
        norms = np.sqrt(mat.multiply(mat).sum(axis=1)).A1
        norms[norms == 0.0] = 1.0
        inv = sp.diags(1.0 / norms)
        return (inv @ mat).tocsr()

    def fit_transform(self, texts):
        texts = list(texts)
        return self.fit(texts).transform(texts)

    def to_state(self):
        terms = sorted(self.vocabulary_, key=self.vocabulary_.get)
        return {
            "params": self.get_params(),
            "terms": terms,
            "idf": self.idf_.tolist(),
        }

    @classmethod
    def from_state(cls, state):
        enc = cls(**state["params"])
        enc.vocabulary_ = {t: i for i, t in enumerate(state["terms"])}
        enc.idf_ = np.array(state["idf"], dtype=np.float64)
        return enc
