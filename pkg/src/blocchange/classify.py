"""K-nearest-neighbor classification under cosine distance, with
stratified k-fold and leave-one-out evaluation.

Labels are integers: 1 for the positive class (bot, IO account), 0 for the
negative class.  Confusion matrices are ``[[TN, FP], [FN, TP]]`` (rows are the
true class, columns the predicted class).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

K_RANGE = tuple(range(1, 11))


class EvaluationError(ValueError):
    """The data cannot support the requested protocol (missing class, starved folds)."""


@dataclass
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    k: int = 1

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if len(self.X) == 0:
            raise ValueError("empty training set")
        if not 1 <= self.k <= len(self.X):
            raise ValueError(f"K={self.k} outside 1..{len(self.X)}")
        self.norms = np.linalg.norm(self.X, axis=1)
        assert np.all(self.norms > 0), "zero-norm training vector"

    def distances(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        assert nx > 0, "zero-norm query vector"
        return 1.0 - (self.X @ x) / (self.norms * nx)

    def neighbor_order(self, x) -> np.ndarray:
        # stable sort: equal distances keep training-set order
        return np.argsort(self.distances(x), kind="stable")

    def predict(self, x, k: Optional[int] = None) -> int:
        return vote(self.y[self.neighbor_order(x)], k or self.k)


def vote(ordered_labels: Sequence[int], k: int) -> int:
    """Majority among the first k labels; a tied vote goes to the nearest neighbor."""
    top = ordered_labels[:k]
    pos = int(np.sum(top))
    if 2 * pos > k:
        return 1
    if 2 * pos < k:
        return 0
    return int(top[0])


def knn_predict(model: KnnModel, x) -> int:
    return model.predict(x)


def confusion(y_true, y_pred) -> np.ndarray:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    m = np.zeros((2, 2), dtype=int)
    np.add.at(m, (y_true, y_pred), 1)
    return m


def _safe_div(a, b) -> float:
    return a / b if b else 0.0


def macro_metrics(conf) -> tuple[float, float, float]:
    """Per-class precision, recall, F1 (0/0 taken as 0), averaged over both classes."""
    conf = np.asarray(conf)
    ps, rs, fs = [], [], []
    for c in (0, 1):
        tp = conf[c, c]
        fp = conf[1 - c, c]
        fn = conf[c, 1 - c]
        p = _safe_div(tp, tp + fp)
        r = _safe_div(tp, tp + fn)
        ps.append(p)
        rs.append(r)
        fs.append(_safe_div(2 * p * r, p + r))
    return float(np.mean(ps)), float(np.mean(rs)), float(np.mean(fs))


@dataclass
class KResult:
    k: int
    precision: float
    recall: float
    f1: float
    confusion: list

    def to_dict(self):
        return {"k": self.k, "precision": self.precision, "recall": self.recall,
                "f1": self.f1, "confusion": self.confusion}


@dataclass
class EvalReport:
    protocol: str
    seed: Optional[int]
    n: int
    per_k: list[KResult] = field(default_factory=list)
    folds: Optional[int] = None
    selection_rule: str = "pooled out-of-fold predictions; best macro-F1, smallest K on ties"

    @property
    def best(self) -> KResult:
        # max() returns the first maximal element, i.e. the smallest K
        return max(self.per_k, key=lambda r: r.f1)

    @property
    def best_k(self) -> int:
        return self.best.k

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "n": self.n,
            "folds": self.folds,
            "selection_rule": self.selection_rule,
            "best_k": self.best_k,
            "per_k": [r.to_dict() for r in self.per_k],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(protocol=d["protocol"], seed=d["seed"], n=d["n"],
                   per_k=[KResult(**r) for r in d["per_k"]], folds=d.get("folds"),
                   selection_rule=d.get("selection_rule", cls.selection_rule))


def _check_classes(y: np.ndarray, need: int):
    for c in (0, 1):
        count = int(np.sum(y == c))
        if count == 0:
            raise EvaluationError(f"class {c} has no members")
        if count < need:
            raise EvaluationError(f"class {c} has {count} members, fewer than {need} folds")


def stratified_folds(y, folds: int = 5, seed: int = 0) -> np.ndarray:
    """Fold id per sample; each class is shuffled and dealt round-robin."""
    y = np.asarray(y, dtype=int)
    _check_classes(y, folds)
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=int)
    offset = 0
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        idx = idx[rng.permutation(len(idx))]
        assignment[idx] = (np.arange(len(idx)) + offset) % folds
        offset += len(idx)
    return assignment


def _predict_block(X_train, y_train, X_test, ks) -> np.ndarray:
    """Predictions for every test row and every K: shape (len(ks), n_test)."""
    model = KnnModel(X_train, y_train, 1)
    out = np.empty((len(ks), len(X_test)), dtype=int)
    for j, x in enumerate(X_test):
        ordered = model.y[model.neighbor_order(x)]
        for i, k in enumerate(ks):
            out[i, j] = vote(ordered, k)
    return out


def _report(protocol, seed, y, preds, ks, folds=None) -> EvalReport:
    rep = EvalReport(protocol=protocol, seed=seed, n=len(y), folds=folds)
    for i, k in enumerate(ks):
        conf = confusion(y, preds[i])
        p, r, f = macro_metrics(conf)
        rep.per_k.append(KResult(k, p, r, f, conf.tolist()))
    return rep


def stratified_kfold(X, y, folds: int = 5, seed: int = 0,
                     k_range: Sequence[int] = K_RANGE) -> EvalReport:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    assignment = stratified_folds(y, folds, seed)
    min_train = min(int(np.sum(assignment != f)) for f in range(folds))
    ks = [k for k in k_range if k <= min_train]
    preds = np.empty((len(ks), len(y)), dtype=int)
    for f in range(folds):
        test = assignment == f
        preds[:, test] = _predict_block(X[~test], y[~test], X[test], ks)
    return _report("stratified_5fold" if folds == 5 else f"stratified_{folds}fold",
                   seed, y, preds, ks, folds)


def loocv(X, y, k_range: Sequence[int] = K_RANGE) -> EvalReport:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    _check_classes(y, 1)
    n = len(y)
    ks = [k for k in k_range if k <= n - 1]
    preds = np.empty((len(ks), n), dtype=int)
    idx = np.arange(n)
    for i in range(n):
        train = idx != i
        preds[:, i] = _predict_block(X[train], y[train], X[i:i + 1], ks)[:, 0]
    return _report("loocv", None, y, preds, ks, n)
