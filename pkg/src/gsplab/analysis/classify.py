"""Linear one-vs-rest classification with unweighted average recall.

Training is deterministic projected subgradient descent on the
regularized hinge loss (fixed 200 epochs, 1/(C*t) step schedule), so
results are reproducible without depending on an external solver.
"""
from __future__ import annotations

import numpy as np

C_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
EPOCHS = 200


class StratificationError(ValueError):
    pass


class FeatureSchemaError(ValueError):
    pass


def uar(y_true, y_pred) -> float:
    """Unweighted mean of per-class recalls over the true classes."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    recalls = []
    for cls in np.unique(y_true):
        mask = y_true == cls
        recalls.append(np.mean(y_pred[mask] == cls))
    return float(np.mean(recalls))


class _Standardizer:
    def fit(self, X):
        self.mean = X.mean(axis=0)
        self.std = X.std(axis=0)
        self.std[self.std == 0] = 1.0
        return self

    def transform(self, X):
        return (X - self.mean) / self.std


def _train_binary(X: np.ndarray, y: np.ndarray, C: float) -> np.ndarray:
    """Hinge-loss linear classifier, bias as an appended constant feature."""
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    w = np.zeros(d + 1)
    radius = 1.0 / np.sqrt(C)
    for t in range(1, EPOCHS + 1):
        margins = y * (Xa @ w)
        viol = margins < 1.0
        grad = C * w - (Xa[viol] * y[viol, None]).sum(axis=0) / n
        w = w - grad / (C * t)
        norm = np.linalg.norm(w)
        if norm > radius:
            w = w * (radius / norm)
    return w


class LinearOvR:
    def __init__(self, C: float):
        self.C = C

    def fit(self, X, y):
        self.classes = np.unique(y)
        self.weights = np.array([
            _train_binary(X, np.where(y == cls, 1.0, -1.0), self.C)
            for cls in self.classes])
        return self

    def predict(self, X):
        Xa = np.hstack([X, np.ones((X.shape[0], 1))])
        scores = Xa @ self.weights.T
        return self.classes[np.argmax(scores, axis=1)]


def stratified_folds(labels: np.ndarray, k: int,
                     seed: int = 0) -> list[np.ndarray]:
    """Index folds with (near-)equal class counts per fold."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            raise StratificationError(
                f"class {cls!r} has {len(idx)} samples, fewer than k={k}")
        idx = rng.permutation(idx)
        for i, j in enumerate(idx):
            folds[i % k].append(int(j))
    return [np.sort(np.array(f)) for f in folds]


def _select_c(X: np.ndarray, y: np.ndarray, c_grid, seed: int) -> float:
    """Inner 3-fold UAR over the C grid; first grid value wins ties."""
    best_c, best_u = c_grid[0], -1.0
    try:
        folds = stratified_folds(y, 3, seed=seed)
    except StratificationError:
        return c_grid[0]
    for C in c_grid:
        preds, truth = [], []
        for i in range(3):
            test = folds[i]
            train = np.concatenate([folds[j] for j in range(3) if j != i])
            std = _Standardizer().fit(X[train])
            model = LinearOvR(C).fit(std.transform(X[train]), y[train])
            preds.append(model.predict(std.transform(X[test])))
            truth.append(y[test])
        u = uar(np.concatenate(truth), np.concatenate(preds))
        if u > best_u:
            best_u, best_c = u, C
    return best_c


def kfold_uar(features, labels, k: int = 4, c_grid=C_GRID,
              seed: int = 0) -> float:
    """Outer stratified k-fold UAR with nested C selection and per-fold
    standardization fit on training data only."""
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    folds = stratified_folds(y, k, seed=seed)
    preds, truth = [], []
    for i in range(k):
        test = folds[i]
        train = np.concatenate([folds[j] for j in range(k) if j != i])
        C = _select_c(X[train], y[train], c_grid, seed)
        std = _Standardizer().fit(X[train])
        model = LinearOvR(C).fit(std.transform(X[train]), y[train])
        preds.append(model.predict(std.transform(X[test])))
        truth.append(y[test])
    return uar(np.concatenate(truth), np.concatenate(preds))


def cross_predict_uar(train_features, train_labels, test_features,
                      test_labels, c_grid=C_GRID, seed: int = 0) -> float:
    """Fit on one stimulus set, evaluate UAR on the other."""
    Xtr = np.asarray(train_features, dtype=float)
    Xte = np.asarray(test_features, dtype=float)
    if Xtr.ndim != 2 or Xte.ndim != 2 or Xtr.shape[1] != Xte.shape[1]:
        raise FeatureSchemaError(
            f"feature schemas differ: {Xtr.shape} vs {Xte.shape}")
    ytr = np.asarray(train_labels)
    yte = np.asarray(test_labels)
    if set(np.unique(yte)) - set(np.unique(ytr)):
        raise FeatureSchemaError("test labels outside the training label set")
    C = _select_c(Xtr, ytr, c_grid, seed)
    std = _Standardizer().fit(Xtr)
    model = LinearOvR(C).fit(std.transform(Xtr), ytr)
    return uar(yte, model.predict(std.transform(Xte)))
