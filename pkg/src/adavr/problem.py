"""Finite-sum composite objectives over sparse binary-classification data.

The smooth part is an average of per-example losses plus a shared ridge term:

    f(x) = (1/n) * sum_i f_i(x),    f_i(x) = loss(<a_i, x>, y_i) + (lam/2)||x||^2

with labels y_i in {-1, +1}. Supported losses: logistic log(1 + exp(-y z)),
squared 0.5 (z - y)^2, and huber with threshold delta applied to the residual
z - y. Rows are stored compressed (CSR); gradients are returned dense because
the ridge term densifies iterates after one step.

All operations here are pure functions of immutable inputs and are safe to
share across concurrent runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LabeledDataset",
    "LossKind",
    "LOGISTIC",
    "SQUARED",
    "huber",
    "FiniteSumObjective",
    "component_value",
    "component_grad",
    "full_value",
    "full_grad",
    "smoothness_bound",
    "vr_gradient",
]

# integer codes shared with the compiled kernels
LOSS_CODES = {"logistic": 0, "squared": 1, "huber": 2}


@dataclass(frozen=True)
class LossKind:
    """Per-example loss applied to the linear score z = <a_i, x>."""

    kind: str
    delta: float = 1.0

    def __post_init__(self):
        if self.kind not in LOSS_CODES:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "huber" and not self.delta > 0:
            raise ValueError("huber delta must be positive")

    @property
    def code(self) -> int:
        return LOSS_CODES[self.kind]


LOGISTIC = LossKind("logistic")
SQUARED = LossKind("squared")


def huber(delta: float = 1.0) -> LossKind:
    return LossKind("huber", float(delta))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Sparse example matrix (CSR) with binary labels.

    ``indices`` are 0-based, strictly increasing within each row and < d.
    ``labels`` hold -1.0 or +1.0. Arrays are frozen after construction.
    """

    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    labels: np.ndarray
    d: int

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.float64)
        n = labels.shape[0]
        if n < 1:
            raise ValueError("dataset must contain at least one example")
        if self.d < 1:
            raise ValueError("feature dimension must be at least 1")
        if indptr.shape != (n + 1,) or indptr[0] != 0 or indptr[-1] != indices.shape[0]:
            raise ValueError("malformed row pointer array")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("row pointers must be nondecreasing")
        if indices.shape != values.shape:
            raise ValueError("indices and values must align")
        if indices.size:
            if indices.min() < 0 or indices.max() >= self.d:
                raise ValueError("feature index out of range")
            gaps = np.diff(indices)
            row_starts = indptr[1:-1]
            interior = np.ones(indices.size - 1, dtype=bool)
            interior[row_starts[(row_starts > 0) & (row_starts < indices.size)] - 1] = False
            if np.any(gaps[interior] <= 0):
                raise ValueError("row indices must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        object.__setattr__(self, "indptr", _readonly(indptr))
        object.__setattr__(self, "indices", _readonly(indices))
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "labels", _readonly(labels))

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Index/value views of example i."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.values[lo:hi]

    def row_norms_sq(self) -> np.ndarray:
        """||a_i||^2 for every row."""
        return _row_reduce(self.indptr, self.values * self.values, self.n)

    @classmethod
    def from_rows(cls, rows, labels, d: int | None = None) -> "LabeledDataset":
        """Build from a list of (index, value) pair lists."""
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        idx, val = [], []
        for i, row in enumerate(rows):
            for j, v in row:
                idx.append(j)
                val.append(v)
            indptr[i + 1] = len(idx)
        indices = np.asarray(idx, dtype=np.int64)
        if d is None:
            d = int(indices.max()) + 1 if indices.size else 1
        return cls(indptr, indices, np.asarray(val, dtype=np.float64),
                   np.asarray(labels, dtype=np.float64), d)

    @classmethod
    def from_dense(cls, X, y) -> "LabeledDataset":
        X = np.asarray(X, dtype=np.float64)
        n, d = X.shape
        indptr = np.arange(n + 1, dtype=np.int64) * d
        indices = np.tile(np.arange(d, dtype=np.int64), n)
        return cls(indptr, indices, X.ravel().copy(),
                   np.asarray(y, dtype=np.float64), d)


@dataclass(frozen=True, eq=False)
class FiniteSumObjective:
    """f = (1/n) sum f_i with f_i = loss_i + (l2_lambda/2)||x||^2."""

    dataset: LabeledDataset
    loss: LossKind
    l2_lambda: float = 0.0

    def __post_init__(self):
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be nonnegative")

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def d(self) -> int:
        return self.dataset.d


def _row_reduce(indptr: np.ndarray, terms: np.ndarray, n: int) -> np.ndarray:
    """Per-row sums of ``terms`` laid out in CSR order (empty rows give 0)."""
    out = np.zeros(n)
    if terms.size:
        starts = indptr[:-1]
        nonempty = starts < indptr[1:]
        out[nonempty] = np.add.reduceat(terms, starts[nonempty])
    return out


def _scores(ds: LabeledDataset, x: np.ndarray) -> np.ndarray:
    """z_i = <a_i, x> for all rows."""
    return _row_reduce(ds.indptr, ds.values * x[ds.indices], ds.n)


def _loss_values(loss: LossKind, z: np.ndarray, y: np.ndarray) -> np.ndarray:
    if loss.kind == "logistic":
        m = y * z
        return np.log1p(np.exp(-np.abs(m))) + np.maximum(-m, 0.0)
    r = z - y
    if loss.kind == "squared":
        return 0.5 * r * r
    ar = np.abs(r)
    return np.where(ar <= loss.delta, 0.5 * r * r, loss.delta * (ar - 0.5 * loss.delta))


def _loss_slopes(loss: LossKind, z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """d loss / d z. For logistic this is -y * sigmoid(-y z), computed stably."""
    if loss.kind == "logistic":
        m = y * z
        e = np.exp(-np.abs(m))
        sig = np.where(m >= 0.0, e / (1.0 + e), 1.0 / (1.0 + e))
        return -y * sig
    r = z - y
    if loss.kind == "squared":
        return r
    return np.clip(r, -loss.delta, loss.delta)


def _check_point(obj: FiniteSumObjective, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (obj.d,):
        raise ValueError(f"point has dimension {x.shape}, expected ({obj.d},)")
    if not np.all(np.isfinite(x)):
        raise ValueError("point entries must be finite")
    return x


def _check_index(obj: FiniteSumObjective, i: int) -> int:
    if not 0 <= i < obj.n:
        raise IndexError(f"example index {i} out of range [0, {obj.n})")
    return int(i)


def component_value(obj: FiniteSumObjective, i: int, x: np.ndarray) -> float:
    """f_i(x)."""
    i = _check_index(obj, i)
    x = _check_point(obj, x)
    idx, val = obj.dataset.row(i)
    z = np.array([float(val @ x[idx])])
    y = obj.dataset.labels[i:i + 1]
    loss = float(_loss_values(obj.loss, z, y)[0])
    return loss + 0.5 * obj.l2_lambda * float(x @ x)


def component_grad(obj: FiniteSumObjective, i: int, x: np.ndarray) -> np.ndarray:
    """grad f_i(x), returned dense."""
    i = _check_index(obj, i)
    x = _check_point(obj, x)
    idx, val = obj.dataset.row(i)
    z = np.array([float(val @ x[idx])])
    y = obj.dataset.labels[i:i + 1]
    w = float(_loss_slopes(obj.loss, z, y)[0])
    g = obj.l2_lambda * x
    g[idx] += w * val
    return g


def full_value(obj: FiniteSumObjective, x: np.ndarray) -> float:
    """f(x) = (1/n) sum_i f_i(x)."""
    x = _check_point(obj, x)
    z = _scores(obj.dataset, x)
    vals = _loss_values(obj.loss, z, obj.dataset.labels)
    return float(np.sum(vals) / obj.n + 0.5 * obj.l2_lambda * (x @ x))


def full_grad(obj: FiniteSumObjective, x: np.ndarray) -> np.ndarray:
    """grad f(x); costs n individual gradient evaluations when run by an optimizer."""
    x = _check_point(obj, x)
    ds = obj.dataset
    z = _scores(ds, x)
    w = _loss_slopes(obj.loss, z, ds.labels)
    per_entry = np.repeat(w, np.diff(ds.indptr)) * ds.values
    g = np.bincount(ds.indices, weights=per_entry, minlength=obj.d)
    return g / obj.n + obj.l2_lambda * x


def smoothness_bound(obj: FiniteSumObjective) -> float:
    """A common smoothness constant valid for every f_i (upper bound).

    Per-row curvature of the loss along a_i is at most ||a_i||^2 / 4 for
    logistic and ||a_i||^2 for squared/huber; the ridge term adds l2_lambda.
    """
    norms = obj.dataset.row_norms_sq()
    coef = 0.25 if obj.loss.kind == "logistic" else 1.0
    return float(coef * norms.max() + obj.l2_lambda)


def vr_gradient(obj: FiniteSumObjective, i: int, x: np.ndarray, u: np.ndarray,
                grad_f_u: np.ndarray) -> np.ndarray:
    """Variance-reduced estimator grad f_i(x) - grad f_i(u) + grad f(u).

    ``grad_f_u`` must equal full_grad(obj, u). Unbiased for grad f(x); costs
    2 individual gradient evaluations.
    """
    grad_f_u = _check_point(obj, grad_f_u)
    return component_grad(obj, i, x) - component_grad(obj, i, u) + grad_f_u
