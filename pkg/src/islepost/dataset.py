"""Data model, CSV ingestion, synthetic generators, and deterministic splits.

All randomness in this package flows through numpy's PCG64 generator
(``np.random.default_rng``); every stochastic function takes an explicit
integer seed so identical seeds give bit-identical outputs.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "Dataset",
    "FoldAssignment",
    "SplitSpec",
    "load_csv",
    "gen_linear_sparse",
    "gen_friedman_popescu",
    "kfold_split",
    "train_test_split",
    "export_folds_csv",
    "round_half_up",
]


def round_half_up(x: float) -> int:
    """Round with ties away from zero (avoids banker's rounding surprises)."""
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class Dataset:
    """An n×p feature matrix with a length-n target vector.

    Immutable after construction; the arrays are not copied, callers must not
    mutate them.
    """

    features: np.ndarray
    target: np.ndarray
    column_names: tuple[str, ...]
    target_name: str = "y"

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.target, dtype=float)
        if X.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("target length must equal the feature row count")
        if len(self.column_names) != X.shape[1]:
            raise ValueError("column_names length must equal the feature column count")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise DataError("dataset contains non-finite values")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Dataset restricted to the given row indices (in the given order)."""
        return Dataset(self.features[rows], self.target[rows],
                       self.column_names, self.target_name)


@dataclass(frozen=True)
class FoldAssignment:
    """Deterministic k-fold assignment; rebuildable bit-identically from (n, k, seed)."""

    fold_of: np.ndarray
    k: int
    seed: int

    @property
    def n(self) -> int:
        return self.fold_of.shape[0]

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split: train size = round(n * train_fraction), shuffled by seed."""

    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


def load_csv(path, target_column: str) -> Dataset:
    """Load a numeric CSV (header row, comma separated, decimal point).

    The target column is removed from the feature block. Rows with missing or
    non-numeric cells are rejected with the offending location in the message.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if target_column not in header:
            raise ConfigError(
                f"{path}: target column {target_column!r} not in header {header}")
        t_idx = header.index(target_column)
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}")
            parsed = []
            for col, cell in zip(header, row):
                text = cell.strip()
                if text == "":
                    raise DataError(f"{path}: line {line_no}, column {col!r}: empty cell")
                try:
                    parsed.append(float(text))
                except ValueError:
                    raise DataError(
                        f"{path}: line {line_no}, column {col!r}: "
                        f"cannot parse {cell!r} as a number") from None
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    feat_idx = [i for i in range(len(header)) if i != t_idx]
    names = tuple(header[i] for i in feat_idx)
    return Dataset(data[:, feat_idx], data[:, t_idx], names, target_column)


def save_csv(ds: Dataset, path) -> None:
    """Write a Dataset back out in the load_csv format (features then target)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.column_names) + [ds.target_name])
        for i in range(ds.n):
            writer.writerow([repr(v) for v in ds.features[i]] + [repr(ds.target[i])])


def _feature_names(p: int) -> tuple[str, ...]:
    return tuple(f"x{j}" for j in range(p))


def gen_linear_sparse(seed: int, noise_variance: float = 0.3):
    """Sparse linear simulation: 150×100 uniform(0,1) design, uniform(0,1)
    coefficients with a random 85% subset zeroed, Gaussian noise.

    Returns (Dataset, beta). Pass noise_variance=0 for the exact y = X @ beta.
    """
    rng = np.random.default_rng(seed)
    n, p = 150, 100
    X = rng.uniform(0.0, 1.0, size=(n, p))
    beta = rng.uniform(0.0, 1.0, size=p)
    zero_idx = rng.choice(p, size=int(round(0.85 * p)), replace=False)
    beta[zero_idx] = 0.0
    y = X @ beta
    if noise_variance > 0.0:
        y = y + rng.normal(0.0, np.sqrt(noise_variance), size=n)
    return Dataset(X, y, _feature_names(p)), beta


def gen_friedman_popescu(seed: int, n: int = 1000, noise_sd: float = 1.0) -> Dataset:
    """Simulation with a 5-variable Gaussian bump plus a 30-variable linear ramp:

        y_i = 10 * prod_{j<5} exp(-2 x_ij^2) + sum_{5<=j<35} x_ij + e_i

    on an n×100 uniform(0,1) design, e_i ~ N(0, noise_sd^2).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    p = 100
    X = rng.uniform(0.0, 1.0, size=(n, p))
    y = friedman_popescu_signal(X)
    if noise_sd > 0.0:
        y = y + rng.normal(0.0, noise_sd, size=n)
    return Dataset(X, y, _feature_names(p))


def friedman_popescu_signal(X: np.ndarray) -> np.ndarray:
    """Noiseless response surface of gen_friedman_popescu."""
    X = np.asarray(X, dtype=float)
    bump = 10.0 * np.exp(-2.0 * (X[:, :5] ** 2)).prod(axis=1)
    ramp = X[:, 5:35].sum(axis=1)
    return bump + ramp


def kfold_split(n: int, k: int, seed: int) -> FoldAssignment:
    """Shuffled k-fold assignment; fold sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[perm] = np.arange(n) % k
    return FoldAssignment(fold_of, k, seed)


def train_test_split(ds: Dataset, spec: SplitSpec):
    """Disjoint, exhaustive row partition with train size round(n * fraction)."""
    n = ds.n
    n_train = round_half_up(n * spec.train_fraction)
    if n_train < 1 or n_train >= n:
        raise ValueError(
            f"train_fraction={spec.train_fraction} leaves an empty side for n={n}")
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    train_rows = np.sort(perm[:n_train])
    test_rows = np.sort(perm[n_train:])
    return ds.subset(train_rows), ds.subset(test_rows)


def export_folds_csv(folds: FoldAssignment, path) -> None:
    """Two-column CSV (row_index, fold)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_index", "fold"])
        for i, f in enumerate(folds.fold_of):
            writer.writerow([i, int(f)])
