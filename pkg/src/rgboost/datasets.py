"""Dataset loading (csv, libsvm, ranking) and small synthetic generators."""

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fspace import SampleSpace
from .objectives import LabeledData

__all__ = [
    "Dataset",
    "load_dataset",
    "parse_libsvm_line",
    "gaussian_blobs",
    "synthetic_ranking",
    "save_csv",
    "save_libsvm",
    "TASKS",
]

TASKS = ("multiclass", "ranking", "regression")


@dataclass
class Dataset:
    """Features, labels and a deterministic train/test split.

    ``labels`` holds class indices ``0..K-1`` (multiclass), relevance grades
    with query groups (ranking) or real targets (regression).
    ``class_mapping`` maps original class labels to indices.
    """

    space: SampleSpace
    labels: LabeledData
    task: str
    train: np.ndarray
    test: np.ndarray
    class_mapping: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.space.n
        if len(self.labels) != n:
            raise ValueError("label count does not match the number of points")
        tr, te = np.asarray(self.train, dtype=int), np.asarray(self.test, dtype=int)
        if np.intersect1d(tr, te).size or np.union1d(tr, te).size != n or tr.size + te.size != n:
            raise ValueError("train/test splits must be disjoint and cover all points")
        self.train, self.test = tr, te
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}")

    @property
    def features(self):
        return self.space.features

    @property
    def num_classes(self):
        return self.space.output_dim if self.task == "multiclass" else None

    def subset(self, idx, standardize_with=None):
        """``(SampleSpace, LabeledData)`` for the points ``idx`` (uniform weights)."""
        idx = np.asarray(idx, dtype=int)
        X = self.features[idx]
        if standardize_with is not None:
            mu, sd = standardize_with
            X = (X - mu) / sd
        return SampleSpace(X, output_dim=self.space.output_dim), self.labels.subset(idx)

    def standardization(self):
        """Mean and std of the training features (std 0 replaced by 1)."""
        X = self.features[self.train]
        sd = X.std(axis=0)
        return X.mean(axis=0), np.where(sd > 0, sd, 1.0)

    def with_split(self, seed=0, test_fraction=0.2):
        train, test = split_indices(self.labels, seed, test_fraction, by_group=self.task == "ranking")
        return Dataset(self.space, self.labels, self.task, train, test, dict(self.class_mapping))


def split_indices(labels: LabeledData, seed=0, test_fraction=0.2, by_group=False):
    """Seeded shuffle into ``(train, test)`` index arrays (each sorted).

    With ``by_group`` whole query groups are assigned to one side.
    """
    if not 0 <= test_fraction < 1:
        raise ValueError("test_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    n = len(labels)
    if by_group and labels.groups is not None:
        groups = np.unique(labels.groups)
        perm = rng.permutation(len(groups))
        n_test = int(round(test_fraction * len(groups)))
        test_groups = groups[perm[:n_test]]
        is_test = np.isin(labels.groups, test_groups)
        return np.flatnonzero(~is_test), np.flatnonzero(is_test)
    perm = rng.permutation(n)
    n_test = int(round(test_fraction * n))
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def _infer_task(y):
    if np.all(y == np.round(y)) and 2 <= len(np.unique(y)) <= 50:
        return "multiclass"
    return "regression"


def _finish(X, y, task, groups=None, seed=0, test_fraction=0.2, ids=None):
    y = np.asarray(y, dtype=float)
    task = task or _infer_task(y)
    mapping = {}
    if task == "multiclass":
        classes = np.unique(y)
        if len(classes) < 2:
            raise ValueError("multiclass data needs at least two classes")
        mapping = {(int(c) if c == int(c) else float(c)): i for i, c in enumerate(classes)}
        y = np.searchsorted(classes, y)
        k = len(classes)
    else:
        k = 1
    labels = LabeledData(y, None if groups is None else np.asarray(groups))
    space = SampleSpace(X, output_dim=k, ids=ids)
    train, test = split_indices(labels, seed, test_fraction, by_group=task == "ranking")
    return Dataset(space, labels, task, train, test, mapping)


def parse_libsvm_line(line, lineno=0, ranking=False):
    """Parse ``label [qid:G] idx:val ...`` into ``(label, group, {idx: val})``.

    Indices are 1-based in the file and returned 0-based.
    """
    body = line.split("#", 1)[0].split()
    if not body:
        return None
    try:
        label = float(body[0])
    except ValueError:
        raise ValueError(f"line {lineno}: bad label {body[0]!r}") from None
    group = None
    feats = {}
    for tok in body[1:]:
        key, sep, val = tok.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: malformed token {tok!r}")
        if key == "qid":
            group = val
            continue
        try:
            idx = int(key)
            v = float(val)
        except ValueError:
            raise ValueError(f"line {lineno}: malformed token {tok!r}") from None
        if idx < 1:
            raise ValueError(f"line {lineno}: feature indices are 1-based, got {idx}")
        feats[idx - 1] = v
    if ranking and group is None:
        raise ValueError(f"line {lineno}: ranking lines need a qid:G field")
    return label, group, feats


def _load_sparse(path, ranking, d=None):
    labels, groups, rows = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parsed = parse_libsvm_line(line, lineno, ranking)
            if parsed is None:
                continue
            label, group, feats = parsed
            labels.append(label)
            groups.append(group)
            rows.append(feats)
    if not rows:
        raise ValueError(f"{path}: no data lines")
    width = max((max(r) + 1 for r in rows if r), default=1)
    d = width if d is None else max(d, width)
    X = np.zeros((len(rows), d))
    for i, r in enumerate(rows):
        for j, v in r.items():
            X[i, j] = v
    return X, np.array(labels), groups


def _load_csv(path, label_column="label"):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    li = header.index(label_column) if label_column in header else len(header) - 1
    X, y = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field") from None
        y.append(vals[li])
        X.append(vals[:li] + vals[li + 1:])
    return np.array(X), np.array(y)


def load_dataset(path, format="csv", task=None, seed=0, test_fraction=0.2, num_features=None):
    """Read a dataset file.

    Parameters
    ----------
    path : str
    format : {"csv", "libsvm", "ranking"}
        ``csv`` has a header row; the label column is ``label`` or, failing
        that, the last column.  ``libsvm`` lines are ``label idx:val ...``
        (1-based indices, missing entries are zero).  ``ranking`` lines are
        ``relevance qid:G idx:val ...``.
    task : {"multiclass", "ranking", "regression"}, optional
        Inferred when omitted.  The ranking format implies ranking; between
        2 and 50 distinct integer labels imply multiclass.
    """
    if format == "csv":
        X, y = _load_csv(path)
        return _finish(X, y, task, seed=seed, test_fraction=test_fraction)
    if format == "libsvm":
        X, y, _ = _load_sparse(path, ranking=False, d=num_features)
        return _finish(X, y, task, seed=seed, test_fraction=test_fraction)
    if format == "ranking":
        X, y, groups = _load_sparse(path, ranking=True, d=num_features)
        return _finish(X, y, task or "ranking", groups=np.array(groups), seed=seed, test_fraction=test_fraction)
    raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# synthetic data


def gaussian_blobs(n=150, K=3, d=2, spread=1.0, seed=0):
    """``K`` isotropic Gaussian classes with centers on a circle of radius 2."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % K
    angles = 2 * np.pi * np.arange(K) / K
    centers = np.zeros((K, d))
    centers[:, 0] = 2 * np.cos(angles)
    if d > 1:
        centers[:, 1] = 2 * np.sin(angles)
    X = centers[y] + spread * rng.normal(size=(n, d))
    return X, y


def synthetic_ranking(n_queries=10, docs_per_query=8, d=3, noise=0.5, seed=0):
    """Relevance grades 0..2 from a noisy linear score; returns ``(X, relevance, groups)``."""
    rng = np.random.default_rng(seed)
    w = rng.normal(size=d)
    n = n_queries * docs_per_query
    X = rng.normal(size=(n, d))
    score = X @ w + noise * rng.normal(size=n)
    cuts = np.quantile(score, [1 / 3, 2 / 3])
    rel = np.searchsorted(cuts, score).astype(float)
    groups = np.repeat(np.arange(n_queries), docs_per_query)
    return X, rel, groups


def save_csv(path, X, y):
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f{j + 1}" for j in range(X.shape[1])] + ["label"])
        for row, label in zip(X, y):
            w.writerow([repr(float(v)) for v in row] + [repr(float(label)) if float(label) != int(label) else int(label)])


def save_libsvm(path, X, y, groups=None):
    with open(path, "w", newline="\n") as fh:
        for i, row in enumerate(np.asarray(X, dtype=float)):
            label = y[i]
            parts = [str(int(label)) if float(label) == int(label) else repr(float(label))]
            if groups is not None:
                parts.append(f"qid:{groups[i]}")
            parts += [f"{j + 1}:{float(v)!r}" for j, v in enumerate(row) if v != 0]
            fh.write(" ".join(parts) + "\n")
