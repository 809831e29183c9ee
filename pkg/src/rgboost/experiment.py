"""Experiment configuration, orchestration, metrics and curve emission."""

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .datasets import Dataset
from .descent import (
    Ensemble, Fixed, InvLambdaT, InvSqrtT, LineSearch, Threshold,
    run_naive, run_repeated, run_residual,
)
from .errors import SchemaError
from .fspace import FnVec, SampleSpace
from .learners import EnumeratedClass, counterexample_class, make_learner
from .objectives import TwoPointAbs, make_objective, preference_pairs

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "make_schedule",
    "run_experiment",
    "compare",
    "task_metric",
    "eval_metrics",
    "emit_curves",
    "read_curves",
    "counterexample_demo",
    "CURVE_HEADER",
    "CONFIG_SCHEMA",
]

CONFIG_SCHEMA = 1
ALGORITHMS = ("naive", "repeated", "repeated-threshold", "residual")
CURVE_HEADER = ["t", "weak_learners", "train_objective", "test_objective",
                "train_metric", "test_metric", "edge", "step"]
DEFAULT_OBJECTIVE = {"multiclass": "multiclass_hinge", "ranking": "ranking_hinge", "regression": "squared"}
DEFAULT_LEARNER = {"multiclass": "multiclass_stump", "ranking": "regression_stump",
                   "regression": "regression_stump"}


@dataclass
class ExperimentConfig:
    objective: Optional[str] = None
    lam: float = 0.0
    learner: Optional[str] = None
    algorithm: str = "residual"
    schedule: dict = field(default_factory=lambda: {"name": "inv_sqrt"})
    T: int = 100
    seed: int = 0
    test_fraction: float = 0.2
    standardize: bool = False
    threshold: dict = field(default_factory=lambda: {"eps0": 1.0, "power": 0.5, "max_inner": 1000})
    curves_path: Optional[str] = None
    model_path: Optional[str] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if int(self.T) < 1:
            raise ValueError("T must be >= 1")
        self.T = int(self.T)
        make_schedule(self.schedule)  # validates

    def resolved(self, task):
        """Copy with task defaults filled in for objective and learner."""
        d = asdict(self)
        d["objective"] = d["objective"] or DEFAULT_OBJECTIVE[task]
        d["learner"] = d["learner"] or DEFAULT_LEARNER[task]
        return ExperimentConfig(**d)

    def to_dict(self):
        return {"schema": CONFIG_SCHEMA, **asdict(self)}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        schema = d.pop("schema", None)
        if schema != CONFIG_SCHEMA:
            raise SchemaError(f"expected config schema {CONFIG_SCHEMA}, got {schema!r}")
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise SchemaError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def make_schedule(spec):
    """Build a step schedule from ``{"name": ..., params}``."""
    spec = dict(spec)
    name = spec.pop("name", None)
    if name == "fixed":
        return Fixed(float(spec.get("eta", 1.0)))
    if name == "inv_sqrt":
        return InvSqrtT()
    if name == "inv_lambda_t":
        return InvLambdaT(float(spec.get("c", 1.0)), float(spec["lam"]))
    if name == "line_search":
        return LineSearch(float(spec.get("shrink", 0.5)), int(spec.get("max_evals", 50)))
    raise ValueError(f"unknown schedule {name!r}")


# ---------------------------------------------------------------------------
# metrics


def task_metric(values, labels, task, groups=None):
    """Multiclass 0/1 error, ranking pair disagreement, or regression MSE.

    Argmax ties go to the lowest class index; a ranking pair with equal
    scores counts as violated.
    """
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.shape[0] == 0:
        return float("nan")
    if task == "multiclass":
        if values.shape[1] < 2:
            raise ValueError("multiclass metric needs one output per class")
        return float(np.mean(np.argmax(values, axis=1) != labels))
    if values.shape[1] != 1:
        raise ValueError(f"{task} metric needs a single output")
    v = values[:, 0]
    if task == "ranking":
        pairs = preference_pairs(labels, np.zeros(len(v), dtype=int) if groups is None else groups)
        if len(pairs) == 0:
            return float("nan")
        return float(np.mean(v[pairs[:, 0]] <= v[pairs[:, 1]]))
    if task == "regression":
        return float(np.mean((v - labels.astype(float)) ** 2))
    raise ValueError(f"unknown task {task!r}")


def eval_metrics(model: Ensemble, data: Dataset, task=None, idx=None):
    """Task metric of ``model`` on ``data`` (all points, or the rows ``idx``)."""
    task = task or data.task
    idx = np.arange(data.space.n) if idx is None else np.asarray(idx, dtype=int)
    expected = data.space.output_dim
    if model.output_dim != expected:
        raise ValueError(f"model has output_dim {model.output_dim}, data needs {expected}")
    pred = model.predict(data.features[idx])
    groups = None if data.labels.groups is None else data.labels.groups[idx]
    name = {"multiclass": "error_rate", "ranking": "disagreement", "regression": "mse"}[task]
    return {"task": task, "metric": name, "value": task_metric(pred, data.labels.labels[idx], task, groups),
            "n": int(idx.size)}


# ---------------------------------------------------------------------------
# curves


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and np.isnan(x)) else repr(float(x))


def emit_curves(report, evals, path):
    """Write the per-iteration curve CSV (header only for an empty run)."""
    if len(evals) != len(report.records):
        raise ValueError("evals and report records must have the same length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for r, e in zip(report.records, evals):
            w.writerow([r.t, r.weak_learners, _fmt(r.objective), _fmt(e.get("test_objective")),
                        _fmt(e.get("train_metric")), _fmt(e.get("test_metric")), _fmt(r.edge), _fmt(r.step)])


def read_curves(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CURVE_HEADER:
        raise SchemaError(f"{path}: unexpected curve header")
    out = []
    for row in rows[1:]:
        rec = {"t": int(row[0]), "weak_learners": int(row[1])}
        for key, val in zip(CURVE_HEADER[2:], row[2:]):
            rec[key] = float(val) if val else None
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# orchestration


@dataclass
class ExperimentResult:
    model: Ensemble
    report: object
    evals: list
    config: ExperimentConfig


def run_algorithm(cfg, obj, learner, callback):
    schedule = make_schedule(cfg.schedule)
    if cfg.algorithm == "naive":
        return run_naive(obj, learner, schedule, cfg.T, callback=callback)
    if cfg.algorithm == "repeated":
        return run_repeated(obj, learner, schedule, cfg.T, callback=callback)
    if cfg.algorithm == "repeated-threshold":
        th = cfg.threshold
        eps0, power = float(th.get("eps0", 1.0)), float(th.get("power", 0.5))
        policy = Threshold(lambda t: eps0 / t**power, int(th.get("max_inner", 1000)))
        return run_repeated(obj, learner, schedule, cfg.T, inner_policy=policy, callback=callback)
    return run_residual(obj, learner, schedule, cfg.T, callback=callback)


def run_experiment(config: ExperimentConfig, data: Dataset) -> ExperimentResult:
    """Train on the train split, track train/test objective and metric per iteration.

    Writes ``config.curves_path`` (curve CSV) and ``config.model_path``
    (model JSON) when set.  If training raises, the curve rows collected so
    far are still written before the error propagates.
    """
    cfg = config.resolved(data.task)
    std = data.standardization() if cfg.standardize else None
    train_space, train_labels = data.subset(data.train, std)
    obj = make_objective(cfg.objective, train_space, train_labels, cfg.lam)
    learner = make_learner(cfg.learner)

    has_test = data.test.size > 0
    if has_test:
        test_space, test_labels = data.subset(data.test, std)
        test_obj = make_objective(cfg.objective, test_space, test_labels, cfg.lam)
        test_X = test_space.features
        test_pred = np.zeros((data.test.size, data.space.output_dim))
    evals = []
    used = [0]

    def callback(rec, model):
        nonlocal test_pred
        e = {"train_metric": task_metric(model.f.values, train_labels.labels, data.task, train_labels.groups)}
        if has_test:
            if used[0] == 0:
                test_pred = model.predict(test_X, upto=0)
            for c, h in model.terms[used[0]:]:
                test_pred = test_pred - c * h.predict(test_X)
            used[0] = len(model.terms)
            e["test_objective"] = test_obj.value(FnVec(test_space, test_pred))
            e["test_metric"] = task_metric(test_pred, test_labels.labels, data.task, test_labels.groups)
        evals.append(e)

    model = report = None
    try:
        model, report = run_algorithm(cfg, obj, learner, callback)
    finally:
        if cfg.curves_path and report is None:
            # failure mid-run: flush whatever the callback saw
            with open(cfg.curves_path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CURVE_HEADER)
                for i, e in enumerate(evals, 1):
                    w.writerow([i, "", "", _fmt(e.get("test_objective")), _fmt(e.get("train_metric")),
                                _fmt(e.get("test_metric")), "", ""])
    if cfg.curves_path:
        emit_curves(report, evals, cfg.curves_path)
    if cfg.model_path:
        model.save(cfg.model_path)
    return ExperimentResult(model, report, evals, cfg)


def compare(config: ExperimentConfig, data: Dataset, out_dir, algorithms=("naive", "repeated", "residual")):
    """Run several algorithms on the same data and seed; one curve CSV and model JSON each."""
    os.makedirs(out_dir, exist_ok=True)
    results = {}
    for alg in algorithms:
        d = asdict(config)
        d.update(algorithm=alg, curves_path=os.path.join(out_dir, f"curves_{alg}.csv"),
                 model_path=os.path.join(out_dir, f"model_{alg}.json"))
        results[alg] = run_experiment(ExperimentConfig(**d), data)
    return results


def counterexample_demo(T=500, out_dir=None):
    """Run all three algorithms on ``2|f(x1)| + |f(x2)|`` from ``f0 = (0.5, 1.0)``.

    Returns ``{algorithm: (model, report)}``; with ``out_dir`` also writes
    ``report_<algorithm>.csv`` files.
    """
    space = SampleSpace.uniform(2)
    obj = TwoPointAbs(space)
    cls = EnumeratedClass(counterexample_class(space))
    f0 = FnVec(space, [0.5, 1.0])
    out = {
        "naive": run_naive(obj, cls, InvSqrtT(), T, f0=f0),
        "repeated": run_repeated(obj, cls, InvSqrtT(), T, f0=f0),
        "residual": run_residual(obj, cls, InvSqrtT(), T, f0=f0),
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for alg, (_, report) in out.items():
            report.to_csv(os.path.join(out_dir, f"report_{alg}.csv"))
    return out
