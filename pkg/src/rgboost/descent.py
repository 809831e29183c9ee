"""Restricted gradient descent: the naive, repeated and residual projection algorithms.

Each algorithm walks ``f_t = f_{t-1} - (step) * (projected direction)``, where
directions come from a weak learner (any object with ``fit(target) ->
Hypothesis``).  The boosted model is kept as an :class:`Ensemble`; a
:class:`TrainReport` logs one record per outer iteration plus every
projection performed, for bound checking.
"""

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Callable, List, Optional

import numpy as np

from .errors import DegenerateHypothesisError, SchemaError, ZeroGradientError, ZeroProjectionError
from .fspace import FnVec, inner, norm
from .learners import Hypothesis, hypothesis_from_dict

__all__ = [
    "project_coefficient",
    "Fixed",
    "InvLambdaT",
    "InvSqrtT",
    "LineSearch",
    "line_search",
    "FixedPerIteration",
    "Threshold",
    "Ensemble",
    "IterationRecord",
    "ProjectionRecord",
    "TrainReport",
    "run_naive",
    "run_repeated",
    "run_residual",
    "ZERO_GRADIENT_TOL",
    "MODEL_SCHEMA",
]

ZERO_GRADIENT_TOL = 1e-12
MODEL_SCHEMA = 1
REPORT_HEADER = ["t", "weak_learners", "objective", "grad_norm", "edge", "step", "residual_norm"]


def _vec(h):
    if isinstance(h, FnVec):
        return h
    if h.vec is None:
        raise ValueError("hypothesis has no cached training-space vector")
    return h.vec


def project_coefficient(target: FnVec, h) -> float:
    """``<target, h> / ||h||^2``: the multiple of ``h`` closest to ``target``."""
    v = _vec(h)
    hh = inner(v, v)
    if hh <= 0.0:
        raise DegenerateHypothesisError("cannot project onto a zero-norm hypothesis")
    return inner(target, v) / hh


# ---------------------------------------------------------------------------
# step sizes


@dataclass(frozen=True)
class Fixed:
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("step size must be positive")

    def __call__(self, t):
        return self.eta


@dataclass(frozen=True)
class InvLambdaT:
    """``c / (lam * t)``."""

    c: float
    lam: float

    def __post_init__(self):
        if not (self.c > 0 and self.lam > 0):
            raise ValueError("c and lam must be positive")

    def __call__(self, t):
        return self.c / (self.lam * t)


@dataclass(frozen=True)
class InvSqrtT:
    def __call__(self, t):
        return 1.0 / math.sqrt(t)


@dataclass(frozen=True)
class LineSearch:
    """Backtracking from ``eta = 1``; the step is chosen per iteration by :func:`line_search`."""

    shrink: float = 0.5
    max_evals: int = 50

    def __post_init__(self):
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")


def line_search(obj, f, direction, shrink=0.5, max_evals=50):
    """Largest ``eta`` in ``1, shrink, shrink^2, ...`` with ``R[f - eta d] < R[f]``.

    Returns 0.0 if none of the first ``max_evals`` trial steps decreases the
    objective.
    """
    if not 0 < shrink < 1:
        raise ValueError("shrink must lie in (0, 1)")
    base = obj.value(f)
    eta = 1.0
    for _ in range(max_evals):
        trial = FnVec(f.space, f.values - eta * direction.values)
        if obj.value(trial) < base:
            return eta
        eta *= shrink
    return 0.0


# ---------------------------------------------------------------------------
# inner-loop policies for the repeated algorithm


@dataclass(frozen=True)
class FixedPerIteration:
    """Run ``t`` inner projections at outer iteration ``t``."""

    def budget(self, t):
        return t

    def done(self, t, residual_norm):
        return False


@dataclass(frozen=True)
class Threshold:
    """Project until ``||residual|| <= eps(t)`` (or ``max_inner`` projections)."""

    eps: Callable[[int], float]
    max_inner: int = 1000

    def __post_init__(self):
        if self.max_inner < 1:
            raise ValueError("max_inner must be >= 1")

    def budget(self, t):
        return self.max_inner

    def done(self, t, residual_norm):
        return residual_norm <= self.eps(t)


# ---------------------------------------------------------------------------
# model


class Ensemble:
    """``f = offset - sum_i coefficient_i * h_i``.

    Parameters
    ----------
    space : SampleSpace, optional
        Training space.  When given, ``f`` (the model's values on that space)
        is maintained incrementally.
    offset : array_like or FnVec, optional
        A constant output vector (shape ``(k,)``) or an arbitrary starting
        function on ``space``.  Defaults to zero.
    """

    def __init__(self, space=None, offset=None, output_dim=None):
        self.space = space
        if output_dim is None:
            output_dim = space.output_dim if space is not None else 1
        self.output_dim = int(output_dim)
        if offset is None:
            offset = np.zeros(self.output_dim)
        if isinstance(offset, FnVec):
            if space is not None and offset.space is not space:
                raise ValueError("offset function is not bound to the ensemble's space")
            self.offset = offset
        else:
            self.offset = np.broadcast_to(np.asarray(offset, dtype=float), (self.output_dim,)).copy()
        self.terms: List[tuple] = []
        self.f = self._offset_on(space) if space is not None else None

    def _offset_on(self, space):
        if isinstance(self.offset, FnVec):
            if self.offset.space is not space:
                raise ValueError("a function-valued offset is only defined on its own space")
            return self.offset
        return space.constant(self.offset)

    def add(self, coefficient, h: Hypothesis):
        self.terms.append((float(coefficient), h))
        if self.f is not None:
            self.f = FnVec(self.space, self.f.values - float(coefficient) * _vec(h).values)

    def __len__(self):
        return len(self.terms)

    def rebuild(self) -> FnVec:
        """Recompute the training-space values from scratch."""
        vals = np.array(self._offset_on(self.space).values)
        for c, h in self.terms:
            vals = vals - c * h.evaluate(self.space).values
        return FnVec(self.space, vals)

    def predict(self, X, upto=None):
        """Model outputs on new feature rows (``upto`` limits the number of terms used)."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if isinstance(self.offset, FnVec):
            if not np.array_equal(X, self.offset.space.features):
                raise ValueError("a function-valued offset cannot be evaluated on new points")
            out = np.array(self.offset.values)
        else:
            out = np.tile(self.offset, (X.shape[0], 1))
        for c, h in self.terms[:upto]:
            out = out - c * h.predict(X)
        return out

    def to_dict(self):
        if isinstance(self.offset, FnVec):
            offset = {"values": self.offset.values.tolist()}
        else:
            offset = self.offset.tolist()
        return {
            "schema": MODEL_SCHEMA,
            "output_dim": self.output_dim,
            "offset": offset,
            "terms": [{"coefficient": c, "hypothesis": h.to_dict()} for c, h in self.terms],
        }

    @classmethod
    def from_dict(cls, d, space=None, members=None):
        if not isinstance(d, dict) or d.get("schema") != MODEL_SCHEMA:
            raise SchemaError(f"expected model schema {MODEL_SCHEMA}, got {d.get('schema') if isinstance(d, dict) else d!r}")
        try:
            offset = d["offset"]
            if isinstance(offset, dict):
                if space is None:
                    raise SchemaError("a function-valued offset needs the training space")
                offset = FnVec(space, offset["values"])
            terms = [(float(t["coefficient"]), hypothesis_from_dict(t["hypothesis"], members))
                     for t in d["terms"]]
            model = cls(space, offset, output_dim=int(d["output_dim"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"malformed model: {exc}") from exc
        for c, h in terms:
            if space is not None and h.vec is None:
                h.vec = h.evaluate(space)
            model.add(c, h)
        return model

    def save(self, path):
        with open(path, "w", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path, space=None, members=None):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(d, space=space, members=members)


# ---------------------------------------------------------------------------
# reports


@dataclass
class IterationRecord:
    t: int
    weak_learners: int
    objective: float
    grad_norm: float
    edge: float
    step: float
    residual_norm: Optional[float] = None
    f_norm: float = 0.0


@dataclass
class ProjectionRecord:
    """Diagnostics for one projection ``target -> c * h``."""

    t: int
    target_norm: float
    h_norm: float
    coefficient: float
    edge: float
    residual_norm: float
    pythagoras_error: float
    orthogonality_error: float


@dataclass
class TrainReport:
    algorithm: str
    initial_objective: float
    initial_f_norm: float = 0.0
    records: List[IterationRecord] = field(default_factory=list)
    projections: List[ProjectionRecord] = field(default_factory=list)
    targets: List[FnVec] = field(default_factory=list)
    gradients: List[FnVec] = field(default_factory=list)
    status: str = "running"

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def objectives(self):
        return self.column("objective")

    @property
    def max_grad_norm(self):
        return max((r.grad_norm for r in self.records), default=0.0)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_HEADER)
            for r in self.records:
                w.writerow([r.t, r.weak_learners, repr(r.objective), repr(r.grad_norm), repr(r.edge),
                            repr(r.step), "" if r.residual_norm is None else repr(r.residual_norm)])

    @staticmethod
    def read_csv(path):
        """Parse a report CSV back into a list of :class:`IterationRecord` (``f_norm`` is not stored)."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != REPORT_HEADER:
            raise SchemaError(f"{path}: unexpected header {rows[0] if rows else None}")
        out = []
        for row in rows[1:]:
            out.append(IterationRecord(int(row[0]), int(row[1]), float(row[2]), float(row[3]),
                                       float(row[4]), float(row[5]), float(row[6]) if row[6] else None))
        return out

    def summary(self):
        d = {"algorithm": self.algorithm, "status": self.status, "iterations": len(self.records),
             "initial_objective": self.initial_objective}
        if self.records:
            d.update({k: v for k, v in asdict(self.records[-1]).items() if k != "t"})
        return d


# ---------------------------------------------------------------------------
# algorithms


def _realized_edge(target, hv, ip):
    tn, hn = norm(target), norm(hv)
    if tn == 0 or hn == 0:
        return 0.0
    return ip / (tn * hn)


class _Run:
    """Shared bookkeeping for the three algorithms."""

    def __init__(self, name, obj, learner, schedule, f0, keep_targets, callback):
        self.obj = obj
        self.learner = learner
        self.schedule = schedule
        self.callback = callback
        self.keep_targets = keep_targets
        space = obj.space
        self.model = Ensemble(space, offset=f0 if f0 is not None else None)
        self.report = TrainReport(name, obj.value(self.model.f), norm(self.model.f))
        self.weak_learners = 0

    @property
    def f(self):
        return self.model.f

    def project(self, t, target):
        """Fit the learner to ``target`` and return ``(h, c, edge)``; logs diagnostics."""
        if self.keep_targets:
            self.report.targets.append(target)
        h = self.learner.fit(target)
        hv = _vec(h)
        self.weak_learners += 1
        ip = inner(target, hv)
        hh = inner(hv, hv)
        if hh <= 0:
            raise DegenerateHypothesisError("weak learner returned a zero-norm hypothesis")
        c = ip / hh
        resid = FnVec(target.space, target.values - c * hv.values)
        tt = inner(target, target)
        rr = inner(resid, resid)
        edge = _realized_edge(target, hv, ip)
        self.report.projections.append(ProjectionRecord(
            t, math.sqrt(tt), math.sqrt(hh), c, edge, math.sqrt(rr),
            abs(tt - (c * c * hh + rr)), abs(inner(resid, hv)),
        ))
        return h, c, edge, resid

    def step_size(self, t, direction):
        if isinstance(self.schedule, LineSearch):
            return line_search(self.obj, self.f, direction, self.schedule.shrink, self.schedule.max_evals)
        return float(self.schedule(t))

    def record(self, t, grad_norm, edge, step, residual_norm=None):
        rec = IterationRecord(t, self.weak_learners, self.obj.value(self.f), grad_norm, edge, step,
                              residual_norm, norm(self.f))
        self.report.records.append(rec)
        if self.callback is not None:
            self.callback(rec, self.model)

    def gradient(self):
        g = self.obj.subgradient(self.f)
        if self.keep_targets:
            self.report.gradients.append(g)
        return g, norm(g)

    def finish(self, status):
        self.report.status = status
        return self.model, self.report


def run_naive(obj, learner, schedule, T, f0=None, keep_targets=False, callback=None):
    """Single projection per iteration: ``f <- f - eta_t * c * h`` with ``h`` fit to the subgradient.

    Returns ``(Ensemble, TrainReport)``.  Stops early with status
    ``"optimal"`` once the subgradient vanishes, or ``"stalled"`` if a line
    search finds no decrease.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    run = _Run("naive", obj, learner, schedule, f0, keep_targets, callback)
    for t in range(1, T + 1):
        g, gn = run.gradient()
        if gn <= ZERO_GRADIENT_TOL:
            return run.finish("optimal")
        h, c, edge, _ = run.project(t, g)
        direction = FnVec(g.space, c * _vec(h).values)
        eta = run.step_size(t, direction)
        if eta == 0.0:
            run.record(t, gn, edge, 0.0)
            return run.finish("stalled")
        run.model.add(eta * c, h)
        run.record(t, gn, edge, eta)
    return run.finish("completed")


def run_repeated(obj, learner, schedule, T, f0=None, inner_policy=None, keep_targets=False,
                 callback=None):
    """Repeated projection: rebuild each subgradient from several weak learners.

    At outer iteration ``t`` the subgradient is approximated greedily:
    ``h* += c_k h_k`` and ``residual -= c_k h_k`` for ``k = 1, 2, ...``
    (``t`` times under :class:`FixedPerIteration`, or until the residual
    drops below a :class:`Threshold`).  Then ``f <- f - eta_t h*``.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    policy = FixedPerIteration() if inner_policy is None else inner_policy
    name = "repeated" if isinstance(policy, FixedPerIteration) else "repeated-threshold"
    run = _Run(name, obj, learner, schedule, f0, keep_targets, callback)
    for t in range(1, T + 1):
        g, gn = run.gradient()
        if gn <= ZERO_GRADIENT_TOL:
            return run.finish("optimal")
        resid = g
        parts = []
        first_edge = None
        for _ in range(policy.budget(t)):
            if norm(resid) <= ZERO_GRADIENT_TOL or policy.done(t, norm(resid)):
                break
            try:
                h, c, edge, new_resid = run.project(t, resid)
            except (ZeroGradientError, ZeroProjectionError, DegenerateHypothesisError):
                break
            if first_edge is None:
                first_edge = edge
            if c == 0.0:
                break
            parts.append((c, h))
            resid = new_resid
        if not parts:
            run.record(t, gn, first_edge or 0.0, 0.0)
            return run.finish("stalled")
        hstar = np.zeros_like(g.values)
        for c, h in parts:
            hstar = hstar + c * _vec(h).values
        eta = run.step_size(t, FnVec(g.space, hstar))
        if eta == 0.0:
            run.record(t, gn, first_edge, 0.0)
            return run.finish("stalled")
        for c, h in parts:
            run.model.add(eta * c, h)
        run.record(t, gn, first_edge, eta)
    return run.finish("completed")


def run_residual(obj, learner, schedule, T, f0=None, keep_targets=False, callback=None):
    """Residual projection: carry the unprojected part of past gradients forward.

    ``delta += grad``; fit ``h`` to ``delta``; ``f <- f - eta_t c h``;
    ``delta -= c h``.  One weak learner per iteration; ``residual_norm`` in
    each record is ``||delta||`` after the update.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    run = _Run("residual", obj, learner, schedule, f0, keep_targets, callback)
    delta = obj.space.zeros()
    for t in range(1, T + 1):
        g, gn = run.gradient()
        if gn <= ZERO_GRADIENT_TOL:
            return run.finish("optimal")
        delta = FnVec(delta.space, delta.values + g.values)
        if norm(delta) <= ZERO_GRADIENT_TOL:
            run.record(t, gn, 0.0, 0.0, 0.0)
            continue
        h, c, edge, new_delta = run.project(t, delta)
        direction = FnVec(g.space, c * _vec(h).values)
        eta = run.step_size(t, direction)
        if eta == 0.0:
            run.record(t, gn, edge, 0.0, norm(delta))
            return run.finish("stalled")
        run.model.add(eta * c, h)
        delta = new_delta
        run.record(t, gn, edge, eta, norm(delta))
    return run.finish("completed")
