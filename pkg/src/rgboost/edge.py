"""Weak-learner edge: measurement and the conversions to classical boosting edges.

A restriction set has edge ``gamma`` on a target ``t`` if some member ``h``
satisfies ``<t, h> >= gamma ||t|| ||h||``.  Here it is certified over an
explicit, finite family of targets only.

The conversion checks work on the uniform empirical space of ``N`` points
and compare the L2 edge with

* the binary weighted-classification edge (error at most
  ``(1/2 - delta/2) sum_n w_n``), and
* the multiclass performance-over-baseline condition on a zero-mean reward
  matrix ``w`` (``sum_n w[n, h(x_n)] >= (1/K - delta/K) sum w + delta sum_n max_k w[n, k]``).
"""

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateHypothesisError
from .fspace import FnVec, SampleSpace, inner, norm
from .learners import EnumeratedClass, Hypothesis

__all__ = [
    "EdgeMode",
    "EdgeEstimate",
    "WeightedClassification",
    "EquivalenceCheck",
    "realized_edge",
    "class_edge",
    "learner_edge",
    "adaboost_to_l2",
    "check_adaboost_to_l2",
    "l2_to_adaboost",
    "multiclass_requirement_check",
    "multiclass_implied_edge",
    "normalize_rewards",
]


class EdgeMode(enum.Enum):
    INNER_PRODUCT = "inner_product"
    NORM_RESIDUAL = "norm_residual"


@dataclass(frozen=True)
class EdgeEstimate:
    gamma: float
    mode: EdgeMode = EdgeMode.INNER_PRODUCT
    provenance: str = "single"
    n_targets: int = 1
    worst_target_id: Optional[int] = None
    raw: float = None
    negative: bool = False

    def to_dict(self):
        return {"gamma": self.gamma, "mode": self.mode.value, "n_targets": self.n_targets,
                "worst_target_id": self.worst_target_id}

    def to_json(self):
        return json.dumps(self.to_dict())


def _vec(h):
    return h if isinstance(h, FnVec) else h.vec


def realized_edge(target: FnVec, h, mode=EdgeMode.INNER_PRODUCT) -> EdgeEstimate:
    """Edge achieved by one hypothesis on one target.

    ``INNER_PRODUCT`` gives ``<t, h> / (||t|| ||h||)`` (negative values are
    reported as 0 with ``negative=True``); ``NORM_RESIDUAL`` gives
    ``sqrt(1 - ||t - h||^2 / ||t||^2)`` clamped to ``[0, 1]``.
    """
    hv = _vec(h)
    tn, hn = norm(target), norm(hv)
    if tn == 0 or hn == 0:
        raise DegenerateHypothesisError("edge is undefined for zero-norm targets or hypotheses")
    mode = EdgeMode(mode)
    if mode is EdgeMode.INNER_PRODUCT:
        raw = inner(target, hv) / (tn * hn)
        raw = min(raw, 1.0)
    else:
        d = FnVec(target.space, target.values - hv.values)
        ratio = 1.0 - inner(d, d) / (tn * tn)
        raw = math.sqrt(ratio) if ratio > 0 else (0.0 if ratio == 0 else -math.sqrt(-ratio))
        raw = min(raw, 1.0)
    return EdgeEstimate(max(raw, 0.0), mode, raw=raw, negative=raw < 0)


def _best_responses(cls, targets, mode):
    tvals = np.stack([t.values for t in targets])
    w = cls.space.weights
    tnorm = np.sqrt(np.einsum("tnk,tnk,n->t", tvals, tvals, w))
    if np.any(tnorm == 0):
        raise DegenerateHypothesisError("class_edge targets must be nonzero")
    ip = np.einsum("mnk,tnk,n->tm", cls.H, tvals, w)
    if mode is EdgeMode.INNER_PRODUCT:
        return ip / (tnorm[:, None] * cls.norms[None, :])
    dist = tnorm[:, None] ** 2 - 2 * ip + cls.norms[None, :] ** 2
    ratio = 1.0 - dist / tnorm[:, None] ** 2
    return np.sign(ratio) * np.sqrt(np.abs(ratio))


def class_edge(members, targets, mode=EdgeMode.INNER_PRODUCT) -> EdgeEstimate:
    """Worst case over ``targets`` of the best member's realized edge.

    This certifies the edge of the class for the supplied targets only.
    """
    if len(targets) == 0:
        raise ValueError("need at least one target")
    cls = members if isinstance(members, EnumeratedClass) else EnumeratedClass(members)
    mode = EdgeMode(mode)
    best = _best_responses(cls, targets, mode).max(axis=1)
    i = int(np.argmin(best))
    raw = float(min(best[i], 1.0))
    return EdgeEstimate(max(raw, 0.0), mode, "worst-case", len(targets), i, raw, raw < 0)


def learner_edge(learner, targets) -> EdgeEstimate:
    """Like :func:`class_edge`, for a learner whose ``fit`` is an exact best response."""
    if len(targets) == 0:
        raise ValueError("need at least one target")
    edges = [realized_edge(t, learner.fit(t)).raw for t in targets]
    i = int(np.argmin(edges))
    raw = float(edges[i])
    return EdgeEstimate(max(raw, 0.0), EdgeMode.INNER_PRODUCT, "worst-case", len(targets), i, raw, raw < 0)


# ---------------------------------------------------------------------------
# weighted classification


@dataclass(frozen=True)
class WeightedClassification:
    """Binary (``weights`` + ``labels``) or multiclass (``rewards``) weighted classification."""

    weights: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    rewards: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.rewards is not None:
            R = np.asarray(self.rewards, dtype=float)
            if R.ndim != 2 or R.shape[1] < 2:
                raise ValueError("rewards must be an (N, K) matrix with K >= 2")
            object.__setattr__(self, "rewards", R)
        else:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            y = np.asarray(self.labels, dtype=float).reshape(-1)
            if w.shape != y.shape:
                raise ValueError("weights and labels must have the same length")
            if np.any(w < 0):
                raise ValueError("weights must be non-negative")
            if not np.all(np.isin(y, (-1.0, 1.0))):
                raise ValueError("labels must be -1 or +1")
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "labels", y)

    @property
    def is_multiclass(self):
        return self.rewards is not None

    @property
    def N(self):
        return self.rewards.shape[0] if self.is_multiclass else self.weights.shape[0]

    @classmethod
    def from_target(cls, target: FnVec):
        """``w_n = |t(x_n)|``, ``y_n = sgn t(x_n)`` (k = 1) or ``w[n, k] = t(x_n)_k`` (k > 1)."""
        v = target.values
        if v.shape[1] == 1:
            return cls(np.abs(v[:, 0]), np.where(v[:, 0] < 0, -1.0, 1.0))
        return cls(rewards=v)

    def target(self, space=None) -> FnVec:
        """The gradient vector that induces this problem, on the uniform space of N points."""
        if self.is_multiclass:
            space = space or SampleSpace.uniform(self.N, self.rewards.shape[1])
            return FnVec(space, self.rewards)
        space = space or SampleSpace.uniform(self.N)
        return FnVec(space, self.weights * self.labels)


def normalize_rewards(wc: WeightedClassification) -> WeightedClassification:
    """Subtract each row's mean so every reward row sums to zero."""
    R = wc.rewards
    return WeightedClassification(rewards=R - R.mean(axis=1, keepdims=True))


@dataclass(frozen=True)
class EquivalenceCheck:
    """Outcome of ``premise => conclusion`` on one instance.

    ``margin`` is how much the conclusion's inequality holds by (negative
    when it fails); vacuous checks have ``premise=False`` and ``holds=True``.
    """

    premise: bool
    holds: bool
    margin: float

    def __bool__(self):
        return self.holds


def _pm1_values(h, N):
    v = np.asarray(_vec(h).values if not isinstance(h, np.ndarray) else h, dtype=float).reshape(N, -1)
    if v.shape[1] != 1 or not np.all(np.isin(v, (-1.0, 1.0))):
        raise ValueError("hypothesis must take values in {-1, +1}")
    return v[:, 0]


def adaboost_to_l2(wc: WeightedClassification, delta: float) -> float:
    """L2 edge implied by a weighted-classification edge ``delta``: ``delta / sqrt(N)``."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if wc.is_multiclass:
        raise ValueError("adaboost_to_l2 takes a binary problem")
    return delta / math.sqrt(wc.N)


def _correct_weight(wc, hv):
    return float(wc.weights[hv == wc.labels].sum())


def check_adaboost_to_l2(wc: WeightedClassification, h, delta: float, tol=1e-12) -> EquivalenceCheck:
    """If ``h`` errs on at most ``(1/2 - delta/2) sum w``, its L2 edge is at least ``delta/sqrt(N)``."""
    bound = adaboost_to_l2(wc, delta)
    hv = _pm1_values(h, wc.N)
    total = wc.weights.sum()
    premise = _correct_weight(wc, hv) >= (0.5 + 0.5 * delta) * total - tol * max(total, 1.0)
    target = wc.target()
    edge = realized_edge(target, FnVec(target.space, hv)).raw
    margin = edge - bound
    return EquivalenceCheck(premise, (not premise) or margin >= -tol, margin)


def l2_to_adaboost(target: FnVec, h, gamma: float, tol=1e-12) -> EquivalenceCheck:
    """If ``h`` has L2 edge ``>= gamma`` on ``target``, it classifies at least ``(1/2 + gamma/2)`` of the weight.

    Weights are ``|target|`` and labels ``sgn target`` (ties to +1).
    """
    if target.values.shape[1] != 1:
        raise ValueError("l2_to_adaboost needs k = 1")
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    hv = _pm1_values(h, target.space.n)
    wc = WeightedClassification.from_target(target)
    edge = realized_edge(target, FnVec(target.space, hv)).raw
    premise = edge >= gamma - tol
    total = wc.weights.sum()
    margin = _correct_weight(wc, hv) - (0.5 + 0.5 * gamma) * total
    return EquivalenceCheck(premise, (not premise) or margin >= -tol * max(total, 1.0), margin)


def _encoded_values(h, N, K):
    v = np.asarray(h if isinstance(h, np.ndarray) else _vec(h).values, dtype=float).reshape(N, K)
    if not np.allclose(v.sum(axis=1), 0.0, atol=1e-9):
        raise ValueError("encoded hypothesis rows must sum to zero")
    return v


def multiclass_implied_edge(N, K, delta):
    """``delta / ((K - 1) sqrt(N))``: an L2 edge every zero-mean instance meeting the baseline condition attains.

    A zero-mean row satisfies ``max_k w_k >= ||w|| / sqrt(K (K - 1))``
    (equality for ``(a, ..., a, -(K - 1) a)``), which gives this constant.
    It is tight at ``N = 1``, ``w = (1, 1, -2)``.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return delta / ((K - 1) * math.sqrt(N))


def multiclass_requirement_check(wc: WeightedClassification, h, delta: float, auto_normalize=False,
                                 tol=1e-12, implied_edge=None):
    """Check both directions of the multiclass edge equivalence on one instance.

    Returns ``(baseline_to_l2, l2_to_baseline)``:

    * ``baseline_to_l2``: the baseline-reward condition with ``delta`` implies
      L2 edge ``>= delta / sqrt(N)``;
    * ``l2_to_baseline``: L2 edge ``>= delta`` implies the baseline-reward
      condition with ``delta``.

    ``h`` is an encoded hypothesis (rows ``1`` at the predicted class and
    ``-1/(K-1)`` elsewhere).  ``implied_edge`` replaces the forward
    direction's ``delta / sqrt(N)``; see :func:`multiclass_implied_edge`.
    """
    if not wc.is_multiclass:
        raise ValueError("multiclass_requirement_check takes a reward matrix")
    R = wc.rewards
    if not np.allclose(R.sum(axis=1), 0.0, atol=1e-9):
        if not auto_normalize:
            raise ValueError("reward rows must sum to zero (pass auto_normalize=True to center them)")
        wc = normalize_rewards(wc)
        R = wc.rewards
    N, K = R.shape
    H = _encoded_values(h, N, K)
    predicted = np.argmax(H, axis=1)
    reward = float(R[np.arange(N), predicted].sum())
    baseline = (1.0 / K - delta / K) * R.sum() + delta * R.max(axis=1).sum()
    scale = max(1.0, float(np.abs(R).sum()))

    target = wc.target()
    edge = realized_edge(target, FnVec(target.space, H)).raw

    premise1 = reward >= baseline - tol * scale
    margin1 = edge - (delta / math.sqrt(N) if implied_edge is None else implied_edge)
    forward = EquivalenceCheck(premise1, (not premise1) or margin1 >= -tol, margin1)

    premise2 = edge >= delta - tol
    margin2 = reward - baseline
    backward = EquivalenceCheck(premise2, (not premise2) or margin2 >= -tol * scale, margin2)
    return forward, backward
