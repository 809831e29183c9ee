"""Weak learners: restriction sets that project a target onto a hypothesis class.

Two projections are supported:

* ``INNER_PRODUCT_MAX`` picks ``argmax_h <target, h> / ||h||``;
* ``NORM_MIN`` picks ``argmin_h ||target - h||^2`` and only makes sense for
  classes closed under scaling (or with free leaf values).

All searches are exhaustive over a finite candidate set and break ties
lexicographically (feature, threshold, orientation / class), so fits are
deterministic.
"""

import enum

import numpy as np

from .errors import DegenerateHypothesisError, ZeroGradientError, ZeroProjectionError
from .fspace import FnVec, SampleSpace, norm

__all__ = [
    "ProjectionMode",
    "Hypothesis",
    "Stump",
    "ConstantHypothesis",
    "EnumeratedHypothesis",
    "RegressionStumps",
    "BinaryStumps",
    "MulticlassStumps",
    "ConstantLearner",
    "EnumeratedClass",
    "fit_regression_stump",
    "fit_binary_stump",
    "fit_multiclass_stump",
    "fit_enumerated",
    "fit_constant",
    "multiclass_encoding",
    "stump_thresholds",
    "point_basis_class",
    "point_multiclass_class",
    "counterexample_class",
    "hypothesis_from_dict",
    "LEARNERS",
    "make_learner",
]

# relative slack used when comparing candidate scores, so that round-off in
# cumulative sums does not override the lexicographic tie-break
_TIE_RTOL = 1e-12


class ProjectionMode(enum.Enum):
    INNER_PRODUCT_MAX = "inner_product_max"
    NORM_MIN = "norm_min"


def _first_max(scores):
    scores = np.asarray(scores, dtype=float)
    top = scores.max()
    return int(np.flatnonzero(scores >= top - _TIE_RTOL * max(1.0, abs(top)))[0])


def _check_target(target):
    if not np.any(target.values):
        raise ZeroGradientError("zero gradient: nothing to project")


class Hypothesis:
    """A weak hypothesis ``h: R^d -> R^k``.

    ``vec`` caches the evaluation on the training space the hypothesis was
    fit on (``None`` for hypotheses loaded from disk).
    """

    kind = "hypothesis"

    def __init__(self, space=None):
        self.vec = None
        if space is not None:
            self.vec = self._evaluate_on(space)
            self.norm = norm(self.vec)

    def _evaluate_on(self, space):
        return FnVec(space, self.predict(space.features))

    def predict(self, X) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, space) -> FnVec:
        if self.vec is not None and self.vec.space is space:
            return self.vec
        return self._evaluate_on(space)

    def to_dict(self) -> dict:
        raise NotImplementedError


class Stump(Hypothesis):
    """Axis-aligned split: ``left`` if ``x[feature] <= threshold`` else ``right``.

    ``left``/``right`` are output vectors in ``R^k``.  ``classes`` optionally
    records the base classifier's ``(class_left, class_right)`` for encoded
    multiclass stumps.
    """

    def __init__(self, feature, threshold, left, right, kind="stump", space=None, classes=None):
        self.feature = int(feature)
        self.threshold = float(threshold)
        self.left = np.atleast_1d(np.asarray(left, dtype=float))
        self.right = np.atleast_1d(np.asarray(right, dtype=float))
        self.kind = kind
        self.classes = classes
        super().__init__(space)

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        go_left = X[:, self.feature] <= self.threshold
        return np.where(go_left[:, None], self.left[None, :], self.right[None, :])

    def to_dict(self):
        d = {
            "kind": self.kind,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.tolist(),
            "right": self.right.tolist(),
        }
        if self.classes is not None:
            d["classes"] = [int(c) for c in self.classes]
        return d

    def __repr__(self):
        return (f"Stump({self.kind}, x[{self.feature}] <= {self.threshold:g}: "
                f"{self.left.tolist()} / {self.right.tolist()})")


class ConstantHypothesis(Hypothesis):
    kind = "constant"

    def __init__(self, value, space=None):
        self.value = np.atleast_1d(np.asarray(value, dtype=float))
        super().__init__(space)

    def predict(self, X):
        m = np.asarray(X).shape[0]
        return np.tile(self.value, (m, 1))

    def to_dict(self):
        return {"kind": "constant", "value": self.value.tolist()}


class EnumeratedHypothesis(Hypothesis):
    """Member ``index`` of an explicit finite class of function vectors.

    Only defined on the space its vector lives on.
    """

    kind = "enumerated"

    def __init__(self, index, vec=None):
        self.index = int(index)
        self.vec = vec
        self.norm = None if vec is None else norm(vec)

    def predict(self, X):
        if self.vec is not None:
            X = np.asarray(X, dtype=float)
            if X.ndim == 1:
                X = X.reshape(-1, 1)
            if X.shape == self.vec.space.features.shape and np.array_equal(X, self.vec.space.features):
                return np.array(self.vec.values)
        raise ValueError("enumerated hypotheses are only defined on their own sample space")

    def to_dict(self):
        return {"kind": "enumerated", "index": self.index}

    def __repr__(self):
        return f"EnumeratedHypothesis({self.index})"


def hypothesis_from_dict(d, members=None):
    kind = d.get("kind")
    if kind in ("stump", "binary_stump", "multiclass_stump"):
        return Stump(d["feature"], d["threshold"], d["left"], d["right"], kind=kind,
                     classes=d.get("classes"))
    if kind == "constant":
        return ConstantHypothesis(d["value"])
    if kind == "enumerated":
        vec = None
        if members is not None:
            m = members[d["index"]]
            vec = m.vec if isinstance(m, Hypothesis) else m
        return EnumeratedHypothesis(d["index"], vec)
    raise ValueError(f"unknown hypothesis kind {kind!r}")


# ---------------------------------------------------------------------------
# decision stumps


def stump_thresholds(x):
    """Candidate thresholds for one feature column.

    ``-inf``, then midpoints between consecutive distinct sorted values, then
    ``+inf``.
    """
    u = np.unique(x)
    return np.concatenate([[-np.inf], 0.5 * (u[1:] + u[:-1]), [np.inf]])


def _split_sums(space, target):
    """Per feature, the left-region mass and weighted target sums at each threshold.

    Yields ``(j, thresholds, P_left, S_left)`` where ``S_left`` has shape
    ``(len(thresholds), k)``.
    """
    X, p = space.features, space.weights
    PT = p[:, None] * target.values
    for j in range(space.d):
        order = space.sort_order[j]
        xs = X[order, j]
        cp = np.concatenate([[0.0], np.cumsum(p[order])])
        cs = np.vstack([np.zeros((1, PT.shape[1])), np.cumsum(PT[order], axis=0)])
        # positions where the sorted value changes: left region = first i points
        change = np.flatnonzero(xs[1:] > xs[:-1]) + 1
        cut = np.concatenate([[0], change, [len(xs)]])
        thr = np.concatenate([[-np.inf], 0.5 * (xs[change - 1] + xs[change]), [np.inf]])
        yield j, thr, cp[cut], cs[cut]


def fit_regression_stump(target: FnVec, space: SampleSpace = None) -> Stump:
    """Least-squares stump: weighted-mean leaves, split minimizing weighted SSE.

    For a fixed split the best leaves are the P-weighted means, and the
    maximal ``<t, h> / ||h||`` over leaf values is reached at the same split,
    so both projection modes select the same stump.
    """
    space = target.space if space is None else space
    _check_target(target)
    total_p = 1.0
    total_s = (space.weights[:, None] * target.values).sum(axis=0)
    best = None
    for j, thr, PL, SL in _split_sums(space, target):
        PR = total_p - PL
        SR = total_s[None, :] - SL
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = (np.where(PL > 1e-300, (SL**2).sum(axis=1) / PL, 0.0)
                    + np.where(PR > 1e-300, (SR**2).sum(axis=1) / PR, 0.0))
        i = _first_max(gain)
        if best is None or gain[i] > best[0] + _TIE_RTOL * max(1.0, abs(best[0])):
            best = (gain[i], j, thr[i], PL[i], SL[i], PR[i], SR[i])
    _, j, th, PL, SL, PR, SR = best
    left = SL / PL if PL > 1e-300 else SR / PR
    right = SR / PR if PR > 1e-300 else SL / PL
    return Stump(j, th, left, right, kind="stump", space=space)


def fit_binary_stump(target: FnVec, space: SampleSpace = None) -> Stump:
    """±1 stump maximizing ``<target, h>`` (orientation ``s`` on the right).

    Every ±1-valued hypothesis has unit norm, so this is also the
    inner-product-ratio projection; equivalently it solves the weighted
    classification problem with weights ``|target|`` and labels ``sgn target``.
    """
    space = target.space if space is None else space
    if space.output_dim != 1:
        raise ValueError("binary stumps need output_dim == 1")
    _check_target(target)
    total = float(space.weights @ target.values[:, 0])
    best = None
    for j, thr, _, SL in _split_sums(space, target):
        SL = SL[:, 0]
        diff = (total - SL) - SL  # <target, h> for s = +1
        scores = np.column_stack([diff, -diff]).reshape(-1)  # (threshold, orientation)
        i = _first_max(scores)
        if best is None or scores[i] > best[0] + _TIE_RTOL * max(1.0, abs(best[0])):
            best = (scores[i], j, thr[i // 2], 1.0 if i % 2 == 0 else -1.0)
    _, j, th, s = best
    return Stump(j, th, [-s], [s], kind="binary_stump", space=space)


def multiclass_encoding(classes, K):
    """Encode class indices as rows with 1 at the class and ``-1/(K-1)`` elsewhere."""
    classes = np.atleast_1d(np.asarray(classes, dtype=int))
    H = np.full((classes.shape[0], K), -1.0 / (K - 1))
    H[np.arange(classes.shape[0]), classes] = 1.0
    return H


def _best_class(S, K):
    """Per row of column sums ``S``, the encoded score of each class and the best class."""
    scores = (K / (K - 1)) * S - S.sum(axis=-1, keepdims=True) / (K - 1)
    top = scores.max(axis=-1, keepdims=True)
    tol = _TIE_RTOL * np.maximum(1.0, np.abs(top))
    cls = np.argmax(scores >= top - tol, axis=-1)
    return np.take_along_axis(scores, cls[..., None], axis=-1)[..., 0], cls


def fit_multiclass_stump(target: FnVec, space: SampleSpace = None, K: int = None) -> Stump:
    """Multiclass stump predicting one class per region, in encoded form.

    Maximizes ``<target, h'>`` where ``h'(x)`` is the encoding of the class
    predicted at ``x``.  All encoded hypotheses share the norm
    ``sqrt(K / (K - 1))``, so this is the inner-product-ratio projection.
    """
    space = target.space if space is None else space
    K = space.output_dim if K is None else int(K)
    if K < 2 or K != space.output_dim:
        raise ValueError("multiclass stumps need K == output_dim >= 2")
    _check_target(target)
    total = (space.weights[:, None] * target.values).sum(axis=0)
    best = None
    for j, thr, _, SL in _split_sums(space, target):
        sl, cl = _best_class(SL, K)
        sr, cr = _best_class(total[None, :] - SL, K)
        scores = sl + sr
        i = _first_max(scores)
        if best is None or scores[i] > best[0] + _TIE_RTOL * max(1.0, abs(best[0])):
            best = (scores[i], j, thr[i], int(cl[i]), int(cr[i]))
    _, j, th, cl, cr = best
    # empty regions carry no mass; predict the other side's class there
    if th == -np.inf:
        cl = cr
    elif th == np.inf:
        cr = cl
    enc = multiclass_encoding([cl, cr], K)
    return Stump(j, th, enc[0], enc[1], kind="multiclass_stump", space=space, classes=(cl, cr))


# ---------------------------------------------------------------------------
# explicit finite classes


def _stack(members):
    vecs = [m.vec if isinstance(m, Hypothesis) else m for m in members]
    space = vecs[0].space
    for v in vecs:
        if v.space is not space:
            raise ValueError("all class members must share one sample space")
    return space, vecs, np.stack([v.values for v in vecs])


def fit_enumerated(target: FnVec, members, mode=ProjectionMode.INNER_PRODUCT_MAX):
    """Exact projection onto an explicit finite class (ties: lowest index)."""
    return EnumeratedClass(members, mode).fit(target)


def fit_constant(target: FnVec) -> ConstantHypothesis:
    """The P-weighted mean of the target, as a constant hypothesis."""
    _check_target(target)
    space = target.space
    c = space.weights @ target.values
    if not np.any(c):
        raise ZeroProjectionError("target has zero mean; the best constant is zero")
    return ConstantHypothesis(c, space=space)


class EnumeratedClass:
    """A finite restriction set given as a list of function vectors or hypotheses."""

    def __init__(self, members, mode=ProjectionMode.INNER_PRODUCT_MAX):
        if len(members) == 0:
            raise ValueError("class must be non-empty")
        self.space, self.vecs, self.H = _stack(members)
        self.norms = np.sqrt(np.einsum("mnk,n->m", self.H**2, self.space.weights))
        if np.any(self.norms == 0):
            raise DegenerateHypothesisError("class members must have positive norm")
        self.mode = ProjectionMode(mode)
        self._hyps = [EnumeratedHypothesis(i, v) for i, v in enumerate(self.vecs)]
        for h, nrm in zip(self._hyps, self.norms):
            h.norm = float(nrm)

    def __len__(self):
        return len(self.vecs)

    def __getitem__(self, i):
        return self._hyps[i]

    @property
    def members(self):
        return list(self._hyps)

    def inner_products(self, target):
        if target.space is not self.space:
            raise ValueError("target is not bound to the class's sample space")
        return np.einsum("mnk,nk,n->m", self.H, target.values, self.space.weights)

    def fit(self, target):
        _check_target(target)
        ip = self.inner_products(target)
        if self.mode is ProjectionMode.INNER_PRODUCT_MAX:
            scores = ip / self.norms
        else:
            # ||t - h||^2 = ||t||^2 - 2<t,h> + ||h||^2; maximize the negated distance
            scores = 2.0 * ip - self.norms**2
        return self._hyps[_first_max(scores)]

    def describe(self):
        return f"enumerated({len(self)}, {self.mode.value})"


def point_basis_class(space, signed=True):
    """Indicator vectors ``±e_n ⊗ u_j`` for every point ``n`` and output axis ``j``."""
    n, k = space.n, space.output_dim
    members = []
    for i in range(n):
        for j in range(k):
            for s in ((1.0, -1.0) if signed else (1.0,)):
                v = np.zeros((n, k))
                v[i, j] = s
                members.append(FnVec(space, v))
    return members


def point_multiclass_class(space):
    """Encoded single-point predictions: class ``c`` at point ``n``, zero elsewhere."""
    n, K = space.n, space.output_dim
    enc = multiclass_encoding(np.arange(K), K)
    members = []
    for i in range(n):
        for c in range(K):
            v = np.zeros((n, K))
            v[i] = enc[c]
            members.append(FnVec(space, v))
    return members


def counterexample_class(space=None):
    """``h(x1) in {-1, +1}, h(x2) = 0`` or ``h(x1) = 0, h(x2) in {-1, +1}``."""
    space = SampleSpace.uniform(2) if space is None else space
    if space.n != 2 or space.output_dim != 1:
        raise ValueError("the counterexample class lives on a two-point space")
    return [FnVec(space, v) for v in ([1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0])]


# ---------------------------------------------------------------------------
# learner objects (restriction sets with a ``fit(target)`` method)


class RegressionStumps:
    def __init__(self, mode=ProjectionMode.NORM_MIN):
        self.mode = ProjectionMode(mode)

    def fit(self, target):
        return fit_regression_stump(target)

    def describe(self):
        return f"regression_stump({self.mode.value})"


class BinaryStumps:
    mode = ProjectionMode.INNER_PRODUCT_MAX

    def __init__(self, mode=ProjectionMode.INNER_PRODUCT_MAX):
        if ProjectionMode(mode) is ProjectionMode.NORM_MIN:
            raise ValueError("±1 stumps are not closed under scaling; norm-min projection is not offered")

    def fit(self, target):
        return fit_binary_stump(target)

    def describe(self):
        return "binary_stump"


class MulticlassStumps:
    mode = ProjectionMode.INNER_PRODUCT_MAX

    def __init__(self, K=None, mode=ProjectionMode.INNER_PRODUCT_MAX):
        if ProjectionMode(mode) is ProjectionMode.NORM_MIN:
            raise ValueError("encoded stumps are not closed under scaling; norm-min projection is not offered")
        self.K = K

    def fit(self, target):
        return fit_multiclass_stump(target, K=self.K)

    def describe(self):
        return "multiclass_stump"


class ConstantLearner:
    mode = ProjectionMode.NORM_MIN

    def fit(self, target):
        return fit_constant(target)

    def describe(self):
        return "constant"


LEARNERS = {
    "regression_stump": RegressionStumps,
    "binary_stump": BinaryStumps,
    "multiclass_stump": MulticlassStumps,
    "constant": ConstantLearner,
}


def make_learner(name):
    if name not in LEARNERS:
        raise KeyError(f"unknown learner {name!r}; choose from {sorted(LEARNERS)}")
    return LEARNERS[name]()
