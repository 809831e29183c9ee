"""Convex loss functionals over the empirical L2 space.

Every objective is bound to a :class:`~rgboost.fspace.SampleSpace` and
returns subgradients *in that space*: because the inner product carries the
point weights ``p_n``, a functional whose ordinary (Euclidean) partial
derivative at point ``n`` is ``d_n`` has L2 subgradient ``d_n / p_n``.  For a
pointwise loss ``sum_n p_n l(f(x_n), y_n)`` this is just ``l'(f(x_n), y_n)``.

Kinks use fixed selections so that runs are reproducible: ``|u|`` at 0
gives 0, a hinge exactly at its margin gives 0, and multiclass ties pick the
lowest violating class index.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SpaceMismatchError, UnsupportedObjectiveError
from .fspace import FnVec, SampleSpace

__all__ = [
    "LabeledData",
    "OptimalReference",
    "Objective",
    "SquaredLoss",
    "ExponentialLoss",
    "BinaryHinge",
    "MulticlassHinge",
    "PairwiseRankingHinge",
    "TwoPointAbs",
    "Regularized",
    "regularize",
    "pointwise_optimum",
    "subgradient_oracle",
    "make_objective",
    "OBJECTIVES",
]


@dataclass(frozen=True)
class LabeledData:
    """Per-point targets plus optional query-group ids (ranking)."""

    labels: np.ndarray
    groups: Optional[np.ndarray] = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        object.__setattr__(self, "labels", labels)
        if self.groups is not None:
            groups = np.asarray(self.groups)
            if groups.shape[0] != labels.shape[0]:
                raise ValueError("groups and labels must have the same length")
            object.__setattr__(self, "groups", groups)

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        groups = None if self.groups is None else self.groups[idx]
        return LabeledData(self.labels[idx], groups)


@dataclass(frozen=True)
class OptimalReference:
    """A reference minimizer ``f_star`` with its objective value."""

    f_star: FnVec
    value_star: float
    method: str


class Objective:
    """Base class for convex functionals ``R: L2 -> R``.

    Subclasses implement :meth:`value` and :meth:`subgradient`.  Pointwise
    separable objectives additionally implement :meth:`point_loss`, which
    :func:`pointwise_optimum` uses.

    Attributes
    ----------
    lam : float or None
        Strong-convexity constant (w.r.t. the weighted L2 norm), if known.
    Lam : float or None
        Strong-smoothness constant, if the objective is smooth.
    grad_bound : float or None
        A priori bound ``G`` on subgradient norms, if known.
    smooth : bool
        Whether the objective is differentiable everywhere.
    separable : bool
        Whether the value is ``sum_n p_n l_n(f(x_n))``.
    """

    lam = None
    Lam = None
    grad_bound = None
    smooth = False
    separable = True
    name = "objective"

    def __init__(self, space: SampleSpace):
        self.space = space

    def _check(self, f):
        if f.space is not self.space:
            raise SpaceMismatchError("function vector is not bound to the objective's space")
        return f.values

    def value(self, f: FnVec) -> float:
        raise NotImplementedError

    def subgradient(self, f: FnVec) -> FnVec:
        raise NotImplementedError

    def point_loss(self, n: int, V: np.ndarray) -> np.ndarray:
        """Loss ``l_n(v)`` of point ``n`` at each candidate row of ``V`` (shape ``(m, k)``)."""
        raise UnsupportedObjectiveError(f"{type(self).__name__} is not pointwise separable")

    def point_key(self, n: int):
        """Points sharing a key have identical point losses."""
        return n

    def target_scale(self) -> float:
        """Half-width of the box searched by :func:`pointwise_optimum`."""
        return 3.0

    def __repr__(self):
        return f"{type(self).__name__}(n={self.space.n}, k={self.space.output_dim})"


class SquaredLoss(Objective):
    """``l(v, y) = 0.5 * ||v - y||^2``; 1-strongly convex and 1-strongly smooth."""

    lam = 1.0
    Lam = 1.0
    smooth = True
    name = "squared"

    def __init__(self, space, targets):
        super().__init__(space)
        y = np.array(targets, dtype=float)
        if y.ndim == 1:
            y = y.reshape(space.n, -1) if space.output_dim == 1 else y.reshape(1, -1)
        if y.shape != (space.n, space.output_dim):
            raise ValueError(f"targets must have shape {(space.n, space.output_dim)}, got {y.shape}")
        self.targets = y

    def value(self, f):
        r = self._check(f) - self.targets
        return float(0.5 * self.space.weights @ np.einsum("nk,nk->n", r, r))

    def subgradient(self, f):
        return FnVec(self.space, self._check(f) - self.targets)

    def point_loss(self, n, V):
        r = V - self.targets[n]
        return 0.5 * np.einsum("mk,mk->m", r, r)

    def point_key(self, n):
        return tuple(self.targets[n])

    def target_scale(self):
        return float(np.max(np.abs(self.targets))) + 2.0


def _binary_labels(space, labels):
    if space.output_dim != 1:
        raise ValueError("binary losses need output_dim == 1")
    y = np.asarray(labels, dtype=float).reshape(-1)
    if y.shape[0] != space.n:
        raise ValueError(f"expected {space.n} labels, got {y.shape[0]}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    return y


class ExponentialLoss(Objective):
    """``l(v, y) = exp(-y v)`` for ``y`` in {-1, +1}."""

    smooth = True
    name = "exponential"

    def __init__(self, space, labels):
        super().__init__(space)
        self.labels = _binary_labels(space, labels)

    def value(self, f):
        m = self.labels * self._check(f)[:, 0]
        return float(self.space.weights @ np.exp(-m))

    def subgradient(self, f):
        m = self.labels * self._check(f)[:, 0]
        return FnVec(self.space, -self.labels * np.exp(-m))

    def point_loss(self, n, V):
        return np.exp(-self.labels[n] * V[:, 0])

    def point_key(self, n):
        return self.labels[n]


class BinaryHinge(Objective):
    """``l(v, y) = max(0, 1 - y v)``."""

    name = "hinge"

    def __init__(self, space, labels):
        super().__init__(space)
        self.labels = _binary_labels(space, labels)
        self.grad_bound = 1.0

    def value(self, f):
        m = self.labels * self._check(f)[:, 0]
        return float(self.space.weights @ np.maximum(0.0, 1.0 - m))

    def subgradient(self, f):
        m = self.labels * self._check(f)[:, 0]
        return FnVec(self.space, np.where(m < 1.0, -self.labels, 0.0))

    def point_loss(self, n, V):
        return np.maximum(0.0, 1.0 - self.labels[n] * V[:, 0])

    def point_key(self, n):
        return self.labels[n]


class MulticlassHinge(Objective):
    """Crammer-Singer hinge ``max(0, max_{j != y} (1 + v_j - v_y))``.

    Class labels are integers in ``0 .. K-1`` with ``K = space.output_dim``.
    """

    name = "multiclass_hinge"

    def __init__(self, space, labels):
        super().__init__(space)
        K = space.output_dim
        if K < 2:
            raise ValueError("multiclass hinge needs output_dim >= 2")
        y = np.asarray(labels).reshape(-1)
        if y.shape[0] != space.n:
            raise ValueError(f"expected {space.n} labels, got {y.shape[0]}")
        if not np.all(y == np.round(y)) or y.min() < 0 or y.max() >= K:
            raise ValueError(f"class labels must be integers in 0..{K - 1}")
        self.labels = y.astype(int)
        self.num_classes = K
        self.grad_bound = float(np.sqrt(2.0))

    def _margins(self, F):
        n = F.shape[0]
        rows = np.arange(n)
        M = 1.0 + F - F[rows, self.labels][:, None]
        M[rows, self.labels] = -np.inf
        return M

    def value(self, f):
        M = self._margins(self._check(f))
        return float(self.space.weights @ np.maximum(0.0, M.max(axis=1)))

    def subgradient(self, f):
        M = self._margins(self._check(f))
        rows = np.arange(M.shape[0])
        worst = np.argmax(M, axis=1)  # first maximum = lowest violating class
        active = M[rows, worst] > 0.0
        G = np.zeros_like(M)
        G[rows[active], worst[active]] = 1.0
        G[rows[active], self.labels[active]] = -1.0
        return FnVec(self.space, G)

    def point_loss(self, n, V):
        y = self.labels[n]
        M = 1.0 + V - V[:, [y]]
        M[:, y] = -np.inf
        return np.maximum(0.0, M.max(axis=1))

    def point_key(self, n):
        return int(self.labels[n])


class PairwiseRankingHinge(Objective):
    """Mean pairwise hinge over in-group preference pairs.

    ``R[f] = (1/P) sum_{(i, j)} max(0, 1 - (f(x_i) - f(x_j)))`` where the sum
    runs over the ``P`` pairs in the same group with ``relevance_i > relevance_j``.
    """

    separable = False
    name = "ranking_hinge"

    def __init__(self, space, relevance, groups=None):
        super().__init__(space)
        if space.output_dim != 1:
            raise ValueError("ranking hinge needs output_dim == 1")
        rel = np.asarray(relevance, dtype=float).reshape(-1)
        if rel.shape[0] != space.n:
            raise ValueError(f"expected {space.n} relevance labels, got {rel.shape[0]}")
        grp = np.zeros(space.n, dtype=int) if groups is None else np.asarray(groups).reshape(-1)
        self.relevance = rel
        self.groups = grp
        self.pairs = preference_pairs(rel, grp)
        P = max(len(self.pairs), 1)
        # each pair contributes +-1/P to two points; per-point |d_n| <= (#pairs at n)/P
        per_point = np.bincount(self.pairs.reshape(-1), minlength=space.n) / P
        self.grad_bound = float(np.sqrt(np.sum(per_point**2 / space.weights)))

    def value(self, f):
        if len(self.pairs) == 0:
            self._check(f)
            return 0.0
        v = self._check(f)[:, 0]
        i, j = self.pairs[:, 0], self.pairs[:, 1]
        return float(np.mean(np.maximum(0.0, 1.0 - (v[i] - v[j]))))

    def subgradient(self, f):
        v = self._check(f)[:, 0]
        d = np.zeros(self.space.n)
        if len(self.pairs):
            i, j = self.pairs[:, 0], self.pairs[:, 1]
            active = 1.0 - (v[i] - v[j]) > 0.0
            P = len(self.pairs)
            np.add.at(d, i[active], -1.0 / P)
            np.add.at(d, j[active], 1.0 / P)
        return FnVec(self.space, d / self.space.weights)


def preference_pairs(relevance, groups):
    """All ``(i, j)`` with equal group and ``relevance[i] > relevance[j]``, in index order."""
    relevance = np.asarray(relevance)
    groups = np.asarray(groups)
    pairs = []
    for g in np.unique(groups):
        idx = np.flatnonzero(groups == g)
        r = relevance[idx]
        better = r[:, None] > r[None, :]
        a, b = np.nonzero(better)
        pairs.append(np.column_stack([idx[a], idx[b]]))
    if not pairs:
        return np.zeros((0, 2), dtype=int)
    out = np.concatenate(pairs).astype(int)
    order = np.lexsort((out[:, 1], out[:, 0]))
    return out[order]


class TwoPointAbs(Objective):
    """``R[f] = 2 |f(x_1)| + |f(x_2)|`` on a two-point space.

    The non-smooth objective on which single-projection boosting stalls.
    """

    name = "two_point_abs"

    def __init__(self, space=None):
        if space is None:
            space = SampleSpace.uniform(2)
        if space.n != 2 or space.output_dim != 1:
            raise ValueError("TwoPointAbs lives on a two-point space with k = 1")
        super().__init__(space)
        self.coef = np.array([2.0, 1.0])

    def value(self, f):
        return float(self.coef @ np.abs(self._check(f)[:, 0]))

    def subgradient(self, f):
        v = self._check(f)[:, 0]
        return FnVec(self.space, self.coef * np.sign(v) / self.space.weights)

    def point_loss(self, n, V):
        return self.coef[n] * np.abs(V[:, 0]) / self.space.weights[n]


class Regularized(Objective):
    """``R'[f] = R[f] + (reg / 2) ||f||^2``."""

    def __init__(self, base: Objective, reg: float):
        if not reg > 0:
            raise ValueError("regularization strength must be positive")
        super().__init__(base.space)
        self.base = base
        self.reg = float(reg)
        self.lam = (base.lam or 0.0) + self.reg
        self.Lam = None if base.Lam is None else base.Lam + self.reg
        self.smooth = base.smooth
        self.separable = base.separable
        self.name = f"{base.name}+l2"

    def value(self, f):
        v = self._check(f)
        sq = float(self.space.weights @ np.einsum("nk,nk->n", v, v))
        return self.base.value(f) + 0.5 * self.reg * sq

    def subgradient(self, f):
        g = self.base.subgradient(f)
        return FnVec(self.space, g.values + self.reg * f.values)

    def point_loss(self, n, V):
        return self.base.point_loss(n, V) + 0.5 * self.reg * np.einsum("mk,mk->m", V, V)

    def point_key(self, n):
        return self.base.point_key(n)

    def target_scale(self):
        return self.base.target_scale()


def regularize(obj: Objective, lam: float) -> Regularized:
    return Regularized(obj, lam)


def _grid(lo, hi, step, k):
    axis = np.arange(lo, hi + 0.5 * step, step)
    mesh = np.meshgrid(*([axis] * k), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _argmin_small_norm(vals, V):
    """Index of the minimum value; among (near-)ties the smallest-norm candidate."""
    best = vals.min()
    ties = np.flatnonzero(vals <= best + 8 * np.finfo(float).eps * max(1.0, abs(best)))
    return ties[np.argmin(np.einsum("mk,mk->m", V[ties], V[ties]))]


def _minimize_point(obj, n, k, bound, resolution, rounds=40):
    V = _grid(-bound, bound, resolution, k)
    vals = obj.point_loss(n, V)
    v = V[_argmin_small_norm(vals, V)]
    # zoom: re-grid a shrinking box around the incumbent
    width = resolution
    per_axis = 11 if k <= 3 else 5
    while rounds > 0 and width > 1e-13:
        offsets = _grid(-width, width, 2 * width / (per_axis - 1), k)
        cand = v + offsets
        vals = obj.point_loss(n, cand)
        v = cand[_argmin_small_norm(vals, cand)]
        width *= 0.5
        rounds -= 1
    return v


def pointwise_optimum(obj: Objective, resolution: float = 0.05) -> OptimalReference:
    """Minimize a separable objective point by point.

    Each point's loss (plus any L2 regularizer) is scanned on a grid over
    ``[-B, B]^k`` with spacing ``resolution`` and then refined by repeatedly
    re-gridding a shrinking box around the best candidate.  Among tied
    candidates the smallest-norm one is kept, so the result is a
    well-defined minimizer even when the minimum is not unique.
    """
    if not obj.separable:
        raise UnsupportedObjectiveError(
            f"{type(obj).__name__} is not pointwise separable; use subgradient_oracle"
        )
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    space = obj.space
    k = space.output_dim
    bound = obj.target_scale()
    cache = {}
    F = np.empty((space.n, k))
    for n in range(space.n):
        key = obj.point_key(n)
        if key not in cache:
            cache[key] = _minimize_point(obj, n, k, bound, resolution)
        F[n] = cache[key]
    f_star = FnVec(space, F)
    return OptimalReference(f_star, obj.value(f_star), "pointwise-grid")


def subgradient_oracle(obj: Objective, iters: int = 10_000, f0: FnVec = None) -> OptimalReference:
    """Plain (unrestricted) subgradient descent with ``eta_t = 1/sqrt(t)``; keeps the best iterate."""
    f = obj.space.zeros() if f0 is None else f0
    best_f, best_v = f, obj.value(f)
    for t in range(1, iters + 1):
        g = obj.subgradient(f)
        if not np.any(g.values):
            break
        f = FnVec(f.space, f.values - g.values / np.sqrt(t))
        v = obj.value(f)
        if v < best_v:
            best_f, best_v = f, v
    return OptimalReference(best_f, best_v, "subgradient-descent")


def _labels_array(labels):
    return labels.labels if isinstance(labels, LabeledData) else np.asarray(labels)


def make_objective(name: str, space: SampleSpace, labels=None, lam: float = 0.0) -> Objective:
    """Build a registered objective by name, optionally L2-regularized."""
    if name not in OBJECTIVES:
        raise KeyError(f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}")
    if name == "ranking_hinge":
        if not isinstance(labels, LabeledData):
            raise ValueError("ranking_hinge needs LabeledData with groups")
        obj = PairwiseRankingHinge(space, labels.labels, labels.groups)
    elif name == "two_point_abs":
        obj = TwoPointAbs(space)
    else:
        obj = OBJECTIVES[name](space, _labels_array(labels))
    return regularize(obj, lam) if lam else obj


OBJECTIVES = {
    "squared": SquaredLoss,
    "exponential": ExponentialLoss,
    "hinge": BinaryHinge,
    "multiclass_hinge": MulticlassHinge,
    "ranking_hinge": PairwiseRankingHinge,
    "two_point_abs": TwoPointAbs,
}
