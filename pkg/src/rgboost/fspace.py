"""Empirical L2 function space.

A function ``f: X -> R^k`` is identified with its values on the ``n`` sample
points, stored as an ``(n, k)`` array.  The inner product is weighted by the
per-point probabilities ``p_n``::

    <f, g> = sum_n p_n <f(x_n), g(x_n)>

With uniform weights this is the usual ``(1/N) sum_n`` empirical average.
"""

import warnings
from functools import cached_property

import numpy as np

from .errors import SpaceMismatchError

__all__ = ["SampleSpace", "FnVec", "inner", "norm", "combine"]


class SampleSpace:
    """The finite domain that function vectors live on.

    Parameters
    ----------
    features : (n, d) array_like
        One row per sample point.  A 1-D array is treated as ``d = 1``.
    weights : (n,) array_like, optional
        Point probabilities.  Defaults to uniform ``1/n``.  Weights that do not
        sum to one are renormalized (with a warning if off by more than 1e-9).
    output_dim : int
        Dimension ``k`` of the output space ``R^k``.
    ids : sequence, optional
        Point identifiers, kept for reporting only.
    """

    def __init__(self, features, weights=None, output_dim=1, ids=None):
        X = np.array(features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"features must be a non-empty (n, d) matrix, got shape {X.shape}")
        n = X.shape[0]
        if weights is None:
            p = np.full(n, 1.0 / n)
        else:
            p = np.array(weights, dtype=float).reshape(-1)
            if p.shape[0] != n:
                raise ValueError(f"expected {n} weights, got {p.shape[0]}")
            if not np.all(np.isfinite(p)) or np.any(p <= 0):
                raise ValueError("weights must be finite and strictly positive")
            total = p.sum()
            if abs(total - 1.0) > 1e-9:
                warnings.warn(f"sample weights sum to {total!r}; renormalizing", stacklevel=2)
            p = p / total
        if int(output_dim) < 1:
            raise ValueError("output_dim must be >= 1")
        if ids is not None and len(ids) != n:
            raise ValueError(f"expected {n} ids, got {len(ids)}")

        X.setflags(write=False)
        p.setflags(write=False)
        self.features = X
        self.weights = p
        self.output_dim = int(output_dim)
        self.ids = None if ids is None else tuple(ids)

    @classmethod
    def uniform(cls, n, output_dim=1):
        """A featureless space of ``n`` equally weighted points (features are indices)."""
        return cls(np.arange(n, dtype=float), output_dim=output_dim)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def k(self):
        return self.output_dim

    @cached_property
    def sort_order(self):
        """Stable argsort of every feature column, shape ``(d, n)``."""
        order = np.argsort(self.features, axis=0, kind="stable").T.copy()
        order.setflags(write=False)
        return order

    def fnvec(self, values):
        return FnVec(self, values)

    def zeros(self):
        return FnVec(self, np.zeros((self.n, self.output_dim)))

    def constant(self, value):
        v = np.broadcast_to(np.asarray(value, dtype=float), (self.n, self.output_dim))
        return FnVec(self, v)

    def __repr__(self):
        return f"SampleSpace(n={self.n}, d={self.d}, k={self.output_dim})"


class FnVec:
    """A function represented by its ``(n, k)`` values on a :class:`SampleSpace`.

    Instances are immutable.  Arithmetic (``+``, ``-``, scalar ``*`` and ``/``)
    is defined between vectors bound to the same space.
    """

    __slots__ = ("space", "values")

    def __init__(self, space, values):
        v = np.array(values, dtype=float)
        n, k = space.n, space.output_dim
        if v.ndim == 0:
            raise ValueError("function values must be an array")
        if v.ndim == 1:
            if k == 1 and v.shape[0] == n:
                v = v.reshape(n, 1)
            elif n == 1 and v.shape[0] == k:
                v = v.reshape(1, k)
        if v.shape != (n, k):
            raise ValueError(f"expected values of shape {(n, k)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", v)

    def __setattr__(self, name, value):
        raise AttributeError("FnVec is immutable")

    def _check(self, other):
        if not isinstance(other, FnVec):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatchError("function vectors are bound to different sample spaces")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return combine(1.0, self, 1.0, other)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return combine(1.0, self, -1.0, other)

    def __neg__(self):
        return FnVec(self.space, -self.values)

    def __mul__(self, c):
        if isinstance(c, FnVec):
            return NotImplemented
        return FnVec(self.space, float(c) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return FnVec(self.space, self.values / float(c))

    def __repr__(self):
        return f"FnVec({self.values.tolist()!r})"


def _same_space(f, g):
    if f.space is not g.space:
        raise SpaceMismatchError("function vectors are bound to different sample spaces")


def inner(f, g):
    """Probability-weighted inner product ``sum_n p_n <f(x_n), g(x_n)>``."""
    _same_space(f, g)
    return float(f.space.weights @ np.einsum("nk,nk->n", f.values, g.values))


def norm(f):
    return float(np.sqrt(max(inner(f, f), 0.0)))


def combine(alpha, f, beta, g):
    """Pointwise ``alpha * f + beta * g``."""
    _same_space(f, g)
    return FnVec(f.space, alpha * f.values + beta * g.values)
