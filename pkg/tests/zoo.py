"""Every implemented objective on small random data, for generic property checks."""

import numpy as np

from rgboost import (
    BinaryHinge, ExponentialLoss, FnVec, MulticlassHinge, PairwiseRankingHinge, SampleSpace,
    SquaredLoss, TwoPointAbs, regularize,
)


def build_zoo(seed=0):
    rng = np.random.default_rng(seed)
    n = 8
    X = rng.normal(size=(n, 2))
    w = rng.uniform(0.5, 1.5, size=n)
    S1 = SampleSpace(X, weights=w / w.sum())
    S3 = SampleSpace(X, output_dim=3)
    ypm = np.where(rng.normal(size=n) > 0, 1.0, -1.0)
    ycls = rng.integers(0, 3, size=n)
    rel = rng.integers(0, 3, size=n).astype(float)
    groups = np.repeat([0, 1], n // 2)
    return {
        "squared": SquaredLoss(S1, rng.normal(size=n)),
        "squared_k3": SquaredLoss(S3, rng.normal(size=(n, 3))),
        "exponential": ExponentialLoss(S1, ypm),
        "hinge": BinaryHinge(S1, ypm),
        "multiclass_hinge": MulticlassHinge(S3, ycls),
        "ranking_hinge": PairwiseRankingHinge(S1, rel, groups),
        "two_point_abs": TwoPointAbs(),
        "squared+l2": regularize(SquaredLoss(S1, rng.normal(size=n)), 0.5),
        "hinge+l2": regularize(BinaryHinge(S1, ypm), 0.5),
        "multiclass_hinge+l2": regularize(MulticlassHinge(S3, ycls), 1.0),
        "ranking_hinge+l2": regularize(PairwiseRankingHinge(S1, rel, groups), 0.3),
    }


def random_fn(rng, space, scale=2.0):
    return FnVec(space, scale * rng.normal(size=(space.n, space.output_dim)))


def _kink_selector(obj):
    base = getattr(obj, "base", obj)
    return base.subgradient


def off_kink(obj, f, d, eps):
    """True if the (piecewise-constant) subgradient selection is constant on [f - eps d, f + eps d]."""
    if obj.smooth:
        return True
    sel = _kink_selector(obj)
    g0 = sel(f).values
    for s in (-eps, eps):
        g = sel(FnVec(f.space, f.values + s * d.values)).values
        if not np.array_equal(g, g0):
            return False
    return True
