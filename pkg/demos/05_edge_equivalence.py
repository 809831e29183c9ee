"""
Weak-learning edges: L2 versus weighted classification
======================================================

A weak learner's L2 edge on a target ``t`` is ``<t, h> / (||t|| ||h||)``.
For binary problems it lines up with the classical notion, "beats 1/2 on
the weights by delta/2", up to a factor of ``sqrt(N)`` one way and exactly
the other way.

For K classes with zero-mean rewards the direction "baseline edge delta
implies L2 edge" needs more care.  The smallest L2 edge it can guarantee is
``delta / ((K - 1) sqrt(N))``, not ``delta / sqrt(N)``.  One point with
rewards ``(1, 1, -2)`` shows this is tight.
"""

import numpy as np

from rgboost import FnVec

from rgboost.edge import (
    WeightedClassification, check_adaboost_to_l2, realized_edge, multiclass_implied_edge, multiclass_requirement_check,
)
from rgboost.learners import multiclass_encoding

# binary: random instances, every hypothesis in {-1, +1}^N
rng = np.random.default_rng(0)
checked = violated = 0
for _ in range(200):
    N = int(rng.integers(1, 7))
    wc = WeightedClassification(rng.random(N) + 1e-3, rng.choice([-1.0, 1.0], N))
    for bits in range(2**N):
        h = np.array([1.0 if bits >> i & 1 else -1.0 for i in range(N)])
        correct = wc.weights[h == wc.labels].sum() / wc.weights.sum()
        delta = 2 * correct - 1
        if delta <= 0:
            continue
        chk = check_adaboost_to_l2(wc, h, delta)
        checked += chk.premise
        violated += not chk.holds
print(f"binary: {checked} hypotheses with a positive edge, {violated} below delta/sqrt(N)")

# multiclass: the tight instance
wc = WeightedClassification(rewards=np.array([[1.0, 1.0, -2.0]]))
h = multiclass_encoding(np.array([0]), 3)      # predict class 0
delta = 1.0                                      # reward 1 = best possible, so delta = 1
fwd, _ = multiclass_requirement_check(wc, h, delta)
t = wc.target()
edge = realized_edge(t, FnVec(t.space, h)).raw
print(f"\nrewards (1, 1, -2), predict class 0: L2 edge = {edge:.3f}")
print(f"  against delta/sqrt(N) = {delta:.3f}: holds={fwd.holds}, margin={fwd.margin:+.3f}")
fixed, _ = multiclass_requirement_check(wc, h, delta, implied_edge=multiclass_implied_edge(1, 3, delta))
print(f"  against delta/((K-1) sqrt(N)) = {multiclass_implied_edge(1, 3, delta):.3f}: "
      f"holds={fixed.holds}, margin={fixed.margin:+.3f}")
