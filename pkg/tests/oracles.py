"""Brute-force reference implementations used only by the tests.

These deliberately avoid the library's cumulative-sum search: every
candidate hypothesis is materialized and scored directly.
"""

import itertools

import numpy as np

TIE = 1e-12


def thresholds(col):
    u = sorted(set(float(v) for v in col))
    mids = [(a + b) / 2 for a, b in zip(u[:-1], u[1:])]
    return [-np.inf] + mids + [np.inf]


def wdot(p, a, b):
    return float(sum(pi * float(np.dot(ai, bi)) for pi, ai, bi in zip(p, a, b)))


def first_best(cands, key):
    """First candidate whose score is within TIE of the maximum."""
    scores = [key(c) for c in cands]
    top = max(scores)
    for c, s in zip(cands, scores):
        if s >= top - TIE * max(1.0, abs(top)):
            return c, s


def brute_regression_stump(X, p, T):
    """Returns (feature, threshold, sse) minimizing weighted SSE with mean leaves."""
    cands = []
    for j in range(X.shape[1]):
        for th in thresholds(X[:, j]):
            left = X[:, j] <= th
            H = np.zeros_like(T)
            for mask in (left, ~left):
                if mask.any():
                    H[mask] = (p[mask, None] * T[mask]).sum(0) / p[mask].sum()
            sse = wdot(p, T - H, T - H)
            cands.append((j, th, sse, H))
    return first_best(cands, key=lambda c: -c[2])[0]


def brute_binary_stump(X, p, t):
    """Returns (feature, threshold, sign, score, h) maximizing <t, h> over ±1 stumps."""
    cands = []
    for j in range(X.shape[1]):
        for th in thresholds(X[:, j]):
            for s in (1.0, -1.0):
                h = np.where(X[:, j] <= th, -s, s)
                cands.append((j, th, s, float(np.sum(p * t * h)), h))
    return first_best(cands, key=lambda c: c[3])[0]


def encode(cls, K):
    v = np.full(K, -1.0 / (K - 1))
    v[cls] = 1.0
    return v


def brute_multiclass_stump(X, p, T, K):
    """Returns (feature, threshold, class_l, class_r, score, H) maximizing <T, H'>."""
    cands = []
    for j in range(X.shape[1]):
        for th in thresholds(X[:, j]):
            for cl, cr in itertools.product(range(K), repeat=2):
                H = np.array([encode(cl if x <= th else cr, K) for x in X[:, j]])
                cands.append((j, th, cl, cr, wdot(p, T, H), H))
    return first_best(cands, key=lambda c: c[4])[0]


def all_binary_stumps(X):
    """Every distinct ±1 stump vector on the rows of X."""
    out = []
    for j in range(X.shape[1]):
        for th in thresholds(X[:, j]):
            for s in (1.0, -1.0):
                out.append(np.where(X[:, j] <= th, -s, s))
    return out


def all_multiclass_stumps(X, K):
    """Every encoded multiclass stump (rows) on the rows of X, with predicted classes."""
    out = []
    for j in range(X.shape[1]):
        for th in thresholds(X[:, j]):
            for cl, cr in itertools.product(range(K), repeat=2):
                cls = np.where(X[:, j] <= th, cl, cr)
                out.append((cls, np.array([encode(c, K) for c in cls])))
    return out
