import numpy as np
import pytest

from rgboost import (
    BinaryHinge, FnVec, MulticlassHinge, PairwiseRankingHinge, SampleSpace, SquaredLoss, TwoPointAbs,
    inner, norm, pointwise_optimum, regularize, subgradient_oracle,
)
from rgboost.errors import SpaceMismatchError, UnsupportedObjectiveError
from rgboost.objectives import LabeledData, make_objective, preference_pairs

from zoo import build_zoo, off_kink, random_fn

ZOO = build_zoo()


# ---------------------------------------------------------------------------
# value / subgradient examples


def test_squared_exact_fit(two_points):
    obj = SquaredLoss(two_points, [1, -1])
    assert obj.value(FnVec(two_points, [1, -1])) == 0.0
    np.testing.assert_array_equal(obj.subgradient(FnVec(two_points, [2, 0])).values, [[1], [1]])


def test_binary_hinge_single_point():
    S = SampleSpace([[0.0]])
    obj = BinaryHinge(S, [1])
    assert obj.value(FnVec(S, [0.5])) == pytest.approx(0.5)
    # exactly on the margin: zero selection
    assert obj.subgradient(FnVec(S, [1.0])).values[0, 0] == 0.0


def test_two_point_abs_value_and_subgradient(two_points):
    obj = TwoPointAbs(two_points)
    f = FnVec(two_points, [0.5, 1.0])
    assert obj.value(f) == pytest.approx(2.0)
    g = obj.subgradient(f)
    # Euclidean partials are (2, 1); with p = (1/2, 1/2) the L2 subgradient is (4, 2)
    np.testing.assert_allclose(g.values[:, 0], [4.0, 2.0])
    assert obj.subgradient(two_points.zeros()).values.tolist() == [[0.0], [0.0]]


def test_multiclass_hinge_tie_break():
    S = SampleSpace([[0.0]], output_dim=3)
    obj = MulticlassHinge(S, [0])
    f = S.zeros()
    assert obj.value(f) == 1.0
    np.testing.assert_array_equal(obj.subgradient(f).values, [[-1.0, 1.0, 0.0]])


def test_multiclass_hinge_inactive_at_margin():
    S = SampleSpace([[0.0]], output_dim=3)
    obj = MulticlassHinge(S, [2])
    f = FnVec(S, [[0.0, 0.0, 1.0]])
    assert obj.value(f) == 0.0
    assert not obj.subgradient(f).values.any()


def test_multiclass_shift_invariance(rng):
    obj = ZOO["multiclass_hinge"]
    for _ in range(20):
        f = random_fn(rng, obj.space)
        shift = rng.normal(size=(obj.space.n, 1))
        g = FnVec(obj.space, f.values + shift)
        assert obj.value(g) == pytest.approx(obj.value(f), abs=1e-12)


def test_ranking_hinge_two_items():
    S = SampleSpace.uniform(2)
    obj = PairwiseRankingHinge(S, [1, 0])
    assert obj.value(S.zeros()) == 1.0
    g = obj.subgradient(S.zeros())
    # d/df_a = -1, d/df_b = +1, divided by p = 1/2
    np.testing.assert_allclose(g.values[:, 0], [-2.0, 2.0])
    assert obj.value(FnVec(S, [1.0, 0.0])) == 0.0


def test_preference_pairs_respect_groups():
    pairs = preference_pairs(np.array([2, 1, 0, 1]), np.array([0, 0, 1, 1]))
    assert pairs.tolist() == [[0, 1], [3, 2]]


def test_space_mismatch(two_points):
    obj = SquaredLoss(two_points, [0, 0])
    with pytest.raises(SpaceMismatchError):
        obj.value(SampleSpace.uniform(2).zeros())


def test_label_validation(two_points):
    with pytest.raises(ValueError):
        BinaryHinge(two_points, [0, 1])
    with pytest.raises(ValueError):
        MulticlassHinge(SampleSpace.uniform(2, output_dim=3), [0, 3])


# ---------------------------------------------------------------------------
# regularize


def test_regularize_zero_function(two_points):
    base = SquaredLoss(two_points, [1, 2])
    reg = regularize(base, 1.0)
    z = two_points.zeros()
    assert reg.value(z) == base.value(z)
    np.testing.assert_array_equal(reg.subgradient(z).values, base.subgradient(z).values)


def test_regularize_constants(two_points):
    reg = regularize(SquaredLoss(two_points, [1, 2]), 1.0)
    assert reg.lam == 2.0 and reg.Lam == 2.0
    assert regularize(BinaryHinge(two_points, [1, 1]), 0.5).Lam is None


def test_regularize_hinge_single_point():
    S = SampleSpace([[0.0]])
    reg = regularize(BinaryHinge(S, [1]), 0.5)
    f = FnVec(S, [2.0])
    assert reg.value(f) == pytest.approx(1.0)
    assert reg.subgradient(f).values[0, 0] == pytest.approx(1.0)


def test_regularize_rejects_nonpositive(two_points):
    with pytest.raises(ValueError):
        regularize(SquaredLoss(two_points, [0, 0]), 0.0)


# ---------------------------------------------------------------------------
# generic properties over every objective


@pytest.mark.parametrize("name", sorted(ZOO))
def test_subgradient_inequality(name, rng):
    obj = ZOO[name]
    for _ in range(100):
        f, f2 = random_fn(rng, obj.space), random_fn(rng, obj.space)
        g = obj.subgradient(f)
        assert obj.value(f2) >= obj.value(f) + inner(g, f2 - f) - 1e-8


@pytest.mark.parametrize("name", sorted(ZOO))
def test_midpoint_convexity(name, rng):
    obj = ZOO[name]
    for _ in range(50):
        f, g = random_fn(rng, obj.space), random_fn(rng, obj.space)
        mid = 0.5 * f + 0.5 * g
        assert obj.value(mid) <= 0.5 * obj.value(f) + 0.5 * obj.value(g) + 1e-9


@pytest.mark.parametrize("name", sorted(ZOO))
def test_finite_differences(name, rng):
    obj = ZOO[name]
    eps = 1e-6
    checked = 0
    while checked < 100:
        f, d = random_fn(rng, obj.space), random_fn(rng, obj.space, 1.0)
        if not off_kink(obj, f, d, eps):
            continue
        fd = (obj.value(f + eps * d) - obj.value(f - eps * d)) / (2 * eps)
        ip = inner(obj.subgradient(f), d)
        assert abs(fd - ip) <= 1e-5 * max(abs(ip), 1e-5), (fd, ip)
        checked += 1


@pytest.mark.parametrize("name", [k for k in sorted(ZOO) if ZOO[k].lam])
def test_strong_convexity(name, rng):
    obj = ZOO[name]
    for _ in range(100):
        f, f2 = random_fn(rng, obj.space), random_fn(rng, obj.space)
        lower = obj.value(f) + inner(obj.subgradient(f), f2 - f) + 0.5 * obj.lam * norm(f2 - f) ** 2
        assert obj.value(f2) >= lower - 1e-8


@pytest.mark.parametrize("name", [k for k in sorted(ZOO) if ZOO[k].Lam])
def test_strong_smoothness(name, rng):
    obj = ZOO[name]
    for _ in range(100):
        f, f2 = random_fn(rng, obj.space), random_fn(rng, obj.space)
        upper = obj.value(f) + inner(obj.subgradient(f), f2 - f) + 0.5 * obj.Lam * norm(f2 - f) ** 2
        assert obj.value(f2) <= upper + 1e-8


# ---------------------------------------------------------------------------
# reference optima


def test_pointwise_optimum_squared(rng):
    S = SampleSpace(rng.normal(size=(6, 1)))
    y = rng.normal(size=6)
    ref = pointwise_optimum(SquaredLoss(S, y), 0.1)
    np.testing.assert_allclose(ref.f_star.values[:, 0], y, atol=1e-6)
    assert ref.value_star == pytest.approx(0.0, abs=1e-12)


def test_pointwise_optimum_two_point_abs(two_points):
    ref = pointwise_optimum(TwoPointAbs(two_points), 0.1)
    np.testing.assert_allclose(ref.f_star.values, 0.0, atol=1e-12)
    assert ref.value_star == pytest.approx(0.0, abs=1e-11)


def test_pointwise_optimum_regularized_hinge():
    # argmin_v max(0, 1 - v) + v^2 / 2 is v = 1 (the kink), with value 1/2
    S = SampleSpace([[0.0]])
    obj = regularize(BinaryHinge(S, [1]), 1.0)
    ref = pointwise_optimum(obj, 0.05)
    v = ref.f_star.values[0, 0]
    assert v == pytest.approx(1.0, abs=1e-6)
    assert ref.value_star == pytest.approx(0.5, abs=1e-10)
    # 0 lies in the subdifferential: [-1, 0] + v
    assert v - 1.0 <= 1e-6 and v >= 0.0
    probes = np.linspace(-3, 3, 6001)
    assert np.all(obj.base.point_loss(0, probes[:, None]) + 0.5 * probes**2 >= ref.value_star - 1e-6)


def test_pointwise_optimum_regularized_multiclass():
    # per point: v = (2/3, -1/3, -1/3) rotated to the label, loss 1/3
    S = SampleSpace([[0.0], [1.0]], output_dim=3)
    obj = regularize(MulticlassHinge(S, [0, 2]), 1.0)
    ref = pointwise_optimum(obj, 0.05)
    np.testing.assert_allclose(ref.f_star.values, [[2 / 3, -1 / 3, -1 / 3], [-1 / 3, -1 / 3, 2 / 3]], atol=1e-6)
    assert ref.value_star == pytest.approx(1 / 3, abs=1e-9)


def test_pointwise_optimum_rejects_ranking():
    S = SampleSpace.uniform(2)
    with pytest.raises(UnsupportedObjectiveError):
        pointwise_optimum(PairwiseRankingHinge(S, [1, 0]), 0.1)


def test_subgradient_oracle_agrees_with_grid(rng):
    S = SampleSpace(rng.normal(size=(5, 1)))
    obj = SquaredLoss(S, rng.normal(size=5))
    a = pointwise_optimum(obj, 0.05)
    b = subgradient_oracle(obj, 10_000)
    assert b.method == "subgradient-descent"
    assert abs(a.value_star - b.value_star) <= 1e-4


def test_subgradient_oracle_ranking_two_items():
    S = SampleSpace.uniform(2)
    ref = subgradient_oracle(PairwiseRankingHinge(S, [1, 0]), 10_000)
    assert ref.value_star == 0.0
    assert ref.f_star.values[0, 0] - ref.f_star.values[1, 0] >= 1.0


def test_subgradient_oracle_zero_iters(two_points):
    obj = SquaredLoss(two_points, [1.0, 3.0])
    ref = subgradient_oracle(obj, 0)
    assert ref.value_star == obj.value(two_points.zeros())


def test_make_objective_registry(two_points):
    obj = make_objective("hinge", two_points, LabeledData(np.array([1, -1])), lam=0.5)
    assert obj.lam == 0.5
    with pytest.raises(KeyError):
        make_objective("nope", two_points, None)
