import math

import numpy as np
import pytest

from simbound.cover import (
    coverage_sets,
    cover_curve,
    cover_curve_results,
    greedy_cover,
    greedy_ratio_bound,
    verify_cover,
)
from simbound.dataio import PredictionMatrix
from simbound.oracle import exhaustive_min_cover, is_cover


def three_model_matrix():
    # errors 0.1 / 0.2 / 0.3; sims (0,1)=0.9, (0,2)=0.7, (1,2)=0.7
    mist = np.zeros((20, 3), dtype=int)
    mist[[0, 1], 0] = 1
    mist[[0, 1, 2, 3], 1] = 1
    mist[[0, 2, 4, 5, 6, 7], 2] = 1
    return PredictionMatrix.from_array(mist)


def test_three_model_statistics():
    mat = three_model_matrix()
    np.testing.assert_allclose(mat.error_rates, [0.1, 0.2, 0.3])
    sim = mat.similarity()
    assert (sim[0, 1], sim[0, 2], sim[1, 2]) == pytest.approx((0.9, 0.7, 0.7))


def test_three_model_cover():
    # model 0 is the only one below itself and model 1 the only one above
    # itself among similar models, so every model must self-cover
    mat = three_model_matrix()
    r = greedy_cover(mat, 0.8)
    assert r.cover_indices == (0, 1, 2)
    assert exhaustive_min_cover(mat.mistakes, 0.8) == (0, 1, 2)
    assert verify_cover(mat, r)
    assert r.label == "empirical cover"


def test_three_model_lower_eta():
    mat = three_model_matrix()
    r = greedy_cover(mat, 0.7)
    assert r.size == 2
    assert r.cover_indices == (0, 2)
    assert r.certificate[1] == (0, 2)


def test_identical_columns():
    col = np.array([0, 1, 1, 0, 1])
    mat = PredictionMatrix.from_array(np.tile(col[:, None], (1, 4)))
    for eta in (0.0, 0.5, 1.0):
        assert greedy_cover(mat, eta).size == 1


def test_eta_zero_at_most_two():
    rng = np.random.default_rng(0)
    for _ in range(20):
        mat = PredictionMatrix.from_array(rng.integers(0, 2, (30, 6)))
        assert greedy_cover(mat, 0.0).size <= 2


def test_eta_one_distinct_columns():
    mat = PredictionMatrix.from_array(np.eye(5, dtype=int))
    assert cover_curve(mat, [1.0]) == [(1.0, 5)]


def test_coverage_sets_self():
    mat = three_model_matrix()
    below, above = coverage_sets(mat, 1.0)
    np.testing.assert_array_equal(below, np.eye(3, dtype=bool))
    np.testing.assert_array_equal(above, np.eye(3, dtype=bool))


def test_verify_rejects_bad_certificate():
    mat = three_model_matrix()
    r = greedy_cover(mat, 0.8)
    bad = type(r)(r.eta, (0, 1), r.below_witness, r.above_witness)
    assert not verify_cover(mat, bad)
    with pytest.raises(ValueError):
        greedy_cover(mat, 1.5)


def test_against_exhaustive_small():
    rng = np.random.default_rng(42)
    for _ in range(150):
        n = int(rng.integers(5, 50))
        m = int(rng.integers(1, 11))
        # correlated columns so covers are nontrivial
        base = rng.random(n) < 0.3
        flips = rng.random((n, m)) < rng.uniform(0.02, 0.4)
        mat = PredictionMatrix.from_array((base[:, None] ^ flips).astype(int))
        eta = float(rng.uniform(0.4, 1.0))
        r = greedy_cover(mat, eta)
        assert verify_cover(mat, r)
        assert is_cover(mat.mistakes, r.cover_indices, eta)
        best = len(exhaustive_min_cover(mat.mistakes, eta))
        assert best <= r.size <= best * greedy_ratio_bound(m)


def test_curve_monotone_and_sound():
    rng = np.random.default_rng(1)
    base = rng.random(200) < 0.25
    mist = base[:, None] ^ (rng.random((200, 20)) < np.linspace(0.01, 0.3, 20))
    mat = PredictionMatrix.from_array(mist.astype(int))
    grid = np.linspace(0.5, 1.0, 26)
    curve = cover_curve(mat, grid)
    sizes = [s for _, s in curve]
    assert all(b >= a for a, b in zip(sizes, sizes[1:]))
    for r in cover_curve_results(mat, grid):
        assert verify_cover(mat, r)


def test_curve_keeps_grid_order():
    mat = three_model_matrix()
    curve = cover_curve(mat, [0.9, 0.5, 0.8])
    assert [e for e, _ in curve] == [0.9, 0.5, 0.8]


def test_random_200x20_within_greedy_factor():
    rng = np.random.default_rng(2024)
    mat = PredictionMatrix.from_array(rng.integers(0, 2, (200, 20)))
    # independent random columns agree on about half the rows
    for eta in (0.0, 0.4, 0.45):
        r = greedy_cover(mat, eta)
        # lower bound on the optimum: each member covers at most its similar set
        below, above = coverage_sets(mat, eta)
        per = np.maximum(below.sum(axis=1), above.sum(axis=1)).max()
        lower = math.ceil(mat.n_models / per)
        assert lower <= r.size <= max(lower, 2) * greedy_ratio_bound(20)


def test_greedy_ratio_bound():
    assert greedy_ratio_bound(20) == pytest.approx(1 + math.log(40))
