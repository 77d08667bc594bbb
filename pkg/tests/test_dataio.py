import io

import numpy as np
import pytest

from simbound.dataio import (
    PredictionMatrix,
    difficulty_histogram,
    load_matrix,
    summarize,
)
from simbound.errors import ParseError


def test_load_simple():
    mat = load_matrix(b"a,b\n0,0\n1,0\n")
    assert mat.model_ids == ("a", "b")
    assert mat.mistakes.shape == (2, 2)
    np.testing.assert_allclose(mat.error_rates, [0.5, 0.0])


def test_load_path_stream_crlf(tmp_path):
    path = tmp_path / "m.csv"
    path.write_bytes(b"a,b\r\n0,1\r\n1,1\r\n\r\n")
    from_path = load_matrix(path)
    from_str = load_matrix(str(path))
    from_stream = load_matrix(io.StringIO("a,b\n0,1\n1,1\n"))
    for mat in (from_path, from_str, from_stream):
        np.testing.assert_array_equal(mat.mistakes, [[0, 1], [1, 1]])


def test_example_id_col_and_correct():
    mat = load_matrix(b"id,a,b\nx1,1,1\nx2,0,1\n", example_id_col=True, correct=True)
    assert mat.example_ids == ("x1", "x2")
    np.testing.assert_array_equal(mat.mistakes, [[0, 0], [1, 0]])


@pytest.mark.parametrize("data,line", [
    (b"", 1),
    (b"a,b\n", 2),
    (b"a,b\n0,1\n0,2\n", 3),
    (b"a,b\n0,1\n0\n", 3),
    (b"a,a\n0,1\n", 1),
    (b"a,\n0,1\n", 1),
    (b"a,b\n0,1\n1,x\n", 3),
])
def test_parse_errors_name_line(data, line):
    with pytest.raises(ParseError) as info:
        load_matrix(data)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_matrix_validation():
    with pytest.raises(ValueError):
        PredictionMatrix(("a",), np.array([[2]]))
    with pytest.raises(ValueError):
        PredictionMatrix(("a", "a"), np.zeros((1, 2)))
    with pytest.raises(ValueError):
        PredictionMatrix(("a",), np.zeros((0, 1)))
    with pytest.raises(ValueError):
        PredictionMatrix(("a",), np.zeros((2, 2)))


def test_toy_similarity():
    mat = PredictionMatrix.from_array(np.array([[0, 0], [0, 1], [1, 1], [1, 0]]))
    s = summarize(mat)
    np.testing.assert_allclose(s.error_rates, [0.5, 0.5])
    assert s.similarity[0, 1] == 0.5
    assert s.baseline[0, 1] == 0.5
    assert s.mean_similarity == 0.5


def test_identical_and_complementary_columns():
    col = np.array([0, 1, 1, 0, 0, 0, 1, 0])
    same = summarize(PredictionMatrix.from_array(np.c_[col, col]))
    mu = col.mean()
    assert same.similarity[0, 1] == 1.0
    assert same.baseline[0, 1] == pytest.approx(mu**2 + (1 - mu) ** 2)
    comp = summarize(PredictionMatrix.from_array(np.c_[col, 1 - col]))
    assert comp.similarity[0, 1] == 0.0


def test_summary_invariants_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n, m = rng.integers(1, 60), rng.integers(1, 8)
        mist = rng.integers(0, 2, (n, m))
        mat = PredictionMatrix.from_array(mist)
        s = summarize(mat)
        direct = np.array([[np.mean(mist[:, i] == mist[:, j]) for j in range(m)] for i in range(m)])
        np.testing.assert_allclose(s.similarity, direct, atol=1e-15)
        co = mat.co_error_counts() / n
        mu = s.error_rates
        np.testing.assert_allclose(s.similarity, 1 - (mu[:, None] + mu[None, :] - 2 * co), atol=1e-12)
        np.testing.assert_array_equal(np.diag(s.similarity), 1.0)
        np.testing.assert_array_equal(s.similarity, s.similarity.T)
        assert np.all(s.baseline >= 1 - mu[:, None] - mu[None, :] - 1e-15)


def test_single_model_summary():
    s = summarize(PredictionMatrix.from_array([[1], [0]]))
    assert np.isnan(s.mean_similarity)
    assert s.min_similarity == 1.0


def test_histogram():
    zeros = difficulty_histogram(PredictionMatrix.from_array(np.zeros((5, 3), int)))
    np.testing.assert_array_equal(zeros.counts, [5, 0, 0, 0])
    ones = difficulty_histogram(PredictionMatrix.from_array(np.ones((5, 3), int)))
    np.testing.assert_array_equal(ones.counts, [0, 0, 0, 5])
    h = difficulty_histogram(PredictionMatrix.from_array([[0, 0], [0, 1], [1, 1], [1, 0]]))
    np.testing.assert_array_equal(h.counts, [1, 2, 1])
    np.testing.assert_array_equal(h.cumulative, [1, 3, 4])
    assert h.counts.sum() == 4
    assert h.cumulative_fractions[-1] == 1.0


def test_from_correct():
    mat = PredictionMatrix.from_correct([[1, 0]], ["x", "y"])
    np.testing.assert_array_equal(mat.mistakes, [[0, 1]])
