"""Prediction matrices and their descriptive statistics.

Convention: a cell is 1 when the model got the example WRONG (the 0/1 loss
``q_f(z) = 1{f(x) != y}``).  Public testbeds usually store correctness
instead; flip them with ``PredictionMatrix.from_correct`` or
``load_matrix(..., correct=True)``.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

__all__ = [
    "PredictionMatrix",
    "SimilaritySummary",
    "DifficultyHistogram",
    "load_matrix",
    "summarize",
    "difficulty_histogram",
]


@dataclass(frozen=True)
class PredictionMatrix:
    """``n_examples x n_models`` mistake matrix (1 = model erred)."""

    model_ids: tuple
    mistakes: np.ndarray
    example_ids: tuple | None = None

    def __post_init__(self):
        m = np.asarray(self.mistakes)
        if m.ndim != 2:
            raise ValueError("mistakes must be a 2-d array")
        if m.shape[0] < 1:
            raise ValueError("need at least one example")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("mistake cells must be 0 or 1")
        ids = tuple(str(i) for i in self.model_ids)
        if len(ids) != m.shape[1]:
            raise ValueError(f"{len(ids)} model ids for {m.shape[1]} columns")
        if len(set(ids)) != len(ids):
            raise ValueError("model ids must be unique")
        object.__setattr__(self, "model_ids", ids)
        object.__setattr__(self, "mistakes", m.astype(np.uint8))

    @classmethod
    def from_array(cls, mistakes, model_ids=None) -> "PredictionMatrix":
        mistakes = np.asarray(mistakes)
        if model_ids is None:
            model_ids = [f"m{i}" for i in range(mistakes.shape[1])]
        return cls(tuple(model_ids), mistakes)

    @classmethod
    def from_correct(cls, correct, model_ids=None) -> "PredictionMatrix":
        return cls.from_array(1 - np.asarray(correct), model_ids)

    @property
    def n_examples(self) -> int:
        return self.mistakes.shape[0]

    @property
    def n_models(self) -> int:
        return self.mistakes.shape[1]

    @property
    def error_counts(self) -> np.ndarray:
        return self.mistakes.sum(axis=0, dtype=np.int64)

    @property
    def error_rates(self) -> np.ndarray:
        return self.error_counts / self.n_examples

    def co_error_counts(self) -> np.ndarray:
        """Number of examples on which both models of a pair erred."""
        m = self.mistakes.astype(np.int64)
        return m.T @ m

    def agreement_counts(self) -> np.ndarray:
        """Exact integer count of examples on which two columns agree."""
        e = self.error_counts
        return self.n_examples - (e[:, None] + e[None, :] - 2 * self.co_error_counts())

    def similarity(self) -> np.ndarray:
        return self.agreement_counts() / self.n_examples


@dataclass(frozen=True)
class SimilaritySummary:
    error_rates: np.ndarray
    similarity: np.ndarray
    baseline: np.ndarray
    agreement_counts: np.ndarray = field(repr=False)
    n_examples: int = 0

    @property
    def mean_similarity(self) -> float:
        """Mean over distinct pairs; ``nan`` for a single model."""
        return _off_diagonal_mean(self.similarity)

    @property
    def mean_baseline(self) -> float:
        return _off_diagonal_mean(self.baseline)

    @property
    def min_similarity(self) -> float:
        m = self.similarity.shape[0]
        if m < 2:
            return 1.0
        iu = np.triu_indices(m, 1)
        return float(self.similarity[iu].min())


def _off_diagonal_mean(a: np.ndarray) -> float:
    m = a.shape[0]
    if m < 2:
        return float("nan")
    iu = np.triu_indices(m, 1)
    return float(a[iu].mean())


@dataclass(frozen=True)
class DifficultyHistogram:
    """``counts[d]`` examples were misclassified by exactly ``d`` models."""

    counts: np.ndarray

    @property
    def cumulative(self) -> np.ndarray:
        """Examples misclassified by at most ``d`` models."""
        return np.cumsum(self.counts)

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    @property
    def cumulative_fractions(self) -> np.ndarray:
        return self.cumulative / self.counts.sum()


def load_matrix(source, *, example_id_col: bool = False, correct: bool = False) -> PredictionMatrix:
    """Parse a CSV prediction matrix.

    ``source`` is a path, a text/binary stream, or raw bytes.  The first line
    holds the model ids; every following line holds one example's 0/1
    cells.  With ``example_id_col`` the first column is an opaque example
    id (its header cell is ignored).  With ``correct`` cells are read as
    1 = correct and flipped into mistakes.
    """
    text = _read_text(source)
    rows = list(csv.reader(io.StringIO(text, newline="")))
    # drop trailing blank lines only
    while rows and not any(c.strip() for c in rows[-1]):
        rows.pop()
    if not rows:
        raise ParseError("empty input", line=1)
    header = [h.strip() for h in rows[0]]
    if example_id_col:
        header = header[1:]
    if not header or any(h == "" for h in header):
        raise ParseError("header must list non-empty model ids", line=1)
    seen = set()
    for h in header:
        if h in seen:
            raise ParseError(f"duplicate model id {h!r}", line=1)
        seen.add(h)
    if len(rows) < 2:
        raise ParseError("no example rows after the header", line=2)

    width = len(header)
    cells = np.empty((len(rows) - 1, width), dtype=np.uint8)
    example_ids = [] if example_id_col else None
    for i, row in enumerate(rows[1:]):
        lineno = i + 2
        if example_id_col:
            if not row:
                raise ParseError("missing example id", line=lineno)
            example_ids.append(row[0].strip())
            row = row[1:]
        if len(row) != width:
            raise ParseError(f"expected {width} cells, found {len(row)}", line=lineno)
        for c, raw in enumerate(row):
            v = raw.strip()
            if v == "0":
                cells[i, c] = 0
            elif v == "1":
                cells[i, c] = 1
            else:
                raise ParseError(f"non-binary cell {raw!r} in column {c + 1}", line=lineno)
    if correct:
        cells = 1 - cells
    return PredictionMatrix(
        tuple(header), cells, tuple(example_ids) if example_ids is not None else None
    )


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    return data


def summarize(matrix: PredictionMatrix) -> SimilaritySummary:
    """Error rates, pairwise agreement, and the independent-mistakes baseline.

    The baseline for a pair with error rates ``a``, ``b`` is
    ``a b + (1 - a)(1 - b)``: the agreement two models with those error
    rates would show if their mistakes were independent.
    """
    mu = matrix.error_rates
    counts = matrix.agreement_counts()
    sim = counts / matrix.n_examples
    baseline = np.outer(mu, mu) + np.outer(1 - mu, 1 - mu)
    return SimilaritySummary(mu, sim, baseline, counts, matrix.n_examples)


def difficulty_histogram(matrix: PredictionMatrix) -> DifficultyHistogram:
    per_example = matrix.mistakes.sum(axis=1, dtype=np.int64)
    return DifficultyHistogram(np.bincount(per_example, minlength=matrix.n_models + 1))
