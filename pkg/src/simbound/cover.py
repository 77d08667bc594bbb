"""Empirical similarity covers of a set of models.

A cover at level ``eta`` is a subset ``M`` of the models such that every
model ``q`` has a member of ``M`` with error <= err(q) and a member with
error >= err(q), both agreeing with ``q`` on at least an ``eta`` fraction of
examples.  Its size upper-bounds the covering number used by the
closed-form guarantees.  Population quantities are replaced by their
plug-in estimates from the prediction matrix, so every result here is an
*empirical* cover.

Covers are built greedily (weighted set cover over the ``2 m`` elements
``(q, below)`` / ``(q, above)``), then pruned of redundant members.
Agreement comparisons use exact integer counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataio import PredictionMatrix

__all__ = [
    "CoverResult",
    "greedy_cover",
    "cover_curve",
    "verify_cover",
    "coverage_sets",
    "cover_curve_results",
    "greedy_ratio_bound",
]


@dataclass(frozen=True)
class CoverResult:
    eta: float
    cover_indices: tuple
    below_witness: tuple
    above_witness: tuple
    label: str = "empirical cover"

    @property
    def size(self) -> int:
        return len(self.cover_indices)

    @property
    def certificate(self) -> list[tuple[int, int]]:
        """Per model, the cover members certifying it from below and above."""
        return list(zip(self.below_witness, self.above_witness))


def _similar(matrix: PredictionMatrix, eta: float) -> np.ndarray:
    # agreement >= eta * n, compared on integer counts
    agree = matrix.agreement_counts()
    need = eta * matrix.n_examples
    return agree >= need - 1e-9 * max(1.0, need)


def coverage_sets(matrix: PredictionMatrix, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Boolean ``(below, above)`` matrices: ``below[c, q]`` iff candidate ``c`` covers ``(q, below)``."""
    sim = _similar(matrix, eta)
    err = matrix.error_counts
    below = sim & (err[:, None] <= err[None, :])
    above = sim & (err[:, None] >= err[None, :])
    return below, above


def _witnesses(below, above, members):
    """First member (in the given order) covering each element, or ``None`` if some element is bare."""
    members = np.asarray(list(members), dtype=np.int64)
    if members.size == 0:
        return None
    b, a = below[members], above[members]
    if not (b.any(axis=0).all() and a.any(axis=0).all()):
        return None
    bw = members[np.argmax(b, axis=0)]
    aw = members[np.argmax(a, axis=0)]
    return tuple(int(x) for x in bw), tuple(int(x) for x in aw)


def greedy_cover(matrix: PredictionMatrix, eta: float) -> CoverResult:
    """Greedy empirical similarity cover at level ``eta``.

    Each round picks the model covering the most still-uncovered elements,
    ties going to the lowest column index.  Afterwards members are dropped,
    in selection order, whenever the remainder is still a cover.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    below, above = coverage_sets(matrix, eta)
    m = matrix.n_models
    unc_below = np.ones(m, dtype=bool)
    unc_above = np.ones(m, dtype=bool)
    chosen = []
    while unc_below.any() or unc_above.any():
        gains = (below & unc_below).sum(axis=1) + (above & unc_above).sum(axis=1)
        c = int(np.argmax(gains))
        if gains[c] == 0:
            raise RuntimeError("greedy cover stalled")  # impossible: each model covers itself
        chosen.append(c)
        unc_below &= ~below[c]
        unc_above &= ~above[c]

    kept = list(chosen)
    for c in chosen:
        trial = [x for x in kept if x != c]
        if trial and _witnesses(below, above, trial) is not None:
            kept = trial
    bw, aw = _witnesses(below, above, kept)
    result = CoverResult(float(eta), tuple(sorted(kept)), bw, aw)
    if not verify_cover(matrix, result):
        raise RuntimeError("constructed cover failed verification")
    return result


def verify_cover(matrix: PredictionMatrix, result: CoverResult) -> bool:
    """Recheck the four cover conditions for every model from raw counts."""
    m = matrix.n_models
    cover = set(result.cover_indices)
    if len(result.below_witness) != m or len(result.above_witness) != m:
        return False
    mist = matrix.mistakes.astype(np.int64)
    n = matrix.n_examples
    err = mist.sum(axis=0)
    for q in range(m):
        lo, hi = result.below_witness[q], result.above_witness[q]
        if lo not in cover or hi not in cover:
            return False
        if err[lo] > err[q] or err[hi] < err[q]:
            return False
        for w in (lo, hi):
            agree = int(np.count_nonzero(mist[:, w] == mist[:, q]))
            if agree < result.eta * n - 1e-9 * max(1.0, result.eta * n):
                return False
    return True


def cover_curve(matrix: PredictionMatrix, eta_grid) -> list[tuple[float, int]]:
    """Cover sizes along ``eta_grid``, returned in grid order.

    A cover at a higher level is also a cover at every lower level, so each
    point keeps the smaller of its own greedy cover and the best cover found
    at any higher grid level.  Sizes are therefore nondecreasing in ``eta``.
    """
    covers = cover_curve_results(matrix, eta_grid)
    return [(r.eta, r.size) for r in covers]


def cover_curve_results(matrix: PredictionMatrix, eta_grid) -> list[CoverResult]:
    etas = [float(e) for e in eta_grid]
    order = sorted(range(len(etas)), key=lambda i: -etas[i])
    out = [None] * len(etas)
    best = None
    for i in order:
        r = greedy_cover(matrix, etas[i])
        if best is not None and best.size < r.size:
            below, above = coverage_sets(matrix, etas[i])
            bw, aw = _witnesses(below, above, best.cover_indices)
            r = CoverResult(etas[i], best.cover_indices, bw, aw)
        best = r
        out[i] = r
    return out


def greedy_ratio_bound(m: int) -> float:
    """Worst-case greedy/optimal size ratio over a universe of ``2 m`` elements."""
    return 1.0 + math.log(2 * m)
