"""Independent reference computations.

Nothing in here calls the binomial-tail machinery of
:mod:`simbound.numerics` or the mixture sums of :mod:`simbound.bounds`.
Exact answers come from dynamic programming over count lattices (feasible
for small ``n``), approximate ones from seeded Monte-Carlo simulation of
the generative models.  Deviation events are re-expressed here as direct
comparisons of counts against ``n (p +/- eps)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingParams, NaiveBayesParams, PairwiseJoint

__all__ = [
    "MonteCarloEstimate",
    "PairSimulation",
    "enumerate_joint_tail",
    "enumerate_overfit_prob",
    "enumerate_nb_prob",
    "enumerate_trinomial_tail",
    "enumerate_binom_cdf",
    "exhaustive_min_cover",
    "is_cover",
    "simulate_nb",
    "simulate_pair",
    "simulate_trinomial",
    "nb_pattern_probs",
    "chunk_generator",
]

_TOL = 1e-9
CHUNK = 50_000


def _tol(x: float) -> float:
    return _TOL * max(1.0, abs(x))


def _at_least(c, x):
    return c >= x - _tol(x)


def _at_most(c, x):
    return c <= x + _tol(x)


def _deviates(c, n: int, mu: float, eps: float):
    """Upward deviation of ``eps`` or more, or downward deviation of more than ``eps``."""
    up = n * (mu + eps)
    down = n * (mu - eps)
    return _at_least(c, up) | (c < down - _tol(down))


# --------------------------------------------------------------------------
# Exact enumeration
# --------------------------------------------------------------------------

def enumerate_binom_cdf(n: int, p: float, m: int) -> float:
    """``P(Bin(n, p) <= m)`` by summing exact point masses."""
    if m < 0:
        return 0.0
    terms = [math.comb(n, x) * p**x * (1 - p) ** (n - x) for x in range(0, min(m, n) + 1)]
    return math.fsum(terms)


def _pair_lattice(n: int, cells) -> np.ndarray:
    # dist[c1, c2] after n draws of the pair with cell law (p11, p10, p01, p00)
    p11, p10, p01, p00 = cells
    dist = np.zeros((n + 1, n + 1))
    dist[0, 0] = 1.0
    for step in range(n):
        new = dist * p00
        new[1:, 1:] += dist[:-1, :-1] * p11
        new[1:, :] += dist[:-1, :] * p10
        new[:, 1:] += dist[:, :-1] * p01
        dist = new
    return dist


def enumerate_joint_tail(n: int, joint: PairwiseJoint, alpha1: float, alpha2: float) -> float:
    """``P(S2 <= n (p2 + alpha2), S1 >= n (p1 + alpha1))`` by exact lattice DP (``O(n^3)``)."""
    if n > 60:
        raise ValueError("lattice enumeration is meant for small n")
    dist = _pair_lattice(n, joint.cells)
    c = np.arange(n + 1)
    ok1 = _at_least(c, n * (joint.p1 + alpha1))
    ok2 = _at_most(c, n * (joint.p2 + alpha2))
    return math.fsum(dist[np.ix_(ok1, ok2)].ravel())


def nb_pattern_probs(params: NaiveBayesParams, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``2^k`` loss patterns of ``(X_1 W, ..., X_k W)`` and their probabilities."""
    patterns = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.int64)
    ones = patterns.sum(axis=1)
    probs = params.pw * params.px**ones * (1 - params.px) ** (k - ones)
    probs[ones == 0] += 1 - params.pw
    return patterns, probs


def enumerate_overfit_prob(n: int, mu: float, eps: float, patterns, probs) -> float:
    """``P(some model deviates)`` for ``n`` i.i.d. draws of a pattern law, exactly.

    ``patterns`` is a ``(P, k)`` 0/1 array, ``probs`` its probabilities.
    The DP runs over the ``(n + 1)^k`` lattice of per-model error counts.
    """
    patterns = np.asarray(patterns, dtype=np.int64)
    k = patterns.shape[1]
    if (n + 1) ** k > 2_000_000:
        raise ValueError("lattice too large for exhaustive enumeration")
    dist = np.zeros((n + 1,) * k)
    dist[(0,) * k] = 1.0
    for _ in range(n):
        new = np.zeros_like(dist)
        for pat, pr in zip(patterns, probs):
            if pr == 0:
                continue
            src = tuple(slice(0, n + 1 - b) for b in pat)
            dst = tuple(slice(b, n + 1) for b in pat)
            new[dst] += pr * dist[src]
        dist = new
    c = np.arange(n + 1)
    bad_1d = _deviates(c, n, mu, eps)
    grids = np.meshgrid(*([bad_1d] * k), indexing="ij")
    bad = np.logical_or.reduce(grids)
    return math.fsum(dist[bad].ravel())


def enumerate_nb_prob(n: int, params: NaiveBayesParams, k: int, eps: float) -> float:
    patterns, probs = nb_pattern_probs(params, k)
    return enumerate_overfit_prob(n, params.mu, eps, patterns, probs)


def enumerate_trinomial_tail(n: int, p1: float, p_neg1: float, t: float) -> float:
    """``P(mean of n draws > p1 - p_neg1 + t)`` for i.i.d. draws in {-1, 0, 1}."""
    p0 = 1.0 - p1 - p_neg1
    dist = np.zeros(2 * n + 1)  # index s + n
    dist[n] = 1.0
    for _ in range(n):
        new = dist * p0
        new[1:] += dist[:-1] * p1
        new[:-1] += dist[1:] * p_neg1
        dist = new
    s = np.arange(-n, n + 1)
    thr = n * (p1 - p_neg1 + t)
    return math.fsum(dist[s > thr + _tol(thr)])


# --------------------------------------------------------------------------
# Covers
# --------------------------------------------------------------------------

def is_cover(mistakes: np.ndarray, members, eta: float) -> bool:
    mist = np.asarray(mistakes, dtype=np.int64)
    n, m = mist.shape
    err = mist.sum(axis=0)
    members = list(members)
    need = eta * n
    for q in range(m):
        has_lo = has_hi = False
        for c in members:
            if np.count_nonzero(mist[:, c] == mist[:, q]) < need - _tol(need):
                continue
            has_lo |= err[c] <= err[q]
            has_hi |= err[c] >= err[q]
        if not (has_lo and has_hi):
            return False
    return True


def exhaustive_min_cover(mistakes: np.ndarray, eta: float) -> tuple[int, ...]:
    """Smallest cover drawn from the columns themselves, by brute force (first in lexicographic order)."""
    m = np.asarray(mistakes).shape[1]
    if m > 16:
        raise ValueError("exhaustive search is meant for at most 16 models")
    for size in range(1, m + 1):
        for combo in itertools.combinations(range(m), size):
            if is_cover(mistakes, combo, eta):
                return combo
    raise AssertionError("the full set is always a cover")


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloEstimate:
    frequency: float
    stderr: float
    trials: int
    hits: int

    def within(self, value: float, n_se: float = 4.0) -> bool:
        # floor on the SE so a zero-hit run does not demand exact agreement
        se = max(self.stderr, 1.0 / self.trials)
        return abs(self.frequency - value) <= n_se * se


def _estimate(hits: int, trials: int) -> MonteCarloEstimate:
    f = hits / trials
    return MonteCarloEstimate(f, math.sqrt(f * (1 - f) / trials), trials, hits)


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Counter-based stream for one chunk of trials; depends only on ``(seed, chunk)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def _chunks(trials: int):
    i = 0
    start = 0
    while start < trials:
        size = min(CHUNK, trials - start)
        yield i, size
        i += 1
        start += size


def simulate_nb(params: NaiveBayesParams, n: int, k: int, eps: float,
                trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Frequency of ``max_i |E_S[q_i] - mu| >= eps`` under the Naive Bayes model.

    Each trial draws the ``2^k`` pattern counts of ``n`` examples from a
    multinomial and reads off every model's error count.
    """
    patterns, probs = nb_pattern_probs(params, k)
    probs = probs / probs.sum()
    hits = 0
    for i, size in _chunks(trials):
        rng = chunk_generator(seed, i)
        counts = rng.multinomial(n, probs, size=size) @ patterns
        hits += int(np.count_nonzero(_deviates(counts, n, params.mu, eps).any(axis=1)))
    return _estimate(hits, trials)


@dataclass(frozen=True)
class PairSimulation:
    p1: float
    p2: float
    eta: float
    moment_stderr: tuple
    tail: MonteCarloEstimate | None


def simulate_pair(coupling: CouplingParams, n: int, trials: int, seed: int = 0,
                  alpha1: float | None = None, alpha2: float | None = None) -> PairSimulation:
    """Draw ``trials`` test sets of ``n`` examples from ``(X1 W, X2 W)``.

    Every example draws its three Bernoulli variables explicitly.  Returns
    pooled per-example moments (error rates and agreement, each with its
    standard error) and, when both ``alpha`` values are given, the frequency
    of ``{S2 <= n (p2 + alpha2)} and {S1 >= n (p1 + alpha1)}``.
    """
    p1 = coupling.px1 * coupling.pw
    p2 = coupling.px2 * coupling.pw
    want_tail = alpha1 is not None and alpha2 is not None
    rows = max(1, 2_000_000 // n)
    err1 = err2 = agree = 0
    hits = 0
    done = 0
    chunk = 0
    while done < trials:
        size = min(rows, trials - done)
        rng = chunk_generator(seed, chunk)
        w = rng.random((size, n)) < coupling.pw
        q1 = (rng.random((size, n)) < coupling.px1) & w
        q2 = (rng.random((size, n)) < coupling.px2) & w
        s1 = q1.sum(axis=1)
        s2 = q2.sum(axis=1)
        err1 += int(s1.sum())
        err2 += int(s2.sum())
        agree += int(np.count_nonzero(q1 == q2))
        if want_tail:
            ev = _at_most(s2, n * (p2 + alpha2)) & _at_least(s1, n * (p1 + alpha1))
            hits += int(np.count_nonzero(ev))
        done += size
        chunk += 1
    total = trials * n
    e1, e2, ag = err1 / total, err2 / total, agree / total
    se = tuple(math.sqrt(v * (1 - v) / total) for v in (e1, e2, ag))
    tail = _estimate(hits, trials) if want_tail else None
    return PairSimulation(e1, e2, ag, se, tail)


def simulate_trinomial(n: int, p1: float, p_neg1: float, t: float,
                       trials: int, seed: int = 0) -> MonteCarloEstimate:
    probs = np.array([p_neg1, 1 - p1 - p_neg1, p1])
    thr = n * (p1 - p_neg1 + t)
    hits = 0
    for i, size in _chunks(trials):
        rng = chunk_generator(seed, i)
        c = rng.multinomial(n, probs, size=size)
        s = c[:, 2] - c[:, 0]
        hits += int(np.count_nonzero(s > thr + _tol(thr)))
    return _estimate(hits, trials)
