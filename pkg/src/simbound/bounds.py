"""Overfitting-probability bounds for a symmetric ensemble of ``k`` models.

All three evaluators bound ``P(max_i |E_S[q_i] - E_D[q_i]| >= eps)`` for
``k`` models that share the population error ``mu`` and pairwise
similarity ``eta`` on a test set of ``n`` examples:

* ``standard_union_prob``: one exact binomial tail per model, summed.
* ``similarity_union_prob``: one model serves as an anchor at a reduced
  threshold ``eps - t``; every other model only pays for the event that it
  deviates by ``eps`` *while* the anchor stays below ``eps - t``.  Those
  joint tails are computed exactly through the ``(X1 W, X2 W)`` coupling.
* ``naive_bayes_prob``: the exact probability when all ``k`` losses share
  one ``W`` and have independent ``X_i``.

Deviation events follow :func:`simbound.numerics.deviation_counts`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import numerics as nm
from .coupling import factorize, joint_from_marginals, nb_params
from .errors import CouplingInfeasibleError, DomainError, InfeasibleError

__all__ = [
    "EnsembleSpec",
    "BoundResult",
    "JointTail",
    "standard_union_prob",
    "joint_tail",
    "similarity_union_prob",
    "naive_bayes_prob",
    "bound_probability",
    "clear_caches",
    "METHODS",
    "SLACK_GRID_POINTS",
    "WEIGHT_CUTOFF",
]

METHODS = ("standard", "similarity", "naive-bayes")
SLACK_GRID_POINTS = 64
# j-terms whose Binomial(n, pw) weight is below this fraction of the peak are dropped
WEIGHT_CUTOFF = 1e-18
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EnsembleSpec:
    """``k`` models with common error rate ``mu`` and pairwise similarity ``eta``.

    ``k = 0`` is accepted and treated as a single model.
    """

    n: int
    mu: float
    eta: float = 1.0
    k: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k!r}")
        for name in ("mu", "eta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", max(int(self.k), 1))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "eta", float(self.eta))
        if self.k >= 2:
            joint_from_marginals(self.mu, self.mu, self.eta)

    def with_k(self, k: int) -> "EnsembleSpec":
        return EnsembleSpec(self.n, self.mu, self.eta, k)

    @classmethod
    def from_matrix(cls, matrix, k: int | None = None) -> "EnsembleSpec":
        """Conservative symmetric reduction of an empirical ensemble.

        Uses the mean error rate as the common ``mu`` and the smallest
        pairwise similarity as ``eta``.
        """
        sim = matrix.similarity()
        m = matrix.n_models
        eta = 1.0 if m < 2 else float(sim[np.triu_indices(m, 1)].min())
        mu = float(matrix.error_rates.mean())
        return cls(matrix.n_examples, mu, eta, m if k is None else k)


@dataclass(frozen=True)
class BoundResult:
    probability: float
    method: str
    params: dict = field(default_factory=dict)
    slack_t: float | None = None
    truncation_error: float = 0.0
    exact: bool = False
    flags: tuple = ()

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "params": dict(self.params),
            "value": self.probability,
            "truncation_error": self.truncation_error,
            "flags": list(self.flags),
        }
        if self.slack_t is not None:
            out["slack_t"] = self.slack_t
        if self.exact:
            out["exact"] = True
        return out


class JointTail(NamedTuple):
    probability: float
    log_probability: float
    truncation_error: float


def _params(spec: EnsembleSpec, eps: float) -> dict:
    return {"n": spec.n, "mu": spec.mu, "eta": spec.eta, "eps": eps, "k": spec.k}


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    return eps


# --------------------------------------------------------------------------
# Standard union bound
# --------------------------------------------------------------------------

def standard_union_prob(spec: EnsembleSpec, eps: float) -> BoundResult:
    eps = _check_eps(eps)
    single = nm.two_sided_dev_tail(spec.n, spec.mu, eps)
    return BoundResult(min(1.0, spec.k * single), "standard", _params(spec, eps))


# --------------------------------------------------------------------------
# Mixture over the number of "hard" examples
# --------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _window(n: int, pw: float):
    """Window of ``j`` values carrying all but a negligible share of Binomial(n, pw).

    Returns ``(j, log_weights, dropped_mass)``.
    """
    if pw <= 0.0:
        return np.array([0]), np.array([0.0]), 0.0
    if pw >= 1.0:
        return np.array([n]), np.array([0.0]), 0.0
    sd = math.sqrt(n * pw * (1.0 - pw))
    mode = math.floor((n + 1) * pw)
    half = int(math.ceil(12.0 * sd + 40.0))
    j = np.arange(max(0, mode - half), min(n, mode + half) + 1)
    logw = nm.log_binom_pmf(n, pw, j)
    logw = np.atleast_1d(logw)
    keep = logw >= logw.max() + math.log(WEIGHT_CUTOFF)
    j, logw = j[keep], logw[keep]
    lo, hi = int(j[0]), int(j[-1])
    dropped = math.exp(nm.binom_logcdf(n, pw, lo - 1)) + math.exp(nm.binom_logsf(n, pw, hi + 1))
    return j, logw, dropped


@lru_cache(maxsize=8192)
def _row_logcdf(n: int, pw: float, px: float, c: int) -> np.ndarray:
    j, _, _ = _window(n, pw)
    return np.atleast_1d(nm.binom_logcdf(j, px, c))


@lru_cache(maxsize=8192)
def _row_logsf(n: int, pw: float, px: float, c: int) -> np.ndarray:
    j, _, _ = _window(n, pw)
    return np.atleast_1d(nm.binom_logsf(j, px, c))


def _pair_tail(n: int, pw: float, px_low: float, low_max: int, px_high: float, high_min: int):
    """``P(S_low <= low_max, S_high >= high_min)`` for the coupled pair of counts.

    Returns ``(log probability, dropped mass)``.
    """
    _, logw, dropped = _window(n, pw)
    terms = logw + _row_logcdf(n, pw, px_low, low_max) + _row_logsf(n, pw, px_high, high_min)
    return nm.logsumexp(terms), dropped


def joint_tail(n: int, p1: float, p2: float, eta: float, alpha1: float, alpha2: float) -> JointTail:
    """``P(E_S[q2] - p2 <= alpha2  and  E_S[q1] - p1 >= alpha1)``.

    Thresholds are ``floor(n (p2 + alpha2))`` for the second count and
    ``ceil(n (p1 + alpha1))`` for the first.  Raises
    :class:`CouplingInfeasibleError` for negatively correlated pairs.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    joint = joint_from_marginals(p1, p2, eta)
    c = factorize(joint)
    low_max = nm.floor_count(n * (p2 + alpha2))
    high_min = nm.ceil_count(n * (p1 + alpha1))
    logp, dropped = _pair_tail(n, c.pw, c.px2, low_max, c.px1, high_min)
    return JointTail(math.exp(logp), logp, dropped)


# --------------------------------------------------------------------------
# Similarity union bound
# --------------------------------------------------------------------------

class _SlackTerms(NamedTuple):
    anchor: float   # anchor deviates by at least eps - t (both sides)
    cross: float    # per extra model: deviates by eps while the anchor does not
    dropped: float  # truncation mass per cross term


def _slack_terms(n: int, mu: float, eps: float, px: float, pw: float, t: float) -> _SlackTerms:
    lo, hi = nm.deviation_counts(n, mu, eps)
    lo_t, hi_t = nm.deviation_counts(n, mu, eps - t)
    return _slack_terms_counts(n, mu, px, pw, lo, hi, lo_t, hi_t)


@lru_cache(maxsize=65536)
def _slack_terms_counts(n, mu, px, pw, lo, hi, lo_t, hi_t) -> _SlackTerms:
    anchor = math.exp(nm.logsumexp([nm.binom_logsf(n, mu, hi_t), nm.binom_logcdf(n, mu, lo_t)]))
    # right: other >= hi, anchor <= hi_t - 1; left: other <= lo, anchor >= lo_t + 1
    right, d = _pair_tail(n, pw, px, hi_t - 1, px, hi)
    left, _ = _pair_tail(n, pw, px, lo, px, lo_t + 1)
    cross = math.exp(nm.logsumexp([right, left]))
    return _SlackTerms(anchor, cross, 2.0 * d)


def _slack_total(terms: _SlackTerms, k: int) -> float:
    return terms.anchor + (k - 1) * (terms.cross + terms.dropped)


def similarity_union_prob(spec: EnsembleSpec, eps: float, *, t: float | None = None) -> BoundResult:
    """Refined union bound with an anchor model and an optimized slack ``t``.

    For each candidate ``t`` in ``[0, eps]`` the bound is
    ``P(anchor deviates by eps - t) + (k - 1) P(other deviates by eps,
    anchor does not deviate by eps - t)``, summed over both tails.  Any
    ``t`` gives a valid bound; the search (a uniform grid refined by golden
    section) only affects tightness.  Pass ``t`` to evaluate a single slack.
    """
    eps = _check_eps(eps)
    std = standard_union_prob(spec, eps)
    params = _params(spec, eps)
    if spec.k == 1:
        return BoundResult(std.probability, "similarity", params, slack_t=0.0)
    try:
        c = factorize(joint_from_marginals(spec.mu, spec.mu, spec.eta))
    except (CouplingInfeasibleError, InfeasibleError):
        return BoundResult(std.probability, "similarity", params,
                           flags=("coupling-infeasible", "fell-back-to-standard"))
    px, pw = c.px1, c.pw
    n, mu, k = spec.n, spec.mu, spec.k

    def total(tt: float) -> float:
        return _slack_total(_slack_terms(n, mu, eps, px, pw, tt), k)

    if t is not None:
        if not 0.0 <= t <= eps:
            raise DomainError(f"slack t must lie in [0, eps], got {t!r}")
        best_t, best = t, total(t)
    else:
        best_t, best = _search_slack(total, eps, n)

    dropped = _slack_terms(n, mu, eps, px, pw, best_t).dropped * (k - 1)
    flags = ()
    prob = min(1.0, best)
    if std.probability < prob:
        prob = std.probability
        flags = ("standard-tighter",)
    return BoundResult(prob, "similarity", params, slack_t=best_t,
                       truncation_error=dropped, flags=flags)


def _search_slack(f, eps: float, n: int) -> tuple[float, float]:
    grid = np.linspace(0.0, eps, SLACK_GRID_POINTS)
    vals = [f(float(t)) for t in grid]
    i = int(np.argmin(vals))
    best_t, best = float(grid[i]), vals[i]
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, len(grid) - 1)])
    # the objective only changes when n * t crosses a half-integer; stop below that
    tol = 0.25 / n
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        for x, v in ((x1, f1), (x2, f2)):
            if v < best:
                best_t, best = x, v
    return best_t, best


# --------------------------------------------------------------------------
# Naive Bayes exact probability
# --------------------------------------------------------------------------

@lru_cache(maxsize=1024)
def _nb_log_good(n: int, mu: float, eps: float, px: float, pw: float) -> np.ndarray:
    # ln P(one model stays within eps | j hard examples), per j in the window
    j, _, _ = _window(n, pw)
    lo, hi = nm.deviation_counts(n, mu, eps)
    log_bad = np.logaddexp(
        np.atleast_1d(nm.binom_logsf(j, px, hi)),
        np.atleast_1d(nm.binom_logcdf(j, px, lo)),
    )
    return np.atleast_1d(nm.log1mexp(np.minimum(log_bad, 0.0)))


def naive_bayes_prob(spec: EnsembleSpec, eps: float) -> BoundResult:
    """Exact overfitting probability when the losses are ``(X_1 W, ..., X_k W)``.

    Conditioning on the number ``j`` of examples with ``W = 1`` leaves ``k``
    independent Binomial(j, px) counts, each compared against ``n (mu +/- eps)``.
    """
    eps = _check_eps(eps)
    p = nb_params(spec.mu, spec.eta)
    n, k = spec.n, spec.k
    _, logw, dropped = _window(n, p.pw)
    log_good = _nb_log_good(n, spec.mu, eps, p.px, p.pw)
    with np.errstate(invalid="ignore"):
        any_bad = -np.expm1(k * log_good)
    any_bad = np.where(np.isnan(any_bad), 1.0, any_bad)
    prob = math.fsum(np.exp(logw) * any_bad)
    return BoundResult(min(prob, 1.0), "naive-bayes", _params(spec, eps),
                       truncation_error=dropped, exact=True)


def clear_caches() -> None:
    """Drop memoized windows and tail rows (mainly for timing runs)."""
    for f in (_window, _row_logcdf, _row_logsf, _slack_terms_counts, _nb_log_good):
        f.cache_clear()


def bound_probability(method: str, spec: EnsembleSpec, eps: float) -> BoundResult:
    if method == "standard":
        return standard_union_prob(spec, eps)
    if method == "similarity":
        return similarity_union_prob(spec, eps)
    if method == "naive-bayes":
        return naive_bayes_prob(spec, eps)
    raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
